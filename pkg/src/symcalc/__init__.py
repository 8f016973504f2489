"""Workbench for two symmetric classical-logic calculi.

The sequent-style calculus pairs programs against contexts in commands and
reduces by cut-style rules; the symmetric lambda-mu calculus extends the
lambda calculus with mu binders and named terms.  Submodules:

- ``lbar.syntax`` / ``lbar.engine``: sequent-calculus terms and reduction
- ``lmu.syntax`` / ``lmu.engine``: lambda-mu terms and reduction
- ``typecheck``: both type systems, derivations, subject reduction
- ``enumeration``: bounded exhaustive term generation
- ``analyzer``: reduction graphs, SN verdicts, sweeps, searches
- ``report``: JSON/CSV/figure rendering for sweep results
- ``cli``: the ``symcalc`` command-line tool
"""

__version__ = "0.1.0"

from . import engine, syntax

"""Constraint generation and rewriting (public name for `artifact.constraints`)."""
from .constraints import *  # noqa: F401,F403
from .constraints import gen_expr, rewrite  # noqa: F401

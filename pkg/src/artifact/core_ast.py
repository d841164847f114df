"""Abstract syntax of MinErl (public name for `artifact.syntax`)."""
from .syntax import *  # noqa: F401,F403
from .syntax import bound_vars, free_vars  # noqa: F401

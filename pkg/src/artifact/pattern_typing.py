"""Typing of guarded patterns (public name for `artifact.patterns`)."""
from .patterns import *  # noqa: F401,F403
from .patterns import accepting_type, potential_type  # noqa: F401

"""Types, schemes and declarations (public name for `artifact.typecore`)."""
from .typecore import *  # noqa: F401,F403
from .typecore import apply_subst, declare, free_tyvars, intern, to_dnf  # noqa: F401

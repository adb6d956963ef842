"""Projective map of four inelastic balls on a line."""

from ._bbmap import *  # noqa: F401,F403
from ._bbmap import BracketError, DomainError, __doc__  # noqa: F401

__version__ = "0.1.0"

"""Quantum noise sensing via stochastic-Zeno survival measurements."""

from ._sqz import *  # noqa: F401,F403
from ._sqz import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"

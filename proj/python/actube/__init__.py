"""Action tube detection: linking, trimming, transition matrices and evaluation."""

from ._actube import *  # noqa: F401,F403
from ._actube import __doc__  # noqa: F401

__version__ = "0.1.0"

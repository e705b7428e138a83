"""Domain-level web graph construction and credibility regression."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__, EmbeddingMatrix, Error, InputError, FormatError, ParameterError, DataError, IoError  # noqa: F401

__version__ = "0.1.0"

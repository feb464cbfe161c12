"""Born-Markov-secular generators, their balance relations and stationary states."""

from . import errors, models, services
from .system import OpenSystem

__version__ = "0.1.0"
__all__ = ["OpenSystem", "models", "errors", "services", "__version__"]

"""Statistical analysis of sexual-contact networks."""

from .graph import ContactGraph
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["ContactGraph", "BACKEND", "__version__"]

"""weisslab: admissibility constants, Carleson boxes, Riesz capacity and friends."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]

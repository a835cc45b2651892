"""Sample-Cluster-Select: diverse representative solutions for combinatorial problems."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

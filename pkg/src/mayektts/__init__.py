"""Desk-scale text-to-speech toolchain for Manipuri in Meetei Mayek."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

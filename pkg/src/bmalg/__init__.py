"""Dense complex hypermatrix algebra: cyclic products, structured
constructions, second-order-style spectra, transforms, and approximation."""

from bmalg.core import Hypermatrix, HypermatrixError, ShapeMismatchError

__all__ = ["Hypermatrix", "HypermatrixError", "ShapeMismatchError"]

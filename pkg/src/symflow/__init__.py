"""Exchange-symmetry algebra, decoherence channels and symmetrization maps for two identical particles."""
from .pairspace import PairBasis
from .states import DensityOperator, classify, symmetricity

__all__ = ["PairBasis", "DensityOperator", "classify", "symmetricity"]
__version__ = "0.1.0"

"""Atomic decompositions and sampling frames for weighted Bergman spaces on the unit ball of C^n."""
from .bergman import HoloFunction, c_alpha, inner_product, inner_product_exact, kernel_eval, monomial_norm, psi
from .config import ExperimentConfig
from .errors import (
    BallFramesError,
    CapacityExceeded,
    ConfigError,
    ConvergenceFailure,
    DegenerateFamily,
    DomainError,
    InvalidGroupElement,
    NumericalBlowup,
    NumericalDegeneracy,
    TruncationWarning,
    UnsupportedAtomExponent,
)
from .frames import FrameSystem, analysis, decompose, frame_bounds, gram, reconstruct_from_samples, synthesis
from .group import BallPoint, GroupElement, act, inverse, s_from_coords, s_from_point
from .quadrature import QuadratureRule, ball_quadrature, rule_for_degree
from .representation import RepParams, wavelet, wavelet_psi
from .sampling import PointFamily, generate_lattice, pseudo_hyperbolic_distance

__version__ = "0.1.0"

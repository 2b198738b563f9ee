"""Gaussian Radon transform on Hilbert spaces with a measurable norm."""

from .errors import (
    BoundViolation,
    CertificateError,
    ConfigError,
    GaussRadonError,
    InvariantError,
    ProofStepError,
    SeparationError,
    ToleranceError,
)
from .functionals import BoundedFunctional
from .gaussian import AffineGaussian, Estimate, char_fn, empirical_char_fn, expect, sample, tail_decay
from .hilbert import (
    AffineSubspace,
    Ball,
    Frame,
    HVector,
    Hull,
    Hyperplane,
    closest_point,
    complement,
    distance,
    extend,
    lift_hyperplane,
    orthonormalize,
    project,
)
from .kernels import BACKEND
from .norms import (
    AdaptedSequence,
    CertificateKind,
    HilbertNorm,
    MeasurableNormModel,
    WeightedL2Norm,
    build_adapted_sequence,
    estimate_tail,
    separating_sequence,
)
from .radon import (
    RadonResult,
    conditional_slice,
    disintegrate_check,
    disintegrate_exponential,
    finite_dim_radon,
    radon_transform,
    recover_point,
)
from .support import SupportReport, helgason_check_2d, project_body, support_experiment
from .wiener import (
    PathPoint,
    SchauderBasis,
    WienerSupNorm,
    brownian_sanity,
    condition_functional,
    path_from_coeffs,
    sup_norm,
)

__version__ = "0.1.0"

"""Puffini-Videv curvature models.

Algebraic curvature tensors of any signature, their Jacobi, higher order
Jacobi and Ricci operators, the commutativity property
``J(pi) J(pi^perp) = J(pi^perp) J(pi)`` with its equivalent tests, the Ricci
eigenspace block decomposition, and numerical geometry of coordinate charts.
"""

from .errors import (
    BadParameter,
    BianchiViolation,
    ClusterAmbiguity,
    Degenerate,
    DimensionMismatch,
    DomainError,
    ExpressionSyntaxError,
    InsufficientSamples,
    NotDecomposable,
    PVModelsError,
    SamplerExhausted,
    SignatureMismatch,
    SymmetryConflict,
    UnknownIdentifier,
    VariableOutOfRange,
    ZeroCurvature,
)
from .linalg import (
    GrassmannSignature,
    InnerProductSpace,
    Subspace,
    admissible_signatures,
    commutator,
    grassmann_sample,
    make_space,
    orthogonal_complement,
    real_generalized_eigenspaces,
    subspace,
)
from .model import (
    AlgCurvTensor,
    Model0,
    constant_curvature_model,
    curvature_operator,
    curvature_range,
    direct_sum,
    higher_jacobi,
    jacobi,
    jacobi_polarized,
    ricci,
    scalar_curvature_of_model,
    tensor_from_components,
    validate_symmetries,
)
from .pv import (
    BlockDecomposition,
    Einstein,
    Neither,
    PseudoEinstein,
    PVReport,
    check_commuting_on_grassmannian,
    classify_block,
    decompose_pv,
    eq2d_vanishing_check,
    is_puffini_videv,
)

__version__ = "0.1.0"

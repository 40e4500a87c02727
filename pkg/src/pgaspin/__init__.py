"""Dense Clifford algebra with invariant decompositions, points, spinors and pointors."""

from .algebra import (
    DEFAULT_TOL,
    Algebra,
    Multivector,
    Signature,
    VersorCertificate,
    algebra,
    certify_versor,
    clifford_conjugate,
    commutator_product,
    exp_bivector,
    geometric_product,
    grade_involution,
    grade_select,
    left_contraction,
    matrix_rep,
    outer_product,
    reverse,
    sandwich,
    scalar_product,
    versor_inverse,
)
from .decomposition import (
    GaugedPair,
    InvariantDecomposition,
    SimpleFactor,
    bivector_split,
    gauge_pair,
    invariant_decompose,
    orthogonalize_factorization,
    polar_decompose,
    rotor_log,
    sqrt_self_reverse,
)
from .errors import (
    BranchError,
    DecompositionError,
    GAError,
    GradeError,
    NotABladeError,
    NotAVersorError,
    NullVersorError,
    ParseError,
    SignatureMismatchError,
    SubalgebraError,
    UnsupportedSignatureError,
)
from .points import PointFrame, chiral_split, factor_point, gauge_frame, label_decompose, label_project
from .pointors import (
    LabeledPointorComponent,
    Pointor,
    PointorError,
    hestenes_check,
    is_pointor,
    make_pointor,
    pointor_label_decompose,
    pointor_weyl_split,
    theorem2_check,
    to_algebraic_spinor,
)
from .spinors import (
    NullBasis,
    SpinorState,
    basis_spinor,
    chiral_operator,
    master_idempotent,
    null_eigenvectors,
    spinor_expand,
    weyl_project,
)
from .textio import format_multivector, from_json, parse, to_json

__version__ = "0.1.0"

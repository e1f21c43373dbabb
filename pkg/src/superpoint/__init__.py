"""Grassmann algebras, super matrices and maps from superpoints to matrix superpoints."""
from __future__ import annotations

__version__ = "0.1.0"

from .azumaya_map import (
    AssignmentEta,
    MapHandle,
    SpectralLocusReport,
    ValidationReport,
    apply,
    build,
    check_admissibility_axioms,
    cinfty_hull_eval,
    spectral_locus,
    validate,
    verify_homomorphism,
)
from .coefficients import EXACT, NUMERIC, GaussianRational
from .errors import (
    ConditionViolation,
    DomainError,
    ExpressionError,
    InternalConsistencyError,
    NeedsHintError,
    NotCoprimeError,
    NotInvertibleError,
    ParityError,
    PreconditionError,
    StructuralError,
    SuperpointError,
)
from .grassmann import ANTICOMMUTE, COMMUTE, GrassmannElement, Signature, merge
from .jet_eval import eval_even
from .polynomial import Poly
from .smoothfn import MultiPoly, SmoothFunction, SuperFunction, sf_mul, taylor_coefficients, taylor_poly
from .spectral import (
    EigenData,
    IdempotentSystem,
    PrimaryDecomposition,
    eigen_extract,
    idempotent_system,
    joint_system,
    poly_bezout,
    primary_decomposition,
)
from .supermatrix import CharPoly, SuperMatrix, charpoly, commutator_class, invert

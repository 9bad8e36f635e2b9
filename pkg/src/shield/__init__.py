"""Requirement-shielding engine.

Compiles declarative requirement files (CNF clauses or linear inequalities
over a model's output variables) into a deterministic correction operator:
any prediction batch maps to outputs satisfying every requirement, with
analytic vector-Jacobian products for use inside training loops.
"""

from .batch import (
    CorrectionReport,
    PredictionBatch,
    build_report,
    check_batch,
    count_violations,
    read_batch,
    write_batch,
    write_report,
)
from .cnf import CnfPlan, CorrectedVector, apply_general, apply_hierarchy, compile_cnf
from .errors import (
    BoundaryTooCloseError,
    BudgetExceededError,
    ComplexityExceededError,
    CyclicGraphError,
    DegenerateConstraintError,
    EmptyFileError,
    EngineMismatchError,
    InfeasibleError,
    InternalGuaranteeError,
    InvalidInputError,
    MixedDialectError,
    NonNumericCellError,
    RequirementSyntaxError,
    SamplerStarvedError,
    ShieldError,
    TraceMismatchError,
    UnsatisfiableError,
    VariableOutOfRangeError,
    WidthMismatchError,
)
from .grad import (
    FiniteDifferenceReport,
    VjpTrace,
    apply_plan,
    apply_with_trace,
    finite_difference_check,
    vjp,
)
from .layer import ShieldLayer, build_shield_layer, build_shield_layer_from_text, compile_plan
from .linear import EliminationPlan, apply_linear, compile_linear
from .plans import IdentityPlan, ShieldPlan
from .reqlang import (
    Clause,
    LinearInequality,
    Literal,
    RequirementSet,
    normalize,
    parse_requirements,
    render_requirements,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryTooCloseError",
    "BudgetExceededError",
    "Clause",
    "CnfPlan",
    "ComplexityExceededError",
    "CorrectedVector",
    "CorrectionReport",
    "CyclicGraphError",
    "DegenerateConstraintError",
    "EliminationPlan",
    "EmptyFileError",
    "EngineMismatchError",
    "FiniteDifferenceReport",
    "IdentityPlan",
    "InfeasibleError",
    "InternalGuaranteeError",
    "InvalidInputError",
    "LinearInequality",
    "Literal",
    "MixedDialectError",
    "NonNumericCellError",
    "PredictionBatch",
    "RequirementSet",
    "RequirementSyntaxError",
    "SamplerStarvedError",
    "ShieldError",
    "ShieldLayer",
    "ShieldPlan",
    "TraceMismatchError",
    "UnsatisfiableError",
    "VariableOutOfRangeError",
    "VjpTrace",
    "WidthMismatchError",
    "apply_general",
    "apply_hierarchy",
    "apply_linear",
    "apply_plan",
    "apply_with_trace",
    "build_report",
    "build_shield_layer",
    "build_shield_layer_from_text",
    "check_batch",
    "compile_cnf",
    "compile_linear",
    "compile_plan",
    "count_violations",
    "finite_difference_check",
    "normalize",
    "parse_requirements",
    "read_batch",
    "render_requirements",
    "vjp",
    "write_batch",
    "write_report",
]

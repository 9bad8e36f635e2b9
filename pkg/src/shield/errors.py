"""Exception and warning types shared across the package.

Every error raised on a user-facing path derives from ShieldError so callers
(and the CLI) can distinguish "bad input" from genuine bugs.  Line and column
numbers are 1-based everywhere.
"""

from __future__ import annotations


class ShieldError(Exception):
    """Base class for all input, compile, and runtime errors."""


# ---------------------------------------------------------------------------
# requirement-file errors


class RequirementSyntaxError(ShieldError):
    def __init__(self, line: int, column: int, expected: str):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"line {line}, column {column}: expected {expected}")


class MixedDialectError(ShieldError):
    def __init__(self, line: int):
        self.line = line
        super().__init__(
            f"line {line}: requirement dialect differs from the rest of the file "
            "(clauses and linear inequalities cannot be mixed)"
        )


class VariableOutOfRangeError(ShieldError):
    def __init__(self, line: int, index: int, num_variables: int):
        self.line = line
        self.index = index
        self.num_variables = num_variables
        super().__init__(
            f"line {line}: variable y_{index} out of range "
            f"(num_variables = {num_variables})"
        )


class DegenerateConstraintError(ShieldError):
    def __init__(self, line: int, detail: str):
        self.line = line
        super().__init__(f"line {line}: degenerate constraint: {detail}")


# ---------------------------------------------------------------------------
# compile-time errors


class UnsatisfiableError(ShieldError):
    """The CNF requirement set has no model; no correction can exist."""


class InfeasibleError(ShieldError):
    """The linear requirement set describes an empty polyhedron."""


class ComplexityExceededError(ShieldError):
    """Variable elimination generated more derived constraints than the cap."""


class EngineMismatchError(ShieldError):
    """A forced engine choice is incompatible with the file's dialect or shape."""


# ---------------------------------------------------------------------------
# runtime errors


class InvalidInputError(ShieldError):
    """Prediction vector fails a precondition (wrong length, NaN, infinity)."""


class TraceMismatchError(ShieldError):
    """A correction trace does not structurally match the plan it is used with."""


class BoundaryTooCloseError(ShieldError):
    """Finite-difference probe detected a branch change inside the stencil."""


class InternalGuaranteeError(ShieldError):
    """Post-correction check found a violation: an engine bug, never user error."""


# ---------------------------------------------------------------------------
# batch I/O errors


class BatchIoError(ShieldError):
    """Base class for prediction-batch reading problems."""


class EmptyFileError(BatchIoError):
    pass


class WidthMismatchError(BatchIoError):
    def __init__(self, row: int, expected: int, got: int):
        self.row = row
        self.expected = expected
        self.got = got
        super().__init__(f"row {row}: expected {expected} columns, got {got}")


class NonNumericCellError(BatchIoError):
    def __init__(self, row: int, column: int, cell: str):
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(f"row {row}, column {column}: not a finite number: {cell!r}")


# ---------------------------------------------------------------------------
# oracle errors


class BudgetExceededError(ShieldError):
    pass


class CyclicGraphError(ShieldError):
    pass


class SamplerStarvedError(ShieldError):
    """No point satisfying the original constraints was found; inconclusive."""


# ---------------------------------------------------------------------------
# warnings


class DegenerateConstraintWarning(UserWarning):
    """A variable-free, trivially true line was dropped during normalization."""


class DuplicateRequirementWarning(UserWarning):
    """An exact duplicate requirement was dropped during normalization."""

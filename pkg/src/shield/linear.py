"""Linear-inequality correction via ordered variable elimination.

Compilation assigns every inequality to the step of its latest variable
under a processing order (ascending index by default), then eliminates
variables from the last step to the first: each (lower, upper) bound pair on
the eliminated variable contributes a derived inequality over earlier
variables, which is normalized, deduplicated, and routed to the step of its
own latest variable.  The derived closure is exactly what makes sequential
clamping safe: once the values chosen at steps < k satisfy every constraint
assigned there, the feasible interval at step k cannot be empty.

Correction then walks the order, clamping each coordinate into
``[L_k, U_k]`` where the bounds are evaluated at already-corrected values.
Inputs that satisfy every (strictness-tightened) original inequality pass
through bit-identically.

All arithmetic is 64-bit floating point; with integer-valued coefficients the
elimination is exact.  Strict inequalities are tightened to ``>= b + eps``
before elimination, so outputs clear strict bounds by the configured margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cnf import LOWER, PASS, UPPER, Action, CorrectedVector
from .errors import ComplexityExceededError, InfeasibleError, InvalidInputError
from .reqlang import LINEAR, RequirementSet

DEFAULT_STRICT_EPSILON = 1e-6
DEFAULT_DERIVED_CAP = 10_000


@dataclass(frozen=True)
class Row:
    """One canonical inequality sum(c * y_v) >= bound.

    Rows keep their natural (unscaled) coefficients so that elimination over
    integer-coefficient systems is exact in 64-bit floats; normalization to a
    +-1 leading coefficient happens only in deduplication keys and in the
    bound expressions of the compiled plan.  ``ancestors`` is a bitmask of the
    original constraint ids a derived row was combined from, used for
    Imbert's redundancy bound.
    """

    coeffs: tuple[tuple[int, float], ...]
    bound: float
    constraint_id: int
    ancestors: int = 0

    def slack(self, values) -> float:
        acc = -self.bound
        for v, c in self.coeffs:
            acc += c * values[v]
        return acc


@dataclass(frozen=True)
class BoundExpr:
    """An affine bound on one variable: value = const + sum(c * y_j)."""

    constraint_id: int
    const: float
    coeffs: tuple[tuple[int, float], ...]  # only variables earlier in the order

    def evaluate(self, values) -> float:
        acc = self.const
        for j, c in self.coeffs:
            acc += c * values[j]
        return acc


@dataclass(frozen=True)
class Step:
    variable: int
    lowers: tuple[BoundExpr, ...]
    uppers: tuple[BoundExpr, ...]


@dataclass(frozen=True)
class EliminationPlan:
    num_variables: int
    ordering: tuple[int, ...]
    steps: tuple[Step, ...]  # in processing order
    originals: tuple[Row, ...]  # tightened, unscaled; drives the identity fast path
    derived_rows: tuple[Row, ...]  # retained elimination products (scaled)
    derived_count: int  # products generated, before deduplication
    strict_epsilon: float


def compile_linear(
    rs: RequirementSet,
    ordering=None,
    strict_epsilon: float = DEFAULT_STRICT_EPSILON,
    max_derived: int = DEFAULT_DERIVED_CAP,
) -> EliminationPlan:
    """Compile a normalized Linear RequirementSet into an EliminationPlan.

    Raises InfeasibleError when elimination produces a variable-free
    residual ``0 >= b`` with b > 0, and ComplexityExceededError when more
    than ``max_derived`` products are generated.
    """
    if rs.dialect != LINEAR:
        raise ValueError(f"expected a linear requirement set, got dialect {rs.dialect!r}")
    n = rs.num_variables
    if ordering is None:
        ordering = tuple(range(n))
    else:
        ordering = tuple(int(v) for v in ordering)
        if sorted(ordering) != list(range(n)):
            raise ValueError(f"ordering must be a permutation of 0..{n - 1}")
    position = {v: i for i, v in enumerate(ordering)}

    originals: list[Row] = []
    for cid, ineq in enumerate(rs.inequalities):
        bound = ineq.rhs + strict_epsilon if ineq.relation == ">" else ineq.rhs
        originals.append(Row(ineq.terms, bound, cid, ancestors=1 << cid))

    buckets: list[list[Row]] = [[] for _ in range(n)]
    # per bucket: scaled-coefficient key -> (bucket index, scaled bound) of
    # the tightest same-shape row seen so far
    tightest: list[dict[tuple, tuple[int, float]]] = [{} for _ in range(n)]

    def scaled_signature(coeffs: dict[int, float], bound: float, var: int):
        # normalize the step variable's coefficient to +-1 for comparison
        # (divide, never multiply by a reciprocal: lead/|lead| is exactly +-1)
        mag = abs(coeffs[var])
        key = tuple(sorted((v, c / mag) for v, c in coeffs.items()))
        return key, bound / mag

    def add_row(coeffs: dict[int, float], bound: float, cid: int, is_original: bool, ancestors: int = 0):
        step = max(position[v] for v in coeffs)
        key, scaled_bound = scaled_signature(coeffs, bound, ordering[step])
        bucket, index = buckets[step], tightest[step]
        row = Row(tuple(sorted(coeffs.items())), bound, cid, ancestors)
        prev = index.get(key)
        if is_original:
            bucket.append(row)
            if prev is None or prev[1] < scaled_bound:
                index[key] = (len(bucket) - 1, scaled_bound)
            return
        if prev is not None:
            prev_idx, prev_scaled = prev
            if prev_scaled >= scaled_bound:
                return  # implied by an existing row of the same shape
            if bucket[prev_idx].constraint_id >= len(originals):
                bucket[prev_idx] = row  # replace the weaker derived row
                index[key] = (prev_idx, scaled_bound)
                return
        bucket.append(row)
        index[key] = (len(bucket) - 1, scaled_bound)

    for row in originals:
        add_row(dict(row.coeffs), row.bound, row.constraint_id, True, row.ancestors)

    derived_count = 0
    next_cid = len(originals)
    for step in range(n - 1, -1, -1):
        var = ordering[step]
        eliminated = n - step  # eliminations performed, this one included
        lowers = [r for r in buckets[step] if dict(r.coeffs)[var] > 0]
        uppers = [r for r in buckets[step] if dict(r.coeffs)[var] < 0]
        for low in lowers:
            low_coeffs = dict(low.coeffs)
            alpha = low_coeffs[var]
            for up in uppers:
                ancestors = low.ancestors | up.ancestors
                if ancestors.bit_count() > eliminated + 1:
                    # Imbert's bound: such a product is implied by the rest
                    continue
                derived_count += 1
                if derived_count > max_derived:
                    raise ComplexityExceededError(
                        f"elimination generated more than {max_derived} derived "
                        "constraints; raise the cap or supply a better ordering"
                    )
                up_coeffs = dict(up.coeffs)
                beta = -up_coeffs[var]
                # beta*low + alpha*up cancels var; exact for integer systems
                coeffs: dict[int, float] = {
                    v: beta * c for v, c in low_coeffs.items() if v != var
                }
                for v, c in up_coeffs.items():
                    if v == var:
                        continue
                    s = coeffs.get(v, 0.0) + alpha * c
                    if s == 0.0:
                        coeffs.pop(v, None)
                    else:
                        coeffs[v] = s
                bound = beta * low.bound + alpha * up.bound
                if not coeffs:
                    if bound > 0.0:
                        raise InfeasibleError(
                            "requirements describe an empty region "
                            f"(elimination produced 0 >= {bound!r})"
                        )
                    continue
                add_row(coeffs, bound, next_cid, False, ancestors)
                next_cid += 1

    steps: list[Step] = []
    derived_rows: list[Row] = []
    for i in range(n):
        var = ordering[i]
        lowers: list[BoundExpr] = []
        uppers: list[BoundExpr] = []
        for row in buckets[i]:
            coeffs = dict(row.coeffs)
            lead = coeffs.pop(var)
            if row.constraint_id >= len(originals):
                derived_rows.append(row)
            # y_var (>= if lead > 0, <= if lead < 0) (bound - sum(c*y_j)) / lead
            expr = BoundExpr(
                row.constraint_id,
                row.bound / lead,
                tuple(sorted((j, -c / lead) for j, c in coeffs.items())),
            )
            (lowers if lead > 0 else uppers).append(expr)
        lowers.sort(key=lambda e: e.constraint_id)
        uppers.sort(key=lambda e: e.constraint_id)
        steps.append(Step(var, tuple(lowers), tuple(uppers)))

    return EliminationPlan(
        num_variables=n,
        ordering=ordering,
        steps=tuple(steps),
        originals=tuple(originals),
        derived_rows=tuple(sorted(derived_rows, key=lambda r: r.constraint_id)),
        derived_count=derived_count,
        strict_epsilon=strict_epsilon,
    )


def apply_linear(plan: EliminationPlan, y) -> CorrectedVector:
    """Sequentially clamp a vector into the feasible region.

    Bounds at each step are evaluated at already-corrected earlier values;
    ties between equal bounds keep the lowest constraint id, and when a
    rounding-degenerate interval inverts (L > U by float dust), the upper
    bound wins, matching ``min(max(y, L), U)``.
    """
    n = plan.num_variables
    if len(y) != n:
        raise InvalidInputError(f"expected a vector of length {n}, got {len(y)}")
    for k, v in enumerate(y):
        if not math.isfinite(v):
            raise InvalidInputError(f"index {k}: value {v!r} is not finite")

    if all(row.slack(y) >= 0.0 for row in plan.originals):
        return CorrectedVector([float(v) for v in y], tuple((PASS, None) for _ in range(n)))

    out = [float(v) for v in y]
    actions: list[Action] = [(PASS, None)] * n
    for step in plan.steps:
        k = step.variable
        low = -math.inf
        low_id = None
        for expr in step.lowers:
            val = expr.evaluate(out)
            if val > low:
                low, low_id = val, expr.constraint_id
        high = math.inf
        high_id = None
        for expr in step.uppers:
            val = expr.evaluate(out)
            if val < high:
                high, high_id = val, expr.constraint_id
        yk = out[k]
        raised = yk if yk >= low else low
        if high < raised:
            out[k] = high
            actions[k] = (UPPER, high_id)
        elif low > yk:
            out[k] = low
            actions[k] = (LOWER, low_id)
    return CorrectedVector(out, tuple(actions))

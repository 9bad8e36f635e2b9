"""Vector-Jacobian products for the correction operators.

Every correction is piecewise linear in its input.  A forward call records
which branch was taken at each variable (pass-through, active bound, kept,
flipped, or max-source), and the backward call propagates a cotangent through
exactly that branch:

* linear clamps chain the cotangent into the active bound's affine
  expression over earlier corrected variables;
* general-CNF corrections contribute a diagonal of +1 (kept) or -1
  (reflected about 0.5) -- the discrete flip decision itself is treated as
  locally constant;
* hierarchy corrections route the cotangent to the argmax source.

At nondifferentiable points the subgradient of the recorded branch is
returned; tie-breaking (lowest constraint id, lowest variable index) matches
the forward pass by construction because the forward pass records it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnf import (
    FLIPPED,
    KEPT,
    LOWER,
    PASS,
    RAISED,
    UPPER,
    CnfPlan,
    CorrectedVector,
    apply_general,
    apply_hierarchy,
)
from .errors import BoundaryTooCloseError, InvalidInputError, TraceMismatchError
from .linear import EliminationPlan, apply_linear
from .plans import IdentityPlan, ShieldPlan


@dataclass(frozen=True)
class VjpTrace:
    engine: str  # "hierarchy" | "general" | "linear" | "identity"
    num_variables: int
    branches: tuple[tuple, ...]


def apply_plan(plan: ShieldPlan, p) -> CorrectedVector:
    """Run the correction appropriate for the plan type."""
    if isinstance(plan, IdentityPlan):
        if len(p) != plan.num_variables:
            raise InvalidInputError(
                f"expected a vector of length {plan.num_variables}, got {len(p)}"
            )
        return CorrectedVector([float(v) for v in p], tuple((PASS, None) for _ in p))
    if isinstance(plan, CnfPlan):
        return apply_hierarchy(plan, p) if plan.engine == "hierarchy" else apply_general(plan, p)
    if isinstance(plan, EliminationPlan):
        return apply_linear(plan, p)
    raise TypeError(f"not a correction plan: {plan!r}")


def plan_engine(plan: ShieldPlan) -> str:
    if isinstance(plan, CnfPlan):
        return plan.engine
    if isinstance(plan, EliminationPlan):
        return "linear"
    return "identity"


def apply_with_trace(plan: ShieldPlan, p) -> tuple[CorrectedVector, VjpTrace]:
    """Correct a vector and record the piecewise-linear branch per variable.

    Values are bit-identical to the traceless apply.
    """
    corrected = apply_plan(plan, p)
    return corrected, VjpTrace(plan_engine(plan), plan.num_variables, corrected.actions)


def vjp(plan: ShieldPlan, trace: VjpTrace, cotangent) -> list[float]:
    """Pull a cotangent back through the branch recorded in ``trace``."""
    n = plan.num_variables
    if trace.engine != plan_engine(plan) or trace.num_variables != n:
        raise TraceMismatchError(
            f"trace ({trace.engine}, n={trace.num_variables}) does not match "
            f"plan ({plan_engine(plan)}, n={n})"
        )
    if len(trace.branches) != n or len(cotangent) != n:
        raise TraceMismatchError("trace/cotangent length does not match the plan")

    if isinstance(plan, IdentityPlan):
        return [float(c) for c in cotangent]

    if isinstance(plan, CnfPlan) and plan.engine == "general":
        out = []
        for k, (kind, _) in enumerate(trace.branches):
            if kind == KEPT:
                out.append(float(cotangent[k]))
            elif kind == FLIPPED:
                out.append(-float(cotangent[k]))
            else:
                raise TraceMismatchError(f"branch {kind!r} is not a general-engine branch")
        return out

    if isinstance(plan, CnfPlan):  # hierarchy
        out = [0.0] * n
        for k, (kind, src) in enumerate(trace.branches):
            if kind == KEPT:
                out[k] += float(cotangent[k])
            elif kind == RAISED:
                if src is None or src not in plan.closures[k]:
                    raise TraceMismatchError(f"variable {k}: source {src!r} not in closure")
                out[src] += float(cotangent[k])
            else:
                raise TraceMismatchError(f"branch {kind!r} is not a hierarchy branch")
        return out

    # linear: walk steps backward, chaining clamps into their bound expressions
    adjoint = [float(c) for c in cotangent]
    out = [0.0] * n
    for step in reversed(plan.steps):
        k = step.variable
        kind, cid = trace.branches[k]
        if kind == PASS:
            out[k] = adjoint[k]
            continue
        bounds = step.lowers if kind == LOWER else step.uppers if kind == UPPER else None
        if bounds is None:
            raise TraceMismatchError(f"branch {kind!r} is not a linear-engine branch")
        expr = next((b for b in bounds if b.constraint_id == cid), None)
        if expr is None:
            raise TraceMismatchError(
                f"variable {k}: no {kind} bound with constraint id {cid} at its step"
            )
        g = adjoint[k]
        for j, c in expr.coeffs:
            adjoint[j] += g * c
    return out


@dataclass
class FiniteDifferenceReport:
    max_rel_error: float
    tolerance: float
    entries: int

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def finite_difference_check(
    plan: ShieldPlan, p, step: float = 1e-5, tolerance: float = 1e-5
) -> FiniteDifferenceReport:
    """Validate vjp against central differences of the correction map.

    Probes ``p +- 10*step`` along every axis first and raises
    BoundaryTooCloseError if any probe lands on a different branch (the
    check is then skipped, not failed, since the map is not differentiable
    across branch boundaries).
    """
    n = plan.num_variables
    base = [float(v) for v in p]
    _, trace = apply_with_trace(plan, base)

    for j in range(n):
        for delta in (10.0 * step, -10.0 * step):
            probe = list(base)
            probe[j] += delta
            _, probe_trace = apply_with_trace(plan, probe)
            if probe_trace.branches != trace.branches:
                raise BoundaryTooCloseError(
                    f"branch change within 10*step of index {j}; point too close "
                    "to a clamp activation, threshold, or tie"
                )

    numeric: list[list[float]] = [[0.0] * n for _ in range(n)]  # [output][input]
    for j in range(n):
        plus = list(base)
        plus[j] += step
        minus = list(base)
        minus[j] -= step
        fp = apply_plan(plan, plus).values
        fm = apply_plan(plan, minus).values
        for i in range(n):
            numeric[i][j] = (fp[i] - fm[i]) / (2.0 * step)

    max_rel = 0.0
    for i in range(n):
        unit = [0.0] * n
        unit[i] = 1.0
        analytic = vjp(plan, trace, unit)
        for j in range(n):
            a, b = analytic[j], numeric[i][j]
            rel = abs(a - b) / max(1.0, abs(a), abs(b))
            if rel > max_rel:
                max_rel = rel
    return FiniteDifferenceReport(max_rel, tolerance, n * n)

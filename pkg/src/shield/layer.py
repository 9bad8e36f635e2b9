"""Shield construction facade: parse, normalize, compile, correct.

The layer is built once from a requirement file and then applied to any
number of prediction batches::

    layer = build_shield_layer(num_variables, requirements_path)
    corrected = layer(predictions)      # numpy array or nested lists

Construction compiles the requirements into an immutable plan; application
is pure per row, so one layer may serve many threads concurrently.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import grad
from .cnf import CnfPlan, CorrectedVector, compile_cnf
from .errors import EngineMismatchError
from .grad import VjpTrace
from .linear import (
    DEFAULT_DERIVED_CAP,
    DEFAULT_STRICT_EPSILON,
    EliminationPlan,
    compile_linear,
)
from .plans import IdentityPlan, ShieldPlan
from .reqlang import CNF, EMPTY, LINEAR, RequirementSet, normalize, parse_requirements

ENGINE_CHOICES = ("auto", "hierarchy", "general", "linear")


def compile_plan(
    normalized: RequirementSet,
    engine: str = "auto",
    ordering=None,
    strict_epsilon: float = DEFAULT_STRICT_EPSILON,
    max_derived: int = DEFAULT_DERIVED_CAP,
) -> ShieldPlan:
    """Compile a normalized RequirementSet, honoring an engine override."""
    if engine not in ENGINE_CHOICES:
        raise ValueError(f"engine must be one of {ENGINE_CHOICES}, got {engine!r}")
    if normalized.dialect == EMPTY:
        if engine != "auto":
            raise EngineMismatchError(
                f"engine {engine!r} requested but the requirement set is empty"
            )
        return IdentityPlan(normalized.num_variables)
    if normalized.dialect == CNF:
        if engine == "linear":
            raise EngineMismatchError("engine 'linear' is incompatible with CNF requirements")
        return compile_cnf(normalized, engine=engine)
    if engine in ("hierarchy", "general"):
        raise EngineMismatchError(
            f"engine {engine!r} is incompatible with linear requirements"
        )
    return compile_linear(
        normalized,
        ordering=ordering,
        strict_epsilon=strict_epsilon,
        max_derived=max_derived,
    )


@dataclass(frozen=True)
class ShieldLayer:
    """A compiled correction operator over ``num_variables`` outputs."""

    requirements: RequirementSet  # as parsed (line-accurate, for reporting)
    normalized: RequirementSet
    plan: ShieldPlan = field(repr=False)

    @property
    def num_variables(self) -> int:
        return self.requirements.num_variables

    @property
    def dialect(self) -> str:
        return self.requirements.dialect

    @property
    def engine(self) -> str:
        return grad.plan_engine(self.plan)

    # -- correction ---------------------------------------------------------

    def apply_row(self, row) -> CorrectedVector:
        return grad.apply_plan(self.plan, [float(v) for v in row])

    def correct_row(self, row) -> list[float]:
        return self.apply_row(row).values

    def __call__(self, predictions):
        """Correct a batch, preserving its container shape.

        Accepts a numpy array (the last axis indexes variables; leading axes
        are preserved), a single row, or an iterable of rows.
        """
        if isinstance(predictions, (np.ndarray, np.generic)):
            arr = np.asarray(predictions, dtype=np.float64)
            if arr.ndim == 0:
                raise ValueError("predictions must have at least one axis")
            flat = arr.reshape(-1, arr.shape[-1])
            out = np.empty_like(flat)
            for i in range(flat.shape[0]):
                out[i] = self.correct_row(flat[i].tolist())
            return out.reshape(arr.shape)
        rows = list(predictions)
        if rows and not hasattr(rows[0], "__len__"):
            return self.correct_row(rows)
        return [self.correct_row(row) for row in rows]

    # -- training support ---------------------------------------------------

    def apply_with_trace(self, row) -> tuple[CorrectedVector, VjpTrace]:
        return grad.apply_with_trace(self.plan, [float(v) for v in row])

    def vjp(self, trace: VjpTrace, cotangent) -> list[float]:
        return grad.vjp(self.plan, trace, cotangent)

    # -- introspection ------------------------------------------------------

    def describe(self) -> dict:
        """Plan summary used by the CLI and embedded in reports."""
        info = {
            "dialect": self.dialect,
            "engine": self.engine,
            "num_variables": self.num_variables,
            "num_requirements": len(self.requirements),
            "num_normalized": len(self.normalized),
            "derived_constraints": 0,
            "ordering": None,
        }
        if isinstance(self.plan, EliminationPlan):
            info["derived_constraints"] = self.plan.derived_count
            info["ordering"] = list(self.plan.ordering)
        elif isinstance(self.plan, CnfPlan) and self.plan.engine == "hierarchy":
            info["ordering"] = list(self.plan.topo_order)
        return info


def build_shield_layer_from_text(
    text: str,
    num_variables: int | None = None,
    engine: str = "auto",
    ordering=None,
    strict_epsilon: float = DEFAULT_STRICT_EPSILON,
    max_derived: int = DEFAULT_DERIVED_CAP,
) -> ShieldLayer:
    parsed = parse_requirements(text, num_variables)
    normalized = normalize(parsed)
    plan = compile_plan(
        normalized,
        engine=engine,
        ordering=ordering,
        strict_epsilon=strict_epsilon,
        max_derived=max_derived,
    )
    return ShieldLayer(parsed, normalized, plan)


def build_shield_layer(
    num_variables: int,
    requirements_path: str | os.PathLike,
    engine: str = "auto",
    ordering=None,
    strict_epsilon: float = DEFAULT_STRICT_EPSILON,
    max_derived: int = DEFAULT_DERIVED_CAP,
) -> ShieldLayer:
    """Build a correction layer from a requirement file.

    ``num_variables`` is the trailing dimension of the predictions the layer
    will correct; variables beyond the highest index referenced in the file
    pass through unchanged.
    """
    with open(requirements_path, encoding="utf-8") as handle:
        text = handle.read()
    return build_shield_layer_from_text(
        text,
        num_variables,
        engine=engine,
        ordering=ordering,
        strict_epsilon=strict_epsilon,
        max_derived=max_derived,
    )

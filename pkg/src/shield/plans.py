"""Compiled correction plans: the identity variant and the union alias."""

from __future__ import annotations

from dataclasses import dataclass

from .cnf import CnfPlan
from .linear import EliminationPlan


@dataclass(frozen=True)
class IdentityPlan:
    """Plan for an empty requirement set; correction is the identity map."""

    num_variables: int
    engine: str = "identity"


ShieldPlan = CnfPlan | EliminationPlan | IdentityPlan

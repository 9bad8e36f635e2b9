"""Brute-force reference implementations for testing the engines.

Nothing here shares arithmetic or data paths with the production engines:
clause evaluation, reachability, and inequality slack are all reimplemented
from their definitions.  Everything is budget-capped and refuses oversized
inputs instead of running unbounded.  Test-suite use only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import (
    BudgetExceededError,
    CyclicGraphError,
    SamplerStarvedError,
    UnsatisfiableError,
)


@dataclass(frozen=True)
class OracleBudget:
    max_enum_variables: int = 20  # 2^n assignments enumerated
    max_graph_variables: int = 20
    max_sample_variables: int = 8
    max_samples: int = 10_000


DEFAULT_BUDGET = OracleBudget()


def _clause_pairs(clause):
    """Accept reqlang Clause objects or raw (variable, negated) pair lists."""
    lits = getattr(clause, "literals", clause)
    pairs = []
    for lit in lits:
        if hasattr(lit, "variable"):
            pairs.append((lit.variable, lit.negated))
        else:
            v, neg = lit
            pairs.append((int(v), bool(neg)))
    return pairs


def min_flip_model(clauses, b, budget: OracleBudget = DEFAULT_BUDGET):
    """Exhaustive minimum-Hamming-distance repair of a Boolean vector.

    Enumerates all 2^n assignments and returns ``(model, flip_count)`` where
    the model satisfies every clause and differs from ``b`` in the fewest
    positions; ties go to the lexicographically smallest model.
    """
    n = len(b)
    if n > budget.max_enum_variables:
        raise BudgetExceededError(f"{n} variables exceeds enumeration budget")
    target = [1 if x else 0 for x in b]
    pairs = [_clause_pairs(c) for c in clauses]

    best = None
    best_dist = n + 1
    for assignment in itertools.product((0, 1), repeat=n):
        ok = True
        for clause in pairs:
            if not any(assignment[v] != int(neg) for v, neg in clause):
                ok = False
                break
        if not ok:
            continue
        dist = sum(1 for x, y in zip(assignment, target) if x != y)
        if dist < best_dist:
            best = assignment
            best_dist = dist
            if dist == 0:
                break  # cannot improve on an exact match
    if best is None:
        raise UnsatisfiableError("no assignment satisfies the clauses")
    return best, best_dist


def hierarchy_closure_reference(edges, p, budget: OracleBudget = DEFAULT_BUDGET):
    """Definitional hierarchy correction: per-variable descendant-closure max.

    ``edges`` are (child, parent) pairs; the descendants of k are all nodes
    that reach k.  Raises CyclicGraphError on a cycle.
    """
    n = len(p)
    if n > budget.max_graph_variables:
        raise BudgetExceededError(f"{n} variables exceeds graph budget")
    out: dict[int, list[int]] = {}
    for child, parent in edges:
        out.setdefault(child, []).append(parent)

    # cycle check: iterative DFS with colors
    color = [0] * n  # 0 white, 1 gray, 2 black
    for start in range(n):
        if color[start]:
            continue
        stack = [(start, iter(out.get(start, ())))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    raise CyclicGraphError(f"cycle through variable {nxt}")
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(out.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()

    result = []
    for k in range(n):
        best = p[k]
        for a in range(n):
            if a == k:
                continue
            # does a reach k?
            seen = {a}
            frontier = [a]
            reached = False
            while frontier:
                node = frontier.pop()
                if node == k:
                    reached = True
                    break
                for nxt in out.get(node, ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            if reached and p[a] > best:
                best = p[a]
        result.append(best)
    return result


@dataclass
class SamplerReport:
    attempts: int
    accepted: int
    counterexamples: list  # (point, derived_index, slack)


def implied_constraint_sampler(
    originals,
    derived,
    num_variables: int,
    budget: OracleBudget = DEFAULT_BUDGET,
    seed: int = 0,
    box: tuple[float, float] = (-10.0, 10.0),
    tolerance: float = 1e-9,
) -> SamplerReport:
    """Soundness check on derived constraints by rejection sampling.

    Samples points in ``box`` uniformly, keeps those satisfying every
    original constraint, and records any kept point that violates a derived
    constraint beyond ``tolerance`` (there must be none for a sound
    derivation).  Constraints are (coeff_pairs, bound) meaning
    ``sum(c * y_v) >= bound``.  Raises SamplerStarvedError when no satisfying
    point is found within the sample budget (inconclusive, not a failure).
    """
    if num_variables > budget.max_sample_variables:
        raise BudgetExceededError(f"{num_variables} variables exceeds sampling budget")
    rng = random.Random(seed)
    lo, hi = box

    def slack(constraint, point):
        coeffs, bound = constraint
        acc = -bound
        for v, c in coeffs:
            acc += c * point[v]
        return acc

    accepted = 0
    counterexamples = []
    attempts = budget.max_samples
    for _ in range(attempts):
        point = [rng.uniform(lo, hi) for _ in range(num_variables)]
        if any(slack(orig, point) < 0.0 for orig in originals):
            continue
        accepted += 1
        for di, der in enumerate(derived):
            s = slack(der, point)
            if s < -tolerance:
                counterexamples.append((point, di, s))
    if accepted == 0:
        raise SamplerStarvedError(
            f"no point satisfying the originals in {attempts} samples"
        )
    return SamplerReport(attempts, accepted, counterexamples)

"""CNF correction engines.

Real-valued outputs are read as Booleans through a fixed truth convention:
the degree of a positive literal on variable k is ``p_k``, of a negative
literal ``1 - p_k``, and a literal holds iff its degree >= 0.5.  (At exactly
0.5 both polarities hold; that boundary belongs to both sides by design.)

Two engines share the CnfPlan container:

* hierarchy: every clause is a two-literal implication ``not a or b`` and
  the implication graph is acyclic; correction raises each variable to the
  maximum over its descendant closure.
* general: arbitrary clause sets; correction commits thresholded values in
  descending-confidence order, consulting a complete DPLL solver before each
  commitment and reflecting the prediction about 0.5 when a value is forced.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import EngineMismatchError, InvalidInputError, UnsatisfiableError
from .reqlang import CNF, Clause, RequirementSet

THRESHOLD = 0.5

# per-variable action records attached to corrected vectors
KEPT = "kept"
FLIPPED = "flipped"
RAISED = "max"
PASS = "pass"
LOWER = "lower"
UPPER = "upper"

Action = tuple[str, int | None]


def literal_degree(variable: int, negated: bool, values) -> float:
    v = values[variable]
    return 1.0 - v if negated else v


def clause_satisfied(clause: Clause, values) -> bool:
    """A clause holds iff some literal has degree >= 0.5."""
    return any(
        literal_degree(lit.variable, lit.negated, values) >= THRESHOLD
        for lit in clause.literals
    )


def clause_satisfied_bits(clause: Clause, bits) -> bool:
    """Strict Boolean reading, for 0/1 assignments."""
    return any(bool(bits[lit.variable]) != lit.negated for lit in clause.literals)


@dataclass
class CorrectedVector:
    values: list[float]
    actions: tuple[Action, ...]


# ---------------------------------------------------------------------------
# embedded decision procedure


class SatSolver:
    """Complete iterative DPLL with unit propagation and two watched literals.

    Deterministic: branches on the lowest-index unassigned variable, trying
    the preferred phase first, with chronological backtracking and no
    restarts.  Literals are signed ints: ``+(v+1)`` / ``-(v+1)``.

    Watch lists mutate during search, so instances must not be shared across
    threads; construction from a plan's clause tuple is cheap.
    """

    def __init__(self, num_vars: int, clauses):
        self.n = num_vars
        self.units: list[int] = []
        self.clauses: list[tuple[int, ...]] = []
        self.watches: dict[int, list[int]] = {}
        self.watched: list[list[int]] = []
        for lits in clauses:
            if len(lits) == 1:
                self.units.append(lits[0])
                continue
            ci = len(self.clauses)
            self.clauses.append(tuple(lits))
            a, b = lits[0], lits[1]
            self.watched.append([a, b])
            self.watches.setdefault(a, []).append(ci)
            self.watches.setdefault(b, []).append(ci)

    def solve(self, fixed=(), prefer=None):
        """Search for a model extending ``fixed`` ((var, bool) pairs).

        Returns the model as a tuple of bools, or None when none exists.
        """
        n = self.n
        assign: list[bool | None] = [None] * n
        trail: list[int] = []

        def enqueue(lit: int) -> bool:
            v = abs(lit) - 1
            val = lit > 0
            cur = assign[v]
            if cur is None:
                assign[v] = val
                trail.append(lit)
                return True
            return cur == val

        def propagate(start: int) -> bool:
            qi = start
            while qi < len(trail):
                falsified = -trail[qi]
                qi += 1
                wl = self.watches.get(falsified)
                if not wl:
                    continue
                i = 0
                while i < len(wl):
                    ci = wl[i]
                    pair = self.watched[ci]
                    other = pair[0] if pair[1] == falsified else pair[1]
                    oval = assign[abs(other) - 1]
                    if oval is not None and oval == (other > 0):
                        i += 1
                        continue
                    moved = False
                    for cand in self.clauses[ci]:
                        if cand == other or cand == falsified:
                            continue
                        cval = assign[abs(cand) - 1]
                        if cval is None or cval == (cand > 0):
                            if pair[0] == falsified:
                                pair[0] = cand
                            else:
                                pair[1] = cand
                            self.watches.setdefault(cand, []).append(ci)
                            wl[i] = wl[-1]
                            wl.pop()
                            moved = True
                            break
                    if moved:
                        continue
                    if oval is None:
                        enqueue(other)
                        i += 1
                    else:  # other is false: conflict
                        return False
            return True

        for v, val in fixed:
            if not enqueue((v + 1) if val else -(v + 1)):
                return None
        for lit in self.units:
            if not enqueue(lit):
                return None
        if not propagate(0):
            return None

        decisions: list[list] = []  # [trail_mark, var, tried_second]
        while True:
            var = -1
            for k in range(n):
                if assign[k] is None:
                    var = k
                    break
            if var < 0:
                return tuple(assign)
            phase = prefer[var] if prefer is not None else False
            mark = len(trail)
            decisions.append([mark, var, False])
            enqueue((var + 1) if phase else -(var + 1))
            ok = propagate(mark)
            while not ok:
                while decisions and decisions[-1][2]:
                    mark = decisions.pop()[0]
                    while len(trail) > mark:
                        assign[abs(trail.pop()) - 1] = None
                if not decisions:
                    return None
                dec = decisions[-1]
                mark, var = dec[0], dec[1]
                while len(trail) > mark:
                    assign[abs(trail.pop()) - 1] = None
                dec[2] = True
                first_phase = prefer[var] if prefer is not None else False
                enqueue(-(var + 1) if first_phase else (var + 1))
                ok = propagate(mark)


# ---------------------------------------------------------------------------
# compiled plan


@dataclass(frozen=True)
class CnfPlan:
    engine: str  # "hierarchy" or "general"
    num_variables: int
    clauses: tuple[Clause, ...]
    int_clauses: tuple[tuple[int, ...], ...]
    pos_masks: tuple[int, ...]
    neg_masks: tuple[int, ...]
    # hierarchy data
    edges: tuple[tuple[int, int], ...] = ()  # (child, parent): child implies parent
    topo_order: tuple[int, ...] = ()
    closures: tuple[tuple[int, ...], ...] = ()  # per var: sorted, self included
    # general data
    certificate: tuple[bool, ...] = field(default=(), repr=False)


def _encode(clauses: tuple[Clause, ...]) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(-(lit.variable + 1) if lit.negated else (lit.variable + 1) for lit in c.literals)
        for c in clauses
    )


def _masks(clauses: tuple[Clause, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pos, neg = [], []
    for c in clauses:
        pm = nm = 0
        for lit in c.literals:
            if lit.negated:
                nm |= 1 << lit.variable
            else:
                pm |= 1 << lit.variable
        pos.append(pm)
        neg.append(nm)
    return tuple(pos), tuple(neg)


def _topological_order(n: int, edges) -> tuple[int, ...] | None:
    """Kahn's algorithm, lowest index first; None when the graph has a cycle."""
    out: dict[int, list[int]] = {}
    indeg = [0] * n
    for child, parent in edges:
        out.setdefault(child, []).append(parent)
        indeg[parent] += 1
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in out.get(v, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return tuple(order) if len(order) == n else None


def compile_cnf(rs: RequirementSet, engine: str = "auto") -> CnfPlan:
    """Compile a normalized CNF RequirementSet into a correction plan.

    With ``engine="auto"``, selects the hierarchy engine when every clause is
    a two-literal implication and the implication graph is acyclic; otherwise
    builds a general plan whose satisfiability certificate is found by the
    embedded solver.  ``engine="general"`` forces the general plan;
    ``engine="hierarchy"`` fails unless the structural test passes.
    Raises UnsatisfiableError when the set has no model.
    """
    if rs.dialect != CNF:
        raise ValueError(f"expected a CNF requirement set, got dialect {rs.dialect!r}")
    if engine not in ("auto", "hierarchy", "general"):
        raise ValueError(f"unknown CNF engine {engine!r}")
    n = rs.num_variables
    int_clauses = _encode(rs.clauses)
    pos_masks, neg_masks = _masks(rs.clauses)

    edges = []
    hierarchical = engine != "general"
    for clause in rs.clauses if hierarchical else ():
        if len(clause.literals) != 2:
            hierarchical = False
            break
        a, b = clause.literals
        if a.negated == b.negated:
            hierarchical = False
            break
        neg, pos = (a, b) if a.negated else (b, a)
        edges.append((neg.variable, pos.variable))

    if hierarchical:
        topo = _topological_order(n, edges)
        if topo is None and engine == "hierarchy":
            raise EngineMismatchError(
                "hierarchy engine requires an acyclic implication graph"
            )
        if topo is not None:
            closure_masks = [0] * n
            inedges: dict[int, list[int]] = {}
            for child, parent in edges:
                inedges.setdefault(parent, []).append(child)
            for v in topo:
                m = 0
                for child in inedges.get(v, ()):
                    m |= closure_masks[child] | (1 << child)
                closure_masks[v] = m
            closures = tuple(
                tuple(sorted(k for k in range(n) if (closure_masks[v] >> k) & 1 or k == v))
                for v in range(n)
            )
            return CnfPlan(
                engine="hierarchy",
                num_variables=n,
                clauses=rs.clauses,
                int_clauses=int_clauses,
                pos_masks=pos_masks,
                neg_masks=neg_masks,
                edges=tuple(sorted(set(edges))),
                topo_order=topo,
                closures=closures,
            )

    if engine == "hierarchy":
        raise EngineMismatchError(
            "hierarchy engine requires every clause to be a two-literal "
            "implication (one positive, one negative literal)"
        )
    model = SatSolver(n, int_clauses).solve()
    if model is None:
        raise UnsatisfiableError("requirement set has no model; no output can comply")
    bits = [1 if b else 0 for b in model]
    if not all(clause_satisfied_bits(c, bits) for c in rs.clauses):
        raise AssertionError("solver returned a non-model certificate")
    return CnfPlan(
        engine="general",
        num_variables=n,
        clauses=rs.clauses,
        int_clauses=int_clauses,
        pos_masks=pos_masks,
        neg_masks=neg_masks,
        certificate=model,
    )


# ---------------------------------------------------------------------------
# correction


def _validate_vector(p, n: int):
    if len(p) != n:
        raise InvalidInputError(f"expected a vector of length {n}, got {len(p)}")
    for k, v in enumerate(p):
        if not math.isfinite(v):
            raise InvalidInputError(f"index {k}: value {v!r} is not finite")


def _is_model_mask(plan: CnfPlan, bits: int) -> bool:
    full = (1 << plan.num_variables) - 1
    inv = bits ^ full
    for pm, nm in zip(plan.pos_masks, plan.neg_masks):
        if not ((bits & pm) or (inv & nm)):
            return False
    return True


def apply_hierarchy(plan: CnfPlan, p) -> CorrectedVector:
    """Raise each variable to the max prediction over its descendant closure.

    For every implication edge a -> b the output satisfies h_b >= h_a; inputs
    whose parents already dominate their descendants pass through unchanged.
    Ties pick the lowest-index source.
    """
    if plan.engine != "hierarchy":
        raise ValueError("plan was not compiled for the hierarchy engine")
    _validate_vector(p, plan.num_variables)
    values: list[float] = []
    actions: list[Action] = []
    for k in range(plan.num_variables):
        best_src = k
        best = p[k]
        for c in plan.closures[k]:
            if p[c] > best:
                best = p[c]
                best_src = c
            elif p[c] == best and c < best_src:
                best_src = c
        values.append(float(best))
        actions.append((KEPT, None) if best_src == k else (RAISED, best_src))
    return CorrectedVector(values, tuple(actions))


def apply_general(plan: CnfPlan, p) -> CorrectedVector:
    """Satisfiability-guided greedy repair.

    Variables are processed in descending confidence ``|p_k - 0.5|`` (ties by
    ascending index).  Each step tentatively commits the thresholded value;
    if the partial assignment no longer extends to a model, the opposite
    value is committed instead and the output coordinate is reflected to
    ``1 - p_k``.  The committed assignment is always a model, so the output
    thresholds to one; inputs already thresholding to a model pass through
    bit-identically.
    """
    if plan.engine != "general":
        raise ValueError("plan was not compiled for the general engine")
    n = plan.num_variables
    _validate_vector(p, n)

    bits = 0
    for k in range(n):
        if p[k] >= THRESHOLD:
            bits |= 1 << k
    if _is_model_mask(plan, bits):
        return CorrectedVector([float(v) for v in p], tuple((KEPT, None) for _ in range(n)))

    order = sorted(range(n), key=lambda k: (-abs(p[k] - THRESHOLD), k))
    solver = SatSolver(n, plan.int_clauses)
    witness = list(plan.certificate)
    committed: list[tuple[int, bool]] = []
    flipped = [False] * n
    for k in order:
        bk = p[k] >= THRESHOLD
        if witness[k] == bk:
            committed.append((k, bk))
            continue
        model = solver.solve(committed + [(k, bk)], prefer=witness)
        if model is not None:
            witness = list(model)
            committed.append((k, bk))
        else:
            flipped[k] = True
            committed.append((k, not bk))

    values = [1.0 - p[k] if flipped[k] else float(p[k]) for k in range(n)]
    actions = tuple((FLIPPED, None) if flipped[k] else (KEPT, None) for k in range(n))
    return CorrectedVector(values, actions)

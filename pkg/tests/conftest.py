"""Shared fixtures and fuzz-case generators."""

import random

import pytest

from shield import build_shield_layer_from_text

TRAFFIC_TEXT = (
    "not y_0 or y_1 or y_2 or y_3\n"
    "not y_0 or not y_1 or not y_2\n"
    "not y_0 or not y_1 or not y_3\n"
    "not y_0 or not y_2 or not y_3\n"
)

HEMOGLOBIN_TEXT = "y_0 - y_1 >= 0\ny_2 - y_3 >= 0\n"


# ---------------------------------------------------------------------------
# fuzz-case generators (deterministic under a seeded Random)


def planted_cnf_text(rng: random.Random, max_vars=12, max_clauses=30, min_width=1, max_width=4):
    """A satisfiable CNF file: every clause contains a planted-true literal."""
    n = rng.randint(1, max_vars)
    planted = [rng.random() < 0.5 for _ in range(n)]
    m = rng.randint(1, max_clauses)
    lines = []
    for _ in range(m):
        w = rng.randint(min_width, min(max_width, n))
        variables = rng.sample(range(n), w)
        literals = [(v, rng.random() < 0.5) for v in variables]
        if not any(planted[v] != neg for v, neg in literals):
            j = rng.randrange(w)
            v = literals[j][0]
            literals[j] = (v, not planted[v])
        lines.append(" or ".join(("not " if neg else "") + f"y_{v}" for v, neg in literals))
    return n, "\n".join(lines) + "\n", planted


def planted_cnf_text_exact(rng: random.Random, n: int, m: int, widths=(2, 3, 4)) -> str:
    """A satisfiable CNF file with exactly n variables and m clauses."""
    planted = [rng.random() < 0.5 for _ in range(n)]
    lines = []
    for _ in range(m):
        w = min(rng.choice(widths), n)
        variables = rng.sample(range(n), w)
        literals = [(v, rng.random() < 0.5) for v in variables]
        if not any(planted[v] != neg for v, neg in literals):
            j = rng.randrange(w)
            v = literals[j][0]
            literals[j] = (v, not planted[v])
        lines.append(" or ".join(("not " if neg else "") + f"y_{v}" for v, neg in literals))
    return "\n".join(lines) + "\n"


def _ineq_line(coeffs: dict, rel: str, bound) -> str:
    parts = []
    for k, (v, c) in enumerate(sorted(coeffs.items())):
        mag = abs(c)
        body = f"y_{v}" if mag == 1 else f"{mag}*y_{v}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return f"{' '.join(parts)} {rel} {bound}"


def feasible_linear_text(rng: random.Random, max_vars=8, max_ineqs=15):
    """A feasible inequality file with integer coefficients in [-3, 3].

    Every inequality is satisfied at a planted integer point, so the system
    is feasible by construction.  A third of the lines are written in <=
    form to exercise sign normalization.
    """
    n = rng.randint(1, max_vars)
    x_star = [rng.randint(-3, 3) for _ in range(n)]
    m = rng.randint(1, max_ineqs)
    lines = []
    for _ in range(m):
        w = rng.randint(1, min(3, n))
        variables = rng.sample(range(n), w)
        coeffs = {v: rng.choice([-3, -2, -1, 1, 2, 3]) for v in variables}
        value = sum(c * x_star[v] for v, c in coeffs.items())
        bound = value - rng.randint(0, 3)
        if rng.random() < 0.33:
            flipped = {v: -c for v, c in coeffs.items()}
            lines.append(_ineq_line(flipped, "<=", -bound))
        else:
            lines.append(_ineq_line(coeffs, ">=", bound))
    return n, "\n".join(lines) + "\n", x_star


def random_dag_edges(rng: random.Random, n: int, extra=1.5):
    """Random DAG on n nodes: edges only from lower to higher of a shuffled rank."""
    rank = list(range(n))
    rng.shuffle(rank)
    edges = set()
    target = int(extra * n)
    for _ in range(target * 3):
        if len(edges) >= target:
            break
        a, b = rng.sample(range(n), 2) if n >= 2 else (0, 0)
        if n < 2:
            break
        if rank[a] < rank[b]:
            edges.add((a, b))
        else:
            edges.add((b, a))
    return sorted(edges)


def hierarchy_text(edges) -> str:
    return "\n".join(f"not y_{a} or y_{b}" for a, b in edges) + ("\n" if edges else "")


# ---------------------------------------------------------------------------
# fixtures


@pytest.fixture
def traffic_layer():
    return build_shield_layer_from_text(TRAFFIC_TEXT, 4)


@pytest.fixture
def hemoglobin_layer():
    return build_shield_layer_from_text(HEMOGLOBIN_TEXT, 4)

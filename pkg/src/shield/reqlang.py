"""Requirement-file language: lexer, parsers, normalization, rendering.

A requirement file constrains the outputs ``y_0 .. y_{n-1}`` of a predictor.
Each nonblank, non-comment line holds exactly one requirement, in one of two
dialects that may not be mixed within a file:

* a propositional clause, e.g. ``not y_0 or y_1 or y_2 or y_3``
* a linear inequality, e.g. ``y_0 - y_1 >= 0`` or ``2*y_1 + y_2 <= 3.5``

Grammar, closed minimally around those shapes:

* tokens: ``not``, ``or`` (lowercase, case-sensitive), variables ``y_<uint>``,
  unsigned decimal numerals (fraction and exponent parts optional), operators
  ``>= <= > < = + - *``; spaces and tabs may separate any tokens
* blank lines and lines whose first non-whitespace character is ``#`` are
  ignored
* clause: ``[not] y_i or [not] y_j or ...``
* inequality: a sum of terms, a relation, and a constant right-hand side;
  a term is ``y_k``, ``c y_k``, or ``c * y_k`` with an implicit ``+``-joined
  coefficient of 1 (``- y_k`` means -1); constant terms on the left fold into
  the bound
* relations ``<=``/``<`` are sign-flipped into ``>=``/``>`` canonical form and
  ``=`` expands into a pair of opposing ``>=`` rows during normalization
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field, replace

from .errors import (
    DegenerateConstraintError,
    DegenerateConstraintWarning,
    DuplicateRequirementWarning,
    MixedDialectError,
    RequirementSyntaxError,
    VariableOutOfRangeError,
)

CNF = "cnf"
LINEAR = "linear"
EMPTY = "empty"


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # NOT, OR, VAR, NUM, PLUS, MINUS, STAR, REL
    text: str
    column: int  # 1-based
    value: float = 0.0  # NUM value or VAR index


_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"y_(\d+)$")
_NUM_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def tokenize(line: str, lineno: int) -> list[Token]:
    """Split one requirement line into tokens, tracking 1-based columns."""
    tokens: list[Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isalpha() or ch == "_":
            m = _WORD_RE.match(line, i)
            word = m.group(0)
            var = _VAR_RE.match(word)
            if var:
                tokens.append(Token("VAR", word, col, float(int(var.group(1)))))
            elif word == "not":
                tokens.append(Token("NOT", word, col))
            elif word == "or":
                tokens.append(Token("OR", word, col))
            else:
                raise RequirementSyntaxError(
                    lineno, col, f"'not', 'or', or a variable y_<k> (got {word!r})"
                )
            i = m.end()
            continue
        if ch.isdigit() or ch == ".":
            m = _NUM_RE.match(line, i)
            if not m:
                raise RequirementSyntaxError(lineno, col, "a number")
            value = float(m.group(0))
            if not math.isfinite(value):  # overflowing literals like 1e999
                raise RequirementSyntaxError(lineno, col, "a finite number")
            tokens.append(Token("NUM", m.group(0), col, value))
            i = m.end()
            continue
        two = line[i : i + 2]
        if two in (">=", "<="):
            tokens.append(Token("REL", two, col))
            i += 2
            continue
        if ch in "><=":
            tokens.append(Token("REL", ch, col))
            i += 1
            continue
        if ch == "+":
            tokens.append(Token("PLUS", ch, col))
            i += 1
            continue
        if ch == "-":
            tokens.append(Token("MINUS", ch, col))
            i += 1
            continue
        if ch == "*":
            tokens.append(Token("STAR", ch, col))
            i += 1
            continue
        raise RequirementSyntaxError(lineno, col, f"a requirement token (got {ch!r})")
    return tokens


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, order=True)
class Literal:
    variable: int
    negated: bool = False


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]
    source_line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LinearInequality:
    """One parsed inequality: sum(coeff * y_var for terms) RELATION rhs.

    ``terms`` is sorted by variable index; coefficients of repeated variables
    are accumulated at parse time.  Constant terms on the left-hand side have
    already been folded into ``rhs``.
    """

    terms: tuple[tuple[int, float], ...]
    relation: str
    rhs: float
    source_line: int = field(default=0, compare=False)

    def canonical(self) -> tuple["LinearInequality", ...]:
        """Sign-normalized ``>=``/``>`` rows equivalent to this inequality.

        Zero coefficients are dropped; ``=`` yields two opposing rows.
        """
        pos = tuple((v, c) for v, c in self.terms if c != 0.0)
        neg = tuple((v, -c) for v, c in self.terms if c != 0.0)
        if self.relation == ">=" or self.relation == ">":
            return (replace(self, terms=pos),)
        if self.relation == "<=":
            return (replace(self, terms=neg, relation=">=", rhs=-self.rhs),)
        if self.relation == "<":
            return (replace(self, terms=neg, relation=">", rhs=-self.rhs),)
        # '=' becomes a >= and a <= pair
        return (
            replace(self, terms=pos, relation=">=", rhs=self.rhs),
            replace(self, terms=neg, relation=">=", rhs=-self.rhs),
        )


@dataclass(frozen=True)
class RequirementSet:
    """A parsed requirement file: all clauses or all inequalities."""

    dialect: str  # CNF, LINEAR, or EMPTY
    num_variables: int
    clauses: tuple[Clause, ...] = ()
    inequalities: tuple[LinearInequality, ...] = ()
    source: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.clauses) if self.dialect == CNF else len(self.inequalities)


# ---------------------------------------------------------------------------
# per-line parsers


def _parse_clause(tokens: list[Token], lineno: int, line_len: int) -> Clause:
    lits: list[Literal] = []
    i = 0

    def fail(pos: int, expected: str):
        col = tokens[pos].column if pos < len(tokens) else line_len + 1
        raise RequirementSyntaxError(lineno, col, expected)

    while True:
        negated = False
        if i < len(tokens) and tokens[i].kind == "NOT":
            negated = True
            i += 1
        if i >= len(tokens) or tokens[i].kind != "VAR":
            fail(i, "a variable y_<k>")
        lits.append(Literal(int(tokens[i].value), negated))
        i += 1
        if i == len(tokens):
            return Clause(tuple(lits), lineno)
        if tokens[i].kind != "OR":
            fail(i, "'or' or end of line")
        i += 1


def _parse_linear(tokens: list[Token], lineno: int, line_len: int) -> LinearInequality:
    coeffs: dict[int, float] = {}
    lhs_const = 0.0
    i = 0

    def fail(pos: int, expected: str):
        col = tokens[pos].column if pos < len(tokens) else line_len + 1
        raise RequirementSyntaxError(lineno, col, expected)

    def peek(pos: int) -> str:
        return tokens[pos].kind if pos < len(tokens) else "END"

    # left-hand side: sign-separated terms up to the relation
    while True:
        sign = 1.0
        if peek(i) == "PLUS":
            i += 1
        elif peek(i) == "MINUS":
            sign = -1.0
            i += 1
        kind = peek(i)
        if kind == "NUM":
            value = sign * tokens[i].value
            i += 1
            if peek(i) == "STAR":
                i += 1
                if peek(i) != "VAR":
                    fail(i, "a variable y_<k> after '*'")
            if peek(i) == "VAR":
                v = int(tokens[i].value)
                coeffs[v] = coeffs.get(v, 0.0) + value
                i += 1
            else:
                lhs_const += value
        elif kind == "VAR":
            v = int(tokens[i].value)
            coeffs[v] = coeffs.get(v, 0.0) + sign
            i += 1
        else:
            fail(i, "a term (number or variable)")
        kind = peek(i)
        if kind in ("PLUS", "MINUS"):
            continue
        if kind == "REL":
            break
        fail(i, "'+', '-', or a relation (>=, <=, >, <, =)")

    relation = tokens[i].text
    i += 1

    # right-hand side: one optionally signed constant
    sign = 1.0
    if peek(i) == "PLUS":
        i += 1
    elif peek(i) == "MINUS":
        sign = -1.0
        i += 1
    if peek(i) != "NUM":
        fail(i, "a constant right-hand side")
    rhs = sign * tokens[i].value
    i += 1
    if i != len(tokens):
        fail(i, "end of line after the right-hand side")

    terms = tuple(sorted(coeffs.items()))
    return LinearInequality(terms, relation, rhs - lhs_const, lineno)


_LINEAR_ONLY = frozenset(("NUM", "REL", "PLUS", "MINUS", "STAR"))


# ---------------------------------------------------------------------------
# file-level operations


def parse_requirements(text: str, num_variables: int | None = None) -> RequirementSet:
    """Parse a requirement file into a RequirementSet.

    The dialect is detected from the lines themselves; clause and inequality
    lines may not be mixed.  When ``num_variables`` is None it is inferred as
    one past the highest referenced variable index.

    Error precedence is independent of line order: any malformed line wins
    over a dialect mix, which wins over an out-of-range variable; within one
    class the lowest line number is reported.
    """
    if num_variables is not None and num_variables < 0:
        raise ValueError("num_variables must be >= 0")

    parsed: list[tuple[int, str, object]] = []  # (lineno, dialect, requirement)
    syntax_errors: list[tuple[int, RequirementSyntaxError]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = tokenize(raw, lineno)
        except RequirementSyntaxError as exc:
            syntax_errors.append((lineno, exc))
            continue
        kinds = {t.kind for t in tokens}
        if kinds & _LINEAR_ONLY:
            try:
                parsed.append((lineno, LINEAR, _parse_linear(tokens, lineno, len(raw))))
            except RequirementSyntaxError as exc:
                syntax_errors.append((lineno, exc))
        else:
            try:
                parsed.append((lineno, CNF, _parse_clause(tokens, lineno, len(raw))))
            except RequirementSyntaxError as exc:
                syntax_errors.append((lineno, exc))

    if syntax_errors:
        raise min(syntax_errors, key=lambda pair: pair[0])[1]

    if not parsed:
        return RequirementSet(EMPTY, num_variables or 0, source=text)

    first_dialect = parsed[0][1]
    for lineno, dialect, _ in parsed:
        if dialect != first_dialect:
            raise MixedDialectError(lineno)

    max_index = -1
    for lineno, _, req in parsed:
        if isinstance(req, Clause):
            indices = [lit.variable for lit in req.literals]
        else:
            indices = [v for v, _ in req.terms]
        for v in sorted(indices):
            if num_variables is not None and v >= num_variables:
                raise VariableOutOfRangeError(lineno, v, num_variables)
            max_index = max(max_index, v)

    n = num_variables if num_variables is not None else max_index + 1
    if first_dialect == CNF:
        return RequirementSet(CNF, n, clauses=tuple(r for _, _, r in parsed), source=text)
    return RequirementSet(LINEAR, n, inequalities=tuple(r for _, _, r in parsed), source=text)


def _normalize_clauses(clauses: tuple[Clause, ...]) -> tuple[Clause, ...]:
    out: list[Clause] = []
    seen: set[frozenset[Literal]] = set()
    for clause in clauses:
        lits: list[Literal] = []
        present: set[Literal] = set()
        tautology = False
        for lit in clause.literals:
            if Literal(lit.variable, not lit.negated) in present:
                tautology = True
                break
            if lit not in present:
                present.add(lit)
                lits.append(lit)
        if tautology:
            continue
        key = frozenset(lits)
        if key in seen:
            warnings.warn(
                f"line {clause.source_line}: duplicate clause dropped",
                DuplicateRequirementWarning,
                stacklevel=3,
            )
            continue
        seen.add(key)
        out.append(Clause(tuple(lits), clause.source_line))
    return tuple(out)


def _normalize_inequalities(
    ineqs: tuple[LinearInequality, ...]
) -> tuple[LinearInequality, ...]:
    out: list[LinearInequality] = []
    seen: set[tuple] = set()
    for ineq in ineqs:
        for row in ineq.canonical():
            if not row.terms:
                strict = row.relation == ">"
                holds = row.rhs < 0.0 if strict else row.rhs <= 0.0
                if not holds:
                    op = ">" if strict else ">="
                    raise DegenerateConstraintError(
                        row.source_line, f"0 {op} {row.rhs!r} is unsatisfiable"
                    )
                warnings.warn(
                    f"line {row.source_line}: trivially true constraint dropped",
                    DegenerateConstraintWarning,
                    stacklevel=3,
                )
                continue
            key = (row.terms, row.relation, row.rhs)
            if key in seen:
                warnings.warn(
                    f"line {row.source_line}: duplicate inequality dropped",
                    DuplicateRequirementWarning,
                    stacklevel=3,
                )
                continue
            seen.add(key)
            out.append(row)
    return tuple(out)


def normalize(rs: RequirementSet) -> RequirementSet:
    """Canonicalize a parsed RequirementSet ahead of compilation.

    CNF: duplicate literals collapse, tautological clauses and duplicate
    clauses drop.  Linear: every row becomes ``sum >= b`` (or ``>``), zero
    coefficients drop, ``=`` expands to two rows, exact duplicates drop,
    variable-free rows either drop (trivially true, with a warning) or raise
    DegenerateConstraintError (unsatisfiable).  Idempotent.
    """
    if rs.dialect == CNF:
        return replace(rs, clauses=_normalize_clauses(rs.clauses))
    if rs.dialect == LINEAR:
        return replace(rs, inequalities=_normalize_inequalities(rs.inequalities))
    return rs


# ---------------------------------------------------------------------------
# rendering


def _render_float(x: float) -> str:
    return repr(float(x))


def render_clause(clause: Clause) -> str:
    return " or ".join(
        ("not " if lit.negated else "") + f"y_{lit.variable}" for lit in clause.literals
    )


def render_inequality(ineq: LinearInequality) -> str:
    parts: list[str] = []
    for k, (v, c) in enumerate(ineq.terms):
        mag = abs(c)
        body = f"y_{v}" if mag == 1.0 else f"{_render_float(mag)}*y_{v}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    lhs = " ".join(parts) if parts else "0"
    return f"{lhs} {ineq.relation} {_render_float(ineq.rhs)}"


def render_requirements(rs: RequirementSet) -> str:
    """Render a RequirementSet back to file text (one requirement per line).

    Reparsing the rendering of a normalized set reproduces it structurally.
    """
    if rs.dialect == CNF:
        lines = [render_clause(c) for c in rs.clauses]
    elif rs.dialect == LINEAR:
        lines = [render_inequality(q) for q in rs.inequalities]
    else:
        lines = []
    return "\n".join(lines) + ("\n" if lines else "")

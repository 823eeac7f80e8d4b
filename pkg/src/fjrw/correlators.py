"""Genus-zero correlators of the state space.

Three-point values come from the selection rules, the pairing, concavity and
the degree of the Witten map for point sectors.  Correlators that touch a broad
sector and are not fixed by the pairing stay as named unknowns; four-point
classes of codimension zero then give polynomial relations among them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from . import linalg
from .milnor import MonomialOrder, groebner, reduce_polynomial
from .poly import Polynomial
from .state_space import StateSpace


class UnsupportedConfiguration(ValueError):
    """The Witten map is not a monomial map between rank-one section spaces."""


class InconsistentRelations(ValueError):
    pass


@dataclass(frozen=True)
class LineBundleData:
    l: tuple[Fraction, ...]

    @property
    def integral(self) -> bool:
        return all(x.denominator == 1 for x in self.l)

    @property
    def h0(self) -> tuple[int, ...]:
        return tuple(int(x) + 1 if x >= 0 else 0 for x in self.l)

    @property
    def h1(self) -> tuple[int, ...]:
        return tuple(-int(x) - 1 if x < 0 else 0 for x in self.l)

    @property
    def concave(self) -> bool:
        return all(x < 0 for x in self.l)

    @property
    def index(self) -> int:
        return sum(a - b for a, b in zip(self.h0, self.h1))


def line_bundle_data(space: StateSpace, insertions: Sequence[int], genus: int = 0) -> LineBundleData:
    """l_j = q_j (2g - 2 + k) - sum of the phases of the insertions."""
    k = len(insertions)
    q = space.weights.weights
    ls = []
    for j, qj in enumerate(q):
        theta = sum((space.elements[i].element[j] for i in insertions), Fraction(0))
        ls.append(qj * (2 * genus - 2 + k) - theta)
    return LineBundleData(tuple(ls))


def codimension(space: StateSpace, insertions: Sequence[int], genus: int = 0) -> Fraction:
    """Complex degree of the class: c_hat (g - 1) + half the total W-degree."""
    total = sum((space.degree(i) for i in insertions), Fraction(0))
    return space.central_charge * (genus - 1) + total / 2


def selection_rules(space: StateSpace, insertions: Sequence[int]) -> tuple[bool, LineBundleData]:
    """Whether a genus-zero class can be nonzero in degree zero, plus its line bundle data."""
    data = line_bundle_data(space, insertions)
    return codimension(space, insertions) == 0 and data.integral, data


def witten_map_degree(W: Polynomial, data: LineBundleData) -> int:
    """Degree of the Witten map when every section space has rank at most one.

    Variables with h0 = 1 are the inputs; the outputs are the partial
    derivatives along variables with h1 = 1, with the remaining variables set
    to zero.  Each output must be a single monomial in the inputs.  The map is
    the complex conjugate of a monomial map, so its degree is (-1)^n |det A|.
    """
    h0, h1 = data.h0, data.h1
    if not data.integral:
        raise UnsupportedConfiguration("line bundle degrees are not integral")
    if any(x > 1 for x in h0) or any(x > 1 for x in h1):
        raise UnsupportedConfiguration(f"section spaces of rank above one (h0={h0}, h1={h1})")
    inputs = [j for j, x in enumerate(h0) if x == 1]
    outputs = [j for j, x in enumerate(h1) if x == 1]
    if len(inputs) != len(outputs):
        raise UnsupportedConfiguration("index is not zero")
    rows = []
    for j in outputs:
        component = W.diff(j).restrict(inputs)
        if len(component) != 1:
            raise UnsupportedConfiguration(f"Witten map component {component} is not a monomial")
        rows.append([Fraction(e) for e in component.monomials()[0]])
    det = linalg.determinant(rows) if rows else Fraction(1)
    if det == 0:
        raise UnsupportedConfiguration("monomial Witten map has zero determinant")
    return (-1) ** len(inputs) * abs(int(det))


@dataclass
class Correlator:
    insertions: tuple[int, int, int]
    value: Fraction | None
    axiom: str
    name: str | None = None
    note: str = ""

    @property
    def known(self) -> bool:
        return self.value is not None


@dataclass
class CorrelatorTable:
    space: StateSpace
    entries: dict[tuple[int, int, int], Correlator]
    unknowns: tuple[str, ...]

    def get(self, i: int, j: int, k: int) -> Correlator | None:
        return self.entries.get(tuple(sorted((i, j, k))))

    def value(self, i: int, j: int, k: int) -> Fraction | str:
        """Known value, the unknown's name, or zero for classes the selection rules kill."""
        c = self.get(i, j, k)
        if c is None:
            return Fraction(0)
        return c.value if c.known else c.name

    def as_polynomial(self, i: int, j: int, k: int) -> Polynomial:
        v = self.value(i, j, k)
        if isinstance(v, str):
            return Polynomial.variable(self.unknowns, self.unknowns.index(v))
        return Polynomial.constant(self.unknowns, v)

    def by_axiom(self, axiom: str) -> list[Correlator]:
        return [c for c in self.entries.values() if c.axiom == axiom]

    def unknown_entries(self) -> list[Correlator]:
        return [c for c in self.entries.values() if not c.known]

    def nonzero_with(self, i: int, j: int) -> list[int]:
        """All k with a possibly nonzero correlator <i, j, k>."""
        out = []
        for k in range(self.space.dimension):
            c = self.get(i, j, k)
            if c is not None and (not c.known or c.value != 0):
                out.append(k)
        return out


def pairing_correlators(space: StateSpace) -> dict[tuple[int, int, int], Correlator]:
    one = space.identity
    out = {}
    for a in range(space.dimension):
        for b in range(a, space.dimension):
            ok, _ = selection_rules(space, (one, a, b))
            if ok:
                key = tuple(sorted((one, a, b)))
                out[key] = Correlator(key, space.eta[a][b], "pairing")
    return out


def concavity_correlators(space: StateSpace) -> dict[tuple[int, int, int], Correlator]:
    """Value 1 for admissible triples of point sectors with every l_j negative."""
    out = {}
    for key in _admissible_triples(space):
        if space.identity in key or not all(space.elements[i].is_narrow for i in key):
            continue
        _, data = selection_rules(space, key)
        if data.concave:
            out[key] = Correlator(key, Fraction(1), "concavity")
    return out


def index_zero_correlators(space: StateSpace) -> dict[tuple[int, int, int], Correlator]:
    """Witten-map degrees for admissible non-concave triples of point sectors.

    Configurations outside the supported class come back as unknowns.
    """
    out = {}
    for key in _admissible_triples(space):
        if space.identity in key or not all(space.elements[i].is_narrow for i in key):
            continue
        _, data = selection_rules(space, key)
        if data.concave:
            continue
        try:
            out[key] = Correlator(key, Fraction(witten_map_degree(space.potential, data)), "index_zero")
        except UnsupportedConfiguration as exc:
            out[key] = Correlator(key, None, "none", note=str(exc))
    return out


def _admissible_triples(space: StateSpace):
    target = 2 * space.central_charge
    degs = [space.degree(i) for i in range(space.dimension)]
    for key in combinations_with_replacement(range(space.dimension), 3):
        if sum(degs[i] for i in key) != target:
            continue
        if line_bundle_data(space, key).integral:
            yield key


def compute_correlators(space: StateSpace, names: dict[tuple[int, int, int], str] | None = None) -> CorrelatorTable:
    """Apply every axiom; whatever remains becomes a named unknown.

    ``names`` pins names for particular unknown triples (sorted index tuples).
    Other unknowns are called u1, u2, ... in enumeration order.
    """
    names = {tuple(sorted(k)): v for k, v in (names or {}).items()}
    entries: dict[tuple[int, int, int], Correlator] = {}
    entries.update(pairing_correlators(space))
    for key, c in concavity_correlators(space).items():
        entries.setdefault(key, c)
    for key, c in index_zero_correlators(space).items():
        entries.setdefault(key, c)
    for key in _admissible_triples(space):
        if key not in entries:
            entries[key] = Correlator(key, None, "none")
    used = set(names.values())
    counter = 0
    for key in sorted(entries):
        c = entries[key]
        if c.known:
            continue
        if key in names:
            c.name = names[key]
        else:
            counter += 1
            while f"u{counter}" in used:
                counter += 1
            c.name = f"u{counter}"
    ordered = {k: entries[k] for k in sorted(entries)}
    unknowns = tuple(c.name for c in ordered.values() if not c.known)
    return CorrelatorTable(space, ordered, unknowns)


# ------------------------------------------------------------ composition


@dataclass
class Relation:
    """``polynomial == 0`` among the unknowns, from one four-point class."""

    insertions: tuple[int, int, int, int]
    polynomial: Polynomial
    source: str  # "value" when the class itself was evaluated, "split" otherwise
    lhs: Fraction | None = None


SPLITS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def split_sum(table: CorrelatorTable, insertions: Sequence[int], split) -> Polynomial:
    """sum over beta, delta of <a, b, beta> eta^{beta delta} <delta, c, d>."""
    space = table.space
    (p, q), (r, s) = split
    a, b, c, d = (insertions[i] for i in (p, q, r, s))
    total = Polynomial.constant(table.unknowns, 0)
    for beta in table.nonzero_with(a, b):
        left = table.as_polynomial(a, b, beta)
        for delta, w in enumerate(space.eta_inv[beta]):
            if w == 0:
                continue
            right = table.as_polynomial(delta, c, d)
            if right.is_zero():
                continue
            total = total + left * right * w
    return total


def four_point_value(table: CorrelatorTable, insertions: Sequence[int]) -> Fraction | None:
    space = table.space
    if not all(space.elements[i].is_narrow for i in insertions):
        return None
    data = line_bundle_data(space, insertions)
    if data.concave:
        return Fraction(1)
    try:
        return Fraction(witten_map_degree(space.potential, data))
    except UnsupportedConfiguration:
        return None


def composition_relations(table: CorrelatorTable) -> list[Relation]:
    """Relations from every codimension-zero four-point class without the identity.

    When the class can be evaluated each splitting must equal its value;
    otherwise the three splittings must agree with each other.
    """
    space = table.space
    candidates = [i for i in range(space.dimension) if i != space.identity]
    degs = [space.degree(i) for i in range(space.dimension)]
    target = 2 * space.central_charge
    out = []
    for quad in combinations_with_replacement(candidates, 4):
        if sum(degs[i] for i in quad) != target:
            continue
        if not line_bundle_data(space, quad).integral:
            continue
        sums = [split_sum(table, quad, sp) for sp in SPLITS]
        value = four_point_value(table, quad)
        if value is not None:
            polys = [s - value for s in sums]
            source = "value"
        else:
            polys = [sums[0] - sums[1], sums[0] - sums[2]]
            source = "split"
        seen = set()
        for poly in polys:
            if poly.is_zero() or poly in seen:
                continue
            seen.add(poly)
            out.append(Relation(quad, poly, source, value))
    return out


# -------------------------------------------------------------- solving


@dataclass
class Branch:
    """One consistent way of assigning the unknowns.

    ``values`` maps each unknown to a polynomial in the free unknowns.
    ``residual`` is a Groebner basis of the leftover relations among them.
    ``signs`` records the square of every unknown fixed by a sign choice.
    """

    unknowns: tuple[str, ...]
    values: dict[str, Polynomial]
    free: tuple[str, ...]
    residual: list[Polynomial] = field(default_factory=list)
    signs: dict[str, Fraction] = field(default_factory=dict)

    def reduce(self, p: Polynomial) -> Polynomial:
        p = p.compose([self.values[u] for u in self.unknowns])
        if self.residual:
            p = reduce_polynomial(p, self.residual, MonomialOrder.graded(len(self.unknowns)))
        return p

    def constant_values(self) -> dict[str, Fraction]:
        return {u: v.constant_value() for u, v in self.values.items() if v.is_constant()}

    def describe(self) -> str:
        parts = [f"{u}={self.values[u]}" for u in self.unknowns if u not in self.free]
        if self.free:
            parts.append(", ".join(self.free) + " free")
        return ", ".join(parts) or "(no unknowns)"


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def _substitute(p: Polynomial, u: int, value: Polynomial) -> Polynomial:
    images = [Polynomial.variable(p.variables, i) for i in range(len(p.variables))]
    images[u] = value
    return p.compose(images)


def _solve(eqs: list[Polynomial], values: dict[int, Polynomial], signs: dict[int, Fraction], nvars: int):
    while True:
        eqs = sorted({e for e in eqs if not e.is_zero()}, key=lambda e: (len(e.support()), e.total_degree(), len(e), str(e)))
        if any(e.is_constant() for e in eqs):
            return []
        step = _next_step(eqs)
        if step is None:
            return [(eqs, values, signs)]
        u, choices, square = step
        if len(choices) > 1:
            out = []
            for choice in choices:
                sub_values = {k: _substitute(v, u, choice) for k, v in values.items()}
                sub_values[u] = choice
                out.extend(
                    _solve([_substitute(e, u, choice) for e in eqs], sub_values, {**signs, u: square}, nvars)
                )
            return out
        choice = choices[0]
        values = {k: _substitute(v, u, choice) for k, v in values.items()}
        values[u] = choice
        eqs = [_substitute(e, u, choice) for e in eqs]


def _next_step(eqs: list[Polynomial]):
    """Pick the next unknown to eliminate: (index, candidate values, square or None)."""
    for e in eqs:
        sup = e.support()
        if len(sup) != 1:
            continue
        u = sup[0]
        deg = e.degree_in(u)
        nv = len(e.variables)
        coeff = [e.coefficient(tuple(k if i == u else 0 for i in range(nv))) for k in range(deg + 1)]
        const = lambda c: Polynomial.constant(e.variables, c)  # noqa: E731
        if deg == 1:
            return u, [const(-coeff[0] / coeff[1])], None
        if deg == 2 and coeff[1] == 0:
            square = -coeff[0] / coeff[2]
            if square == 0:
                return u, [const(0)], None
            root = _rational_sqrt(square)
            if root is not None:
                return u, [const(root), const(-root)], square
        if all(c == 0 for c in coeff[:-1]):
            return u, [const(0)], None
    for e in eqs:
        for u in e.support():
            deg = e.degree_in(u)
            if deg != 1:
                continue
            nv = len(e.variables)
            lin = {m: c for m, c in e.items() if m[u] == 1}
            if len(lin) != 1:
                continue
            (m, c), = lin.items()
            if any(m):
                if sum(m) != 1:
                    continue
            rest = Polynomial(e.variables, {mm: cc for mm, cc in e.items() if mm[u] == 0})
            return u, [rest * (-1 / c)], None
    return None


def resolve_unknowns(relations: Sequence[Relation] | Sequence[Polynomial], unknowns: Sequence[str]) -> list[Branch]:
    """Solve the relations as far as single-unknown equations and linear elimination allow.

    Pure quadratics with a rational root branch into both signs, positive
    first.  Raises InconsistentRelations when no branch survives.
    """
    unknowns = tuple(unknowns)
    polys = [r.polynomial if isinstance(r, Relation) else r for r in relations]
    n = len(unknowns)
    if not unknowns:
        if any(not p.is_zero() for p in polys):
            raise InconsistentRelations("relations among known correlators fail")
        return [Branch(unknowns, {}, ())]
    results = _solve(list(polys), {}, {}, n)
    if not results:
        raise InconsistentRelations("the composition relations have no solution")
    branches = []
    for eqs, values, signs in results:
        free = tuple(unknowns[i] for i in range(n) if i not in values)
        full = {
            unknowns[i]: values.get(i, Polynomial.variable(unknowns, i)) for i in range(n)
        }
        residual = groebner(eqs, MonomialOrder.graded(n)) if eqs else []
        if any(g.is_constant() for g in residual):
            continue
        branches.append(Branch(unknowns, full, free, residual, {unknowns[i]: s for i, s in signs.items()}))
    if not branches:
        raise InconsistentRelations("the composition relations have no solution")
    return branches

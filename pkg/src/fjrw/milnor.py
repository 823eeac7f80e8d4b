"""Weighted Groebner bases and the Milnor ring of a quasi-homogeneous potential."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .poly import DegenerateInputError, Monomial, Polynomial, WeightSystem, format_monomial, jacobian


class InfiniteQuotientError(DegenerateInputError):
    """The Jacobian ideal is not zero dimensional (non-isolated singularity)."""


class MilnorDefect(DegenerateInputError):
    """A structural check on the Milnor ring failed."""


class GroebnerSizeError(RuntimeError):
    pass


class MonomialOrder:
    """Weighted degree first, then lexicographic with the last variable largest.

    Weights are scaled to integers so keys compare quickly.  With all weights
    equal this is graded lex.
    """

    def __init__(self, weights: Sequence[Fraction]):
        self.weights = tuple(Fraction(w) for w in weights)
        if any(w <= 0 for w in self.weights):
            raise ValueError("order weights must be positive")
        den = 1
        for w in self.weights:
            den = den * w.denominator // _gcd(den, w.denominator)
        self._scale = den
        self._iw = tuple(int(w * den) for w in self.weights)

    @classmethod
    def graded(cls, nvars: int) -> "MonomialOrder":
        return cls([Fraction(1)] * nvars)

    def key(self, mono: Monomial) -> tuple[int, Monomial]:
        return (sum(w * e for w, e in zip(self._iw, mono)), mono[::-1])

    def degree(self, mono: Monomial) -> Fraction:
        return Fraction(sum(w * e for w, e in zip(self._iw, mono)), self._scale)


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


# Internal representation for the Buchberger loop: dict monomial -> Fraction.
_Poly = dict


def _lead(p: _Poly, order: MonomialOrder) -> Monomial:
    return max(p, key=order.key)


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _reduce(p: _Poly, basis: list[tuple[Monomial, _Poly]], order: MonomialOrder) -> _Poly:
    """Full reduction of p by a list of (leading monomial, monic polynomial)."""
    p = dict(p)
    rem: _Poly = {}
    while p:
        m = _lead(p, order)
        c = p[m]
        for lm, g in basis:
            if _divides(lm, m):
                shift = tuple(x - y for x, y in zip(m, lm))
                for gm, gc in g.items():
                    t = tuple(x + y for x, y in zip(gm, shift))
                    v = p.get(t, Fraction(0)) - c * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _monic(p: _Poly, order: MonomialOrder) -> tuple[Monomial, _Poly]:
    lm = _lead(p, order)
    inv = 1 / p[lm]
    return lm, {m: c * inv for m, c in p.items()}


def groebner(generators: Sequence[Polynomial], order: MonomialOrder, max_size: int = 400) -> list[Polynomial]:
    """Reduced Groebner basis, monic and sorted by leading monomial."""
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return []
    variables = gens[0].variables
    basis: list[tuple[Monomial, _Poly]] = []
    for g in gens:
        r = _reduce(dict(g.items()), basis, order)
        if r:
            basis.append(_monic(r, order))
    pairs = {(i, j) for j in range(len(basis)) for i in range(j)}
    while pairs:
        # normal selection strategy with a deterministic tie-break
        i, j = min(pairs, key=lambda ij: (order.key(_lcm_mono(basis[ij[0]][0], basis[ij[1]][0])), ij))
        pairs.discard((i, j))
        li, gi = basis[i]
        lj, gj = basis[j]
        lcm = _lcm_mono(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials
        if any(
            k not in (i, j)
            and _divides(basis[k][0], lcm)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue  # chain criterion
        si = tuple(x - y for x, y in zip(lcm, li))
        sj = tuple(x - y for x, y in zip(lcm, lj))
        s: _Poly = {}
        for m, c in gi.items():
            t = tuple(x + y for x, y in zip(m, si))
            s[t] = s.get(t, Fraction(0)) + c
        for m, c in gj.items():
            t = tuple(x + y for x, y in zip(m, sj))
            s[t] = s.get(t, Fraction(0)) - c
        s = {m: c for m, c in s.items() if c}
        r = _reduce(s, basis, order)
        if r:
            basis.append(_monic(r, order))
            if len(basis) > max_size:
                raise GroebnerSizeError(f"Groebner basis exceeded {max_size} elements")
            k = len(basis) - 1
            pairs.update((a, k) for a in range(k))
    # minimalize then interreduce
    minimal = [
        (lm, g)
        for idx, (lm, g) in enumerate(basis)
        if not any(
            _divides(other, lm) and (other != lm or jdx < idx) for jdx, (other, _) in enumerate(basis) if jdx != idx
        )
    ]
    reduced = []
    for idx, (lm, g) in enumerate(minimal):
        others = [b for k, b in enumerate(minimal) if k != idx]
        tail = {m: c for m, c in g.items() if m != lm}
        r = _reduce(tail, others, order)
        r[lm] = Fraction(1)
        reduced.append((lm, r))
    reduced.sort(key=lambda t: order.key(t[0]))
    return [Polynomial(variables, g) for _, g in reduced]


def leading_monomial(p: Polynomial, order: MonomialOrder) -> Monomial:
    return max(p.monomials(), key=order.key)


def reduce_polynomial(f: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder) -> Polynomial:
    """Normal form of f modulo a Groebner basis."""
    prepared = [_monic(dict(g.items()), order) for g in basis]
    return Polynomial(f.variables, _reduce(dict(f.items()), prepared, order))


def standard_monomials(leads: Sequence[Monomial], nvars: int) -> list[Monomial]:
    """Monomials outside the lead ideal; raises when there are infinitely many."""
    for i in range(nvars):
        if not any(lm[i] > 0 and sum(lm) == lm[i] for lm in leads):
            witness = format_monomial([f"x{j}" for j in range(nvars)], tuple(int(j == i) for j in range(nvars)))
            raise InfiniteQuotientError(
                f"quotient is infinite dimensional: every power of variable {i} ({witness}^k) is standard"
            )
    seen = {(0,) * nvars}
    frontier = [(0,) * nvars]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(nvars):
                t = m[:i] + (m[i] + 1,) + m[i + 1 :]
                if t not in seen and not any(_divides(lm, t) for lm in leads):
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return list(seen)


def hessian(W: Polynomial) -> Polynomial:
    """Determinant of the matrix of second partial derivatives."""
    n = len(W.variables)
    if n == 0:
        return Polynomial.constant(W.variables, 1)
    second = [[W.diff(i).diff(j) for j in range(n)] for i in range(n)]
    total = Polynomial.constant(W.variables, 0)
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = Polynomial.constant(W.variables, -1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term = term * second[i][j]
            if term.is_zero():
                break
        total = total + term
    return total


def milnor_number(weights: Sequence[Fraction]) -> Fraction:
    mu = Fraction(1)
    for q in weights:
        mu *= 1 / Fraction(q) - 1
    return mu


@dataclass
class QuotientRing:
    """Milnor ring ``C[x]/Jac(W)`` with a fixed monomial basis.

    The basis is sorted by the monomial order.  The top degree part is one
    dimensional; ``top`` is the index of its basis monomial.
    """

    potential: Polynomial
    weights: tuple[Fraction, ...]
    order: MonomialOrder
    gb: list[Polynomial]
    basis: list[Monomial]
    hessian_coords: list[Fraction] = field(repr=False)
    _index: dict = field(repr=False, default_factory=dict)
    _prepared: list = field(repr=False, default_factory=list)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.potential.variables

    @property
    def mu(self) -> int:
        return len(self.basis)

    def index_of(self, mono: Monomial) -> int:
        return self._index[tuple(mono)]

    def degree(self, mono: Monomial) -> Fraction:
        return self.order.degree(mono)

    @property
    def top(self) -> int:
        return self.mu - 1

    @property
    def top_degree(self) -> Fraction:
        return self.degree(self.basis[self.top])

    def reduce(self, f: Polynomial) -> Polynomial:
        return Polynomial(f.variables, _reduce(dict(f.items()), self._prepared, self.order))

    def normal_form(self, f: Polynomial) -> list[Fraction]:
        """Coordinates of f in the monomial basis."""
        r = _reduce(dict(f.items()), self._prepared, self.order)
        coords = [Fraction(0)] * self.mu
        for m, c in r.items():
            coords[self._index[m]] = c
        return coords

    def element(self, coords: Sequence[Fraction]) -> Polynomial:
        return Polynomial(self.variables, {m: c for m, c in zip(self.basis, coords)})

    def monomial_poly(self, i: int) -> Polynomial:
        return Polynomial.monomial(self.variables, self.basis[i])

    def multiply_basis(self, i: int, j: int) -> list[Fraction]:
        m = tuple(a + b for a, b in zip(self.basis[i], self.basis[j]))
        return self.normal_form(Polynomial.monomial(self.variables, m))

    def pairing(self, f: Polynomial, g: Polynomial) -> Fraction:
        """Residue pairing normalised so that the pairing of 1 with hess(W) is mu."""
        coords = self.normal_form(f * g)
        return self.mu * coords[self.top] / self.hessian_coords[self.top]

    def pairing_matrix(self) -> list[list[Fraction]]:
        polys = [self.monomial_poly(i) for i in range(self.mu)]
        return [[self.pairing(a, b) for b in polys] for a in polys]


def quotient_ring(W: Polynomial, weights: Sequence[Fraction], check_mu: bool = True) -> QuotientRing:
    """Milnor ring of W; ``weights`` fix the grading and the monomial order."""
    weights = tuple(Fraction(q) for q in weights)
    nvars = len(W.variables)
    order = MonomialOrder(weights) if nvars else MonomialOrder([])
    gens = [g for g in jacobian(W) if not g.is_zero()]
    gb = groebner(gens, order) if gens else []
    leads = [leading_monomial(g, order) for g in gb]
    basis = standard_monomials(leads, nvars)
    basis.sort(key=lambda m: (order.degree(m), tuple(-e for e in m)))
    prepared = [_monic(dict(g.items()), order) for g in gb]
    ring = QuotientRing(W, weights, order, gb, basis, [], {m: i for i, m in enumerate(basis)}, prepared)
    if check_mu and all(W.degree_in(i) > 0 for i in range(nvars)):
        expected = milnor_number(weights)
        if expected != ring.mu:
            raise MilnorDefect(f"Milnor number {ring.mu} disagrees with weight formula {expected}")
    top_deg = ring.degree(basis[-1])
    if sum(1 for m in basis if ring.degree(m) == top_deg) != 1:
        raise MilnorDefect("top graded piece of the Milnor ring is not one dimensional")
    hess = ring.normal_form(hessian(W))
    if hess[ring.top] == 0:
        raise MilnorDefect("Hessian vanishes in the Milnor ring")
    ring.hessian_coords = hess
    return ring


def milnor_ring(W: Polynomial, weights: WeightSystem) -> QuotientRing:
    ring = quotient_ring(W, weights.weights)
    if ring.top_degree != weights.central_charge:
        raise MilnorDefect(f"top degree {ring.top_degree} differs from central charge {weights.central_charge}")
    return ring


def residue_pairing(f: Polynomial, g: Polynomial, ring: QuotientRing) -> Fraction:
    return ring.pairing(f, g)

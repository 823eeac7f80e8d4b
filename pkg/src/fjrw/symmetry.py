"""Diagonal symmetry groups of a potential, written additively as phase vectors mod 1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .poly import DegenerateInputError, Polynomial, WeightSystem, exponent_matrix


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, order=True)
class PhaseVector:
    """Diagonal symmetry ``x_j -> exp(2 pi i theta_j) x_j`` with theta_j in [0, 1)."""

    phases: tuple[Fraction, ...]

    def __init__(self, phases: Iterable):
        object.__setattr__(self, "phases", tuple(Fraction(p) % 1 for p in phases))

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(a + b for a, b in zip(self.phases, other.phases))

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(-a for a in self.phases)

    def __sub__(self, other: "PhaseVector") -> "PhaseVector":
        return self + (-other)

    def __mul__(self, k: int) -> "PhaseVector":
        return PhaseVector(a * k for a in self.phases)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.phases)

    def __getitem__(self, i: int) -> Fraction:
        return self.phases[i]

    @classmethod
    def identity(cls, n: int) -> "PhaseVector":
        return cls([0] * n)

    def is_identity(self) -> bool:
        return not any(self.phases)

    @property
    def order(self) -> int:
        return reduce(_lcm, (p.denominator for p in self.phases), 1)

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.phases) + ")"

    def preserves(self, W: Polynomial) -> bool:
        return all(sum((e * p for e, p in zip(m, self.phases)), Fraction(0)).denominator == 1 for m in W.monomials())


@dataclass(frozen=True)
class FixedLocus:
    indices: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.indices)


def fixed_locus(h: PhaseVector) -> FixedLocus:
    return FixedLocus(tuple(i for i, p in enumerate(h.phases) if p == 0))


class DiagonalGroup:
    """Finite abelian group of phase vectors, given by generators and fully enumerated."""

    def __init__(self, generators: Sequence[PhaseVector], nvars: int):
        self.nvars = nvars
        self.generators = tuple(g for g in generators if not g.is_identity())
        elements = {PhaseVector.identity(nvars)}
        frontier = list(elements)
        while frontier:
            nxt = []
            for h in frontier:
                for g in self.generators:
                    t = h + g
                    if t not in elements:
                        elements.add(t)
                        nxt.append(t)
            frontier = nxt
        self.elements: tuple[PhaseVector, ...] = tuple(sorted(elements))
        self._members = frozenset(elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, h: PhaseVector) -> bool:
        return h in self._members

    @property
    def exponent(self) -> int:
        return reduce(_lcm, (h.order for h in self.elements), 1)

    def is_cyclic(self) -> bool:
        return self.exponent == self.order

    def subgroup(self, generators: Sequence[PhaseVector]) -> "DiagonalGroup":
        for g in generators:
            if g not in self:
                raise ValueError(f"{g} is not an element of the group")
        return DiagonalGroup(generators, self.nvars)

    def powers(self, g: PhaseVector) -> list[PhaseVector]:
        """g^0, g^1, ... up to the order of g."""
        return [g * k for k in range(g.order)]

    def __repr__(self) -> str:
        return f"DiagonalGroup(order={self.order}, generators={[str(g) for g in self.generators]})"


def smith_normal_form(B: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (D, U, V) with U B V = D diagonal and U, V unimodular."""
    D, U, V = smith_normal_decomp(Matrix(B))
    return D.tolist(), U.tolist(), V.tolist()


def maximal_symmetry_group(W: Polynomial) -> DiagonalGroup:
    """All phase vectors theta with B_W theta integral."""
    B = exponent_matrix(W).as_lists()
    n = len(W.variables)
    D, _, V = smith_normal_form(B)
    diag = [D[i][i] if i < len(D) else 0 for i in range(n)]
    if any(d == 0 for d in diag):
        raise DegenerateInputError("diagonal symmetry group is infinite")
    gens = []
    for i, d in enumerate(diag):
        d = abs(d)
        if d > 1:
            gens.append(PhaseVector(Fraction(V[r][i], d) for r in range(n)))
    G = DiagonalGroup(gens, n)
    assert G.order == reduce(lambda a, b: a * abs(b), diag, 1)
    return G


def brute_force_symmetry_group(W: Polynomial, bound: int) -> DiagonalGroup:
    """Enumerate phase vectors with denominators dividing ``bound`` (test oracle)."""
    n = len(W.variables)
    found = [
        PhaseVector(Fraction(k, bound) for k in ks)
        for ks in product(range(bound), repeat=n)
        if PhaseVector(Fraction(k, bound) for k in ks).preserves(W)
    ]
    return DiagonalGroup(found, n)


def grading_element(weights: WeightSystem) -> PhaseVector:
    return PhaseVector(weights.weights)


def find_cyclic_generator(
    G: DiagonalGroup, J: PhaseVector, preferred: PhaseVector | None = None
) -> PhaseVector | None:
    """A generator of a cyclic group: J if possible, else ``preferred``, else the least one."""
    if not G.is_cyclic():
        return None
    if J in G and J.order == G.order:
        return J
    if preferred is not None:
        if preferred not in G or preferred.order != G.order:
            raise ValueError(f"{preferred} does not generate the group")
        return preferred
    return min(h for h in G.elements if h.order == G.order)


def parse_phases(text: str) -> PhaseVector:
    """Parse ``"(1/3, 2/21)"`` or ``"1/3,2/21"``."""
    body = text.strip().strip("()")
    return PhaseVector(Fraction(p.strip()) for p in body.split(","))

"""The graded state space of a potential with a diagonal symmetry group.

Each group element h contributes the G-invariant part of the Milnor ring of W
restricted to the fixed locus of h, times the volume form of that locus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .milnor import QuotientRing, quotient_ring
from .poly import DegenerateInputError, Monomial, Polynomial, WeightSystem, format_monomial, solve_weights
from .symmetry import DiagonalGroup, FixedLocus, PhaseVector, fixed_locus


class StateSpaceError(DegenerateInputError):
    pass


@dataclass
class Sector:
    position: int
    label: str
    element: PhaseVector
    fixed: FixedLocus
    potential: Polynomial
    ring: QuotientRing
    degree: Fraction
    invariants: list[int] = field(default_factory=list)

    @property
    def is_narrow(self) -> bool:
        return self.fixed.dimension == 0


@dataclass(frozen=True)
class StateElement:
    sector: int
    element: PhaseVector
    fixed: tuple[int, ...]
    monomial: Monomial
    degree: Fraction
    label: str

    @property
    def is_narrow(self) -> bool:
        return not self.fixed


def sector_label(sector_label_text: str, variables: Sequence[str], mono: Monomial) -> str:
    return format_monomial(variables, mono, sep="") + sector_label_text


def w_degree(h: PhaseVector, weights: Sequence[Fraction]) -> Fraction:
    """N_h + 2 * sum(theta_j - q_j)."""
    n_fixed = sum(1 for p in h.phases if p == 0)
    return n_fixed + 2 * sum((p - q for p, q in zip(h.phases, weights)), Fraction(0))


def is_invariant(mono: Monomial, fixed: Sequence[int], group: DiagonalGroup) -> bool:
    """Whether m * (wedge of dx_j over the fixed variables) is G-invariant."""
    for g in group.generators:
        phase = sum(((e + 1) * g[j] for e, j in zip(mono, fixed)), Fraction(0))
        if phase.denominator != 1:
            return False
    return True


def sector_invariants(ring: QuotientRing, fixed: Sequence[int], group: DiagonalGroup) -> list[int]:
    """Indices of basis monomials of the restricted ring that give invariants."""
    return [i for i, m in enumerate(ring.basis) if is_invariant(m, fixed, group)]


@dataclass
class StateSpace:
    potential: Polynomial
    weights: WeightSystem
    group: DiagonalGroup
    generator: PhaseVector | None
    sectors: list[Sector]
    elements: list[StateElement]
    eta: list[list[Fraction]]
    eta_inv: list[list[Fraction]]
    identity: int

    @property
    def central_charge(self) -> Fraction:
        return self.weights.central_charge

    @property
    def dimension(self) -> int:
        return len(self.elements)

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.elements]

    def index(self, label: str) -> int:
        label = label.replace("*", "").replace(" ", "")
        for i, e in enumerate(self.elements):
            if e.label == label:
                return i
        raise KeyError(f"no state space element labelled {label!r}")

    def sector_of(self, i: int) -> Sector:
        return self.sectors[self.elements[i].sector]

    def degree(self, i: int) -> Fraction:
        return self.elements[i].degree

    def scaled_degree(self, i: int) -> int:
        value = self.group.order * self.elements[i].degree
        return int(value) if value.denominator == 1 else value

    def partner(self, i: int) -> list[int]:
        """Elements j with a nonzero pairing eta(i, j)."""
        return [j for j, v in enumerate(self.eta[i]) if v != 0]


def build_state_space(
    W: Polynomial,
    group: DiagonalGroup,
    generator: PhaseVector | None = None,
    weights: WeightSystem | None = None,
) -> StateSpace:
    weights = weights or solve_weights(W)
    q = weights.weights
    J = PhaseVector(q)
    if J not in group:
        raise StateSpaceError(f"group does not contain the grading element {J}")
    if generator is not None:
        if generator.order != group.order or generator not in group:
            raise StateSpaceError(f"{generator} does not generate the group")
        ordered = [(k, generator * k) for k in range(group.order)]
    else:
        ordered = list(enumerate(group.elements))
    rings: dict[tuple[int, ...], QuotientRing] = {}
    sectors: list[Sector] = []
    elements: list[StateElement] = []
    for pos, (k, h) in enumerate(ordered):
        fix = fixed_locus(h)
        restricted = W.restrict(fix.indices)
        if fix.indices not in rings:
            rings[fix.indices] = quotient_ring(restricted, [q[j] for j in fix.indices])
        ring = rings[fix.indices]
        text = f"e_{k}" if generator is not None else f"e[{h}]"
        sector = Sector(pos, text, h, fix, restricted, ring, w_degree(h, q))
        sector.invariants = sector_invariants(ring, fix.indices, group)
        sectors.append(sector)
        for b in sector.invariants:
            mono = ring.basis[b]
            label = "1" if h == J else sector_label(text, ring.variables, mono)
            elements.append(StateElement(pos, h, fix.indices, mono, sector.degree, label))
    try:
        identity = next(i for i, e in enumerate(elements) if e.element == J)
    except StopIteration:
        raise StateSpaceError("no identity element: the J sector has no invariants") from None
    eta = _pairing_matrix(sectors, elements)
    try:
        eta_inv = linalg.inverse(eta)
    except ZeroDivisionError:
        raise StateSpaceError("state space pairing is degenerate") from None
    return StateSpace(W, weights, group, generator, sectors, elements, eta, eta_inv, identity)


def _pairing_matrix(sectors: list[Sector], elements: list[StateElement]) -> list[list[Fraction]]:
    n = len(elements)
    eta = [[Fraction(0)] * n for _ in range(n)]
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            if j < i or (a.element + b.element).phases != PhaseVector.identity(len(a.element)).phases:
                continue
            ring = sectors[a.sector].ring
            value = ring.pairing(
                Polynomial.monomial(ring.variables, a.monomial), Polynomial.monomial(ring.variables, b.monomial)
            )
            eta[i][j] = eta[j][i] = value
    return eta


# ------------------------------------------------------------- tables


@dataclass(frozen=True)
class DegreeRow:
    sector: str
    scaled_degree: int
    invariants: tuple[str, ...]

    def as_dict(self) -> dict:
        return {"sector": self.sector, "scaled_degree": self.scaled_degree, "invariants": list(self.invariants)}


def degree_table(space: StateSpace) -> list[DegreeRow]:
    """One row per sector with invariants: sector index, |G| * degree, labels."""
    rows = []
    for sector in space.sectors:
        labels = tuple(e.label for e in space.elements if e.sector == sector.position)
        if not labels:
            continue
        name = sector.label[2:] if sector.label.startswith("e_") else sector.label
        scaled = space.group.order * sector.degree
        rows.append(DegreeRow(name, int(scaled) if scaled.denominator == 1 else scaled, labels))
    return rows


def render_degree_table(rows: Sequence[DegreeRow], fmt: str = "md") -> str:
    if fmt == "json":
        return json.dumps([r.as_dict() for r in rows], indent=2)
    head = "| k | " + " | ".join(r.sector for r in rows) + " |"
    rule = "|---|" + "---|" * len(rows)
    degs = "| |G|*deg | " + " | ".join(str(r.scaled_degree) for r in rows) + " |"
    invs = "| invariants | " + " | ".join(", ".join(r.invariants) for r in rows) + " |"
    return "\n".join([head, rule, degs, invs])

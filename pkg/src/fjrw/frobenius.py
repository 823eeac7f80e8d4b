"""Frobenius algebras from correlators or Milnor rings, and the mirror comparison.

Scalars are Fractions, or (when some correlators are only known through
relations) polynomials in the free unknowns reduced modulo those relations.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

import sympy

from . import linalg
from .correlators import Branch, CorrelatorTable
from .milnor import MonomialOrder, QuotientRing, quotient_ring, reduce_polynomial
from .poly import Monomial, Polynomial, format_monomial, solve_weights
from .state_space import StateSpace

Vector = dict  # basis index -> scalar


class Undetermined(Exception):
    """A rank or kernel question could not be decided with the available data."""


class Scalars:
    """Scalar field of an algebra: plain rationals, or Q[free] modulo a relation ideal."""

    def __init__(self, variables: Sequence[str] = (), residual: Sequence[Polynomial] = ()):
        self.variables = tuple(variables)
        self.symbolic = bool(self.variables)
        self.residual = [r.with_variables(self.variables) for r in residual] if self.symbolic else []
        self._order = MonomialOrder.graded(len(self.variables)) if self.symbolic else None

    def lift(self, x):
        if isinstance(x, Polynomial):
            if not self.symbolic:
                return x.constant_value()
            return self.normalize(x.restrict([x.variables.index(v) for v in self.variables]))
        return Fraction(x)

    def normalize(self, x):
        if self.symbolic and isinstance(x, Polynomial) and self.residual:
            return reduce_polynomial(x, self.residual, self._order)
        return x

    def mul(self, a, b):
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a * b
        return self.normalize(a * b)

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0 if isinstance(x, Fraction) else x.is_zero()

    @staticmethod
    def is_constant(x) -> bool:
        return isinstance(x, Fraction) or x.is_constant()

    @staticmethod
    def constant(x) -> Fraction:
        return x if isinstance(x, Fraction) else x.constant_value()

    def to_sympy(self, x):
        if isinstance(x, Fraction):
            return sympy.Rational(x.numerator, x.denominator)
        syms = sympy.symbols(self.variables)
        total = sympy.Integer(0)
        for mono, c in x.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for s, e in zip(syms, mono):
                term *= s**e
            total += term
        return total


def _add_into(target: Vector, idx: int, value, scalars: Scalars) -> None:
    cur = target.get(idx)
    new = value if cur is None else cur + value
    if scalars.is_zero(new):
        target.pop(idx, None)
    else:
        target[idx] = new


@dataclass
class FrobeniusAlgebra:
    labels: list[str]
    degrees: list[Fraction]
    eta: list[list[Fraction]]
    eta_inv: list[list[Fraction]]
    identity: int
    products: dict[tuple[int, int], Vector]
    scalars: Scalars = field(default_factory=Scalars)

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def basis(self, i: int) -> Vector:
        return {i: Fraction(1)}

    def product(self, i: int, j: int) -> Vector:
        return self.products.get((min(i, j), max(i, j)), {})

    def multiply(self, u: Vector, v: Vector) -> Vector:
        out: Vector = {}
        for i, a in u.items():
            for j, b in v.items():
                ab = self.scalars.mul(a, b)
                for k, c in self.product(i, j).items():
                    _add_into(out, k, self.scalars.mul(ab, c), self.scalars)
        return out

    def pairing(self, u: Vector, v: Vector):
        total = Fraction(0)
        for i, a in u.items():
            for j, b in v.items():
                if self.eta[i][j]:
                    total = total + self.scalars.mul(self.scalars.mul(a, b), self.eta[i][j])
        return self.scalars.normalize(total) if not isinstance(total, Fraction) else total

    def add(self, u: Vector, v: Vector, scale=Fraction(1)) -> Vector:
        out = dict(u)
        for k, c in v.items():
            _add_into(out, k, self.scalars.mul(c, scale) if scale != 1 else c, self.scalars)
        return out

    def power(self, u: Vector, k: int) -> Vector:
        out = self.basis(self.identity)
        for _ in range(k):
            out = self.multiply(out, u)
        return out

    def render(self, v: Vector) -> str:
        if not v:
            return "0"
        return " + ".join(f"({c})*{self.labels[i]}" for i, c in sorted(v.items()))

    # ----------------------------------------------------- constructors
    @classmethod
    def from_state_space(cls, space: StateSpace, table: CorrelatorTable, branch: Branch | None = None):
        """r * s = sum over alpha, beta of <r, s, alpha> eta^{alpha beta} beta."""
        scalars = Scalars(branch.free if branch else (), branch.residual if branch else ())
        values = {}
        if branch is not None:
            for name, poly in branch.values.items():
                values[name] = scalars.lift(poly)
        products: dict[tuple[int, int], Vector] = {}
        n = space.dimension
        for r in range(n):
            for s in range(r, n):
                vec: Vector = {}
                for alpha in table.nonzero_with(r, s):
                    raw = table.value(r, s, alpha)
                    if isinstance(raw, str):
                        if raw not in values:
                            raise Undetermined(f"correlator {raw} has no value in this branch")
                        val = values[raw]
                    else:
                        val = raw
                    if scalars.is_zero(val):
                        continue
                    for beta, w in enumerate(space.eta_inv[alpha]):
                        if w:
                            _add_into(vec, beta, scalars.mul(val, w), scalars)
                if vec:
                    products[(r, s)] = vec
        degrees = [space.degree(i) for i in range(n)]
        return cls(list(space.labels), degrees, space.eta, space.eta_inv, space.identity, products, scalars)

    @classmethod
    def from_quotient_ring(cls, ring: QuotientRing):
        """Milnor ring with its residue pairing; degrees doubled to match W-degrees."""
        products = {}
        for i in range(ring.mu):
            for j in range(i, ring.mu):
                coords = ring.multiply_basis(i, j)
                vec = {k: c for k, c in enumerate(coords) if c}
                if vec:
                    products[(i, j)] = vec
        eta = ring.pairing_matrix()
        labels = [format_monomial(ring.variables, m) or "1" for m in ring.basis]
        degrees = [2 * ring.degree(m) for m in ring.basis]
        return cls(labels, degrees, eta, linalg.inverse(eta), ring.index_of((0,) * len(ring.variables)), products)


def specialize(A: FrobeniusAlgebra, point: Mapping[str, Fraction]) -> FrobeniusAlgebra:
    """The algebra over Q obtained by giving every free unknown a rational value.

    Only meaningful without relations among the unknowns.
    """
    sc = A.scalars
    if not sc.symbolic:
        return A
    if sc.residual:
        raise Undetermined("the unknowns satisfy relations; a point must solve them")
    values = [Fraction(point[v]) for v in sc.variables]
    products = {}
    for key, vec in A.products.items():
        out = {k: _evaluate(c, sc, values) for k, c in vec.items()}
        out = {k: c for k, c in out.items() if c}
        if out:
            products[key] = out
    return FrobeniusAlgebra(list(A.labels), list(A.degrees), A.eta, A.eta_inv, A.identity, products)


# ------------------------------------------------------------ checks


@dataclass
class FrobeniusReport:
    ok: bool
    failures: list[tuple[str, tuple]] = field(default_factory=list)

    @property
    def witness(self):
        return self.failures[0] if self.failures else None


def check_frobenius(A: FrobeniusAlgebra, limit: int = 5) -> FrobeniusReport:
    """Associativity, invariance of the pairing, grading and the identity on all basis triples."""
    failures = []
    n = A.dimension
    sc = A.scalars
    for i in range(n):
        if A.multiply(A.basis(A.identity), A.basis(i)) != A.basis(i):
            failures.append(("identity", (A.labels[i],)))
    for (i, j), vec in A.products.items():
        for k in vec:
            if A.degrees[k] != A.degrees[i] + A.degrees[j]:
                failures.append(("grading", (A.labels[i], A.labels[j], A.labels[k])))
    for i in range(n):
        ei = A.basis(i)
        for j in range(n):
            ij = A.multiply(ei, A.basis(j))
            for k in range(n):
                ek = A.basis(k)
                left = A.multiply(ij, ek)
                right = A.multiply(ei, A.multiply(A.basis(j), ek))
                if A.add(left, right, Fraction(-1)):
                    failures.append(("associativity", (A.labels[i], A.labels[j], A.labels[k])))
                if j <= k:
                    diff = A.pairing(ij, ek) - A.pairing(ei, A.multiply(A.basis(j), ek))
                    if not sc.is_zero(sc.normalize(diff) if isinstance(diff, Polynomial) else diff):
                        failures.append(("invariance", (A.labels[i], A.labels[j], A.labels[k])))
                if len(failures) >= limit:
                    return FrobeniusReport(False, failures)
    return FrobeniusReport(not failures, failures)


def tensor_product(A: FrobeniusAlgebra, B: FrobeniusAlgebra) -> FrobeniusAlgebra:
    if A.scalars.symbolic or B.scalars.symbolic:
        raise ValueError("tensor products are formed over rational scalars only")
    nb = B.dimension
    idx = lambda i, j: i * nb + j  # noqa: E731
    labels = [f"{a}(x){b}" for a in A.labels for b in B.labels]
    degrees = [da + db for da in A.degrees for db in B.degrees]
    eta = [[A.eta[i][k] * B.eta[j][l] for k in range(A.dimension) for l in range(nb)] for i in range(A.dimension) for j in range(nb)]
    eta_inv = [
        [A.eta_inv[i][k] * B.eta_inv[j][l] for k in range(A.dimension) for l in range(nb)]
        for i in range(A.dimension)
        for j in range(nb)
    ]
    products = {}
    for i1 in range(A.dimension):
        for i2 in range(i1, A.dimension):
            pa = A.product(i1, i2)
            if not pa:
                continue
            for j1 in range(nb):
                for j2 in range(nb):
                    r, s = idx(i1, j1), idx(i2, j2)
                    if r > s:
                        continue
                    pb = B.product(j1, j2)
                    if not pb:
                        continue
                    products[(r, s)] = {idx(k, l): ca * cb for k, ca in pa.items() for l, cb in pb.items()}
    return FrobeniusAlgebra(labels, degrees, eta, eta_inv, idx(A.identity, B.identity), products)


def embed_factor(vec: Vector, position: int, dims: Sequence[int], identities: Sequence[int]) -> Vector:
    """Image of a vector of factor ``position`` in the tensor product of all factors."""
    out = {}
    for k, c in vec.items():
        index = 0
        for p, (d, one) in enumerate(zip(dims, identities)):
            index = index * d + (k if p == position else one)
        out[index] = c
    return out


# -------------------------------------------------------- rank helpers


def _evaluate(x, scalars: Scalars, point: Sequence[Fraction]) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return x.evaluate(point)


def _matrix_rank(rows: list[list], scalars: Scalars) -> tuple[int, str]:
    """Rank of a matrix of scalars; the label says how it was certified."""
    if all(scalars.is_constant(x) for row in rows for x in row):
        return linalg.rank([[scalars.constant(x) for x in row] for row in rows]), "exact"
    if scalars.residual:
        raise Undetermined("rank depends on unknowns constrained by relations")
    rng = random.Random(20240917)
    best = 0
    for _ in range(3):
        point = [Fraction(rng.randint(-97, 97) or 1) for _ in scalars.variables]
        best = max(best, linalg.rank([[_evaluate(x, scalars, point) for x in row] for row in rows]))
    return best, "generic"


def span_rank(A: FrobeniusAlgebra, vectors: Sequence[Vector]) -> tuple[int, str]:
    """Dimension of the span of ``vectors``.

    With relations among unknowns the coordinates may not reduce to
    constants; the Gram matrix under the pairing often does, and full Gram
    rank still certifies that the vectors span the algebra.
    """
    vectors = [v for v in vectors if v]
    rows = [[v.get(k, Fraction(0)) for k in range(A.dimension)] for v in vectors]
    try:
        return _matrix_rank(rows, A.scalars)
    except Undetermined:
        # the Gram rank bounds the rank from below, the support from above
        upper = min(len(vectors), len({k for v in vectors for k in v}))
        gram = [[A.pairing(u, v) for v in vectors] for u in vectors]
        if all(A.scalars.is_constant(x) for row in gram for x in row):
            r = linalg.rank([[A.scalars.constant(x) for x in row] for row in gram])
            if r == upper:
                return r, "gram"
        raise


def monomial_images(A: FrobeniusAlgebra, images: Sequence[Vector], max_degree: Fraction, degrees: Sequence[Fraction]):
    """phi(X^m) for every monomial m of degree at most ``max_degree`` (degrees of the X_j given)."""
    n = len(images)
    one = A.basis(A.identity)
    out: dict[Monomial, Vector] = {(0,) * n: one}
    frontier = [(0,) * n]
    while frontier:
        nxt = []
        for m in frontier:
            for j in range(n):
                t = m[:j] + (m[j] + 1,) + m[j + 1 :]
                if t in out:
                    continue
                if sum(d * e for d, e in zip(degrees, t)) > max_degree:
                    continue
                out[t] = A.multiply(out[m], images[j])
                nxt.append(t)
        frontier = nxt
    return out


def find_generators(A: FrobeniusAlgebra, max_count: int | None = None) -> list[int]:
    """Basis elements, taken in increasing degree, not in the subalgebra of the earlier ones."""
    order = sorted(range(A.dimension), key=lambda i: (A.degrees[i], i))
    chosen: list[int] = []
    for i in order:
        if i == A.identity:
            continue
        degs = [A.degrees[g] for g in chosen]
        imgs = monomial_images(A, [A.basis(g) for g in chosen], A.degrees[i], degs) if chosen else {(): A.basis(A.identity)}
        same = [v for v in imgs.values() if v and all(A.degrees[k] == A.degrees[i] for k in v)]
        before, _ = span_rank(A, same) if same else (0, "exact")
        piece = sum(1 for k in range(A.dimension) if A.degrees[k] == A.degrees[i])
        if before == piece:
            continue
        after, _ = span_rank(A, same + [A.basis(i)])
        if after > before:
            chosen.append(i)
            if max_count is not None and len(chosen) > max_count:
                break
    return chosen


# ----------------------------------------------------------- mirror map


@dataclass
class BranchOutcome:
    description: str
    status: str  # pass | conditional | fail | undetermined
    reason: str = ""
    coefficients: list[str] = field(default_factory=list)
    hypotheses: list[str] = field(default_factory=list)
    surjectivity: str = ""


@dataclass
class MirrorVerdict:
    singularity: str
    status: str
    dim_A: int | None = None
    dim_B: int | None = None
    sign_assignments_tested: int = 0
    hypotheses: list[str] = field(default_factory=list)
    alpha: Fraction | None = None
    mu: Fraction | None = None
    assignment: dict[str, str] = field(default_factory=dict)
    branches: list[BranchOutcome] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    factors: list["MirrorVerdict"] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status not in ("dimension-mismatch", "relation-failure")

    def as_dict(self) -> dict:
        return {
            "singularity": self.singularity,
            "status": self.status,
            "dim_A": self.dim_A,
            "dim_B": self.dim_B,
            "sign_assignments_tested": self.sign_assignments_tested,
            "hypotheses": list(self.hypotheses),
            "alpha": None if self.alpha is None else str(self.alpha),
            "mu": None if self.mu is None else str(self.mu),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _kernel(rows: list[list], scalars: Scalars, ncols: int):
    """Kernel vectors of a scalar matrix, as Fractions or sympy expressions."""
    if all(scalars.is_constant(x) for row in rows for x in row):
        return linalg.nullspace([[scalars.constant(x) for x in row] for row in rows], ncols), False
    if scalars.residual:
        raise Undetermined("kernel depends on unknowns constrained by relations")
    M = sympy.Matrix([[scalars.to_sympy(x) for x in row] for row in rows])
    return [list(v) for v in M.nullspace(simplify=True)], True


def _nonvanishing_combination(basis: list[list[Fraction]]) -> list[Fraction] | None:
    d = len(basis)
    ncols = len(basis[0]) if basis else 0
    if any(all(v[c] == 0 for v in basis) for c in range(ncols)):
        return None
    for coeffs in product(range(1, d + 3), repeat=d):
        vec = [sum((t * v[c] for t, v in zip(coeffs, basis)), Fraction(0)) for c in range(ncols)]
        if all(x != 0 for x in vec):
            return vec
    return None


def _hypotheses(exprs, branch: Branch | None, pinned: Sequence[str]) -> list[str]:
    """Nonvanishing conditions for symbolic kernel entries, named by correlators when possible."""
    factors = set()
    for e in exprs:
        num, den = sympy.fraction(sympy.factor(e))
        for part in (num, den):
            for f, _ in sympy.factor_list(part)[1]:
                factors.add(f)
    if not factors:
        return []
    if all(f.is_Symbol for f in factors) and branch is not None:
        support = {str(f) for f in factors}
        candidates = []
        for name, value in branch.values.items():
            if len(value) != 1:
                continue
            (mono, _), = value.items()
            vars_used = {value.variables[i] for i, e in enumerate(mono) if e}
            if vars_used == support:
                candidates.append(name)
        if candidates:
            candidates.sort(key=lambda n: (n not in pinned, n.startswith("u"), n))
            return [f"{candidates[0]} != 0"]
    return sorted(f"{f} != 0" for f in factors)


def check_assignment(
    A: FrobeniusAlgebra,
    target: Polynomial,
    assignment: Sequence[Vector],
    branch: Branch | None = None,
    pinned: Sequence[str] = (),
) -> BranchOutcome:
    """Does X_j -> assignment[j] induce an isomorphism Q(target) -> A?

    The Jacobian relations of sum_r c_r X^{b_r} are linear in the c_r; a
    kernel vector with every c_r nonzero gives a potential that rescales to
    the target.  Surjectivity plus equal dimensions then finish the proof.
    """
    desc = branch.describe() if branch else "(no unknowns)"
    tw = solve_weights(target)
    for j, v in enumerate(assignment):
        for k in v:
            if A.degrees[k] != 2 * tw.weights[j]:
                return BranchOutcome(desc, "fail", f"image of {target.variables[j]} has the wrong degree")
    mu = quotient_ring(target, tw.weights).mu
    if mu != A.dimension:
        return BranchOutcome(desc, "fail", f"dimension {A.dimension} differs from {mu}")
    rows_b = target.monomials()
    q2 = [2 * w for w in tw.weights]
    images = monomial_images(A, assignment, max(A.degrees), q2)
    # relations: for each variable j, sum_r c_r b_rj phi(X^{b_r - e_j}) = 0
    matrix = []
    n = len(target.variables)
    for j in range(n):
        cols = []
        for b in rows_b:
            if b[j] == 0:
                cols.append({})
                continue
            m = b[:j] + (b[j] - 1,) + b[j + 1 :]
            vec = images.get(m)
            if vec is None:
                vec = A.multiply(images[(0,) * n], {})  # beyond top degree: zero
            cols.append({k: A.scalars.mul(c, Fraction(b[j])) for k, c in vec.items()})
        for k in range(A.dimension):
            matrix.append([col.get(k, Fraction(0)) for col in cols])
    matrix = [row for row in matrix if any(not A.scalars.is_zero(x) for x in row)]
    try:
        kernel, symbolic = _kernel(matrix, A.scalars, len(rows_b))
    except Undetermined as exc:
        return BranchOutcome(desc, "undetermined", str(exc))
    hypotheses: list[str] = []
    if not kernel:
        return BranchOutcome(desc, "fail", "Jacobian relations of the transpose do not vanish")
    if symbolic:
        if len(kernel) != 1:
            return BranchOutcome(desc, "undetermined", "symbolic kernel of dimension above one")
        vec = kernel[0]
        if any(sympy.simplify(x) == 0 for x in vec):
            return BranchOutcome(desc, "fail", "some coefficient vanishes identically")
        hypotheses = _hypotheses(vec, branch, pinned)
        coeffs = [str(sympy.simplify(x)) for x in vec]
    else:
        vec = _nonvanishing_combination(kernel)
        if vec is None:
            return BranchOutcome(desc, "fail", "every solution has a vanishing coefficient")
        coeffs = [str(x) for x in vec]
    try:
        rank, how = span_rank(A, list(images.values()))
    except Undetermined as exc:
        return BranchOutcome(desc, "undetermined", f"surjectivity: {exc}", coeffs, hypotheses)
    if rank < A.dimension:
        return BranchOutcome(desc, "fail", "generators do not span the algebra", coeffs, hypotheses, how)
    status = "conditional" if hypotheses or how == "generic" else "pass"
    return BranchOutcome(desc, status, "", coeffs, hypotheses, how)


def image(A: FrobeniusAlgebra, i: int | None) -> Vector:
    """Basis vector i, or zero for a variable sent to zero."""
    return {} if i is None else A.basis(i)


def search_assignment(
    A: FrobeniusAlgebra,
    target: Polynomial,
    branch: Branch | None = None,
    pinned: Sequence[str] = (),
    limit: int = 500,
) -> list[int | None] | None:
    """Basis elements of the right degrees whose images satisfy the relations.

    A passing choice wins; otherwise the first conditional one is returned.
    A variable with no element of its degree is sent to zero (``None``).
    """
    tw = solve_weights(target)
    cands = [
        [i for i in range(A.dimension) if i != A.identity and A.degrees[i] == 2 * q] or [None] for q in tw.weights
    ]
    fallback = None
    for count, combo in enumerate(product(*cands)):
        if count >= limit:
            break
        named = [i for i in combo if i is not None]
        if len(set(named)) != len(named):
            continue
        outcome = check_assignment(A, target, [image(A, i) for i in combo], branch, pinned)
        if outcome.status == "pass":
            return list(combo)
        if outcome.status == "conditional" and fallback is None:
            fallback = list(combo)
    return fallback


def combine_outcomes(name: str, outcomes: list[BranchOutcome], dim_a: int, dim_b: int) -> MirrorVerdict:
    verdict = MirrorVerdict(name, "undetermined", dim_a, dim_b, len(outcomes), branches=outcomes)
    statuses = [o.status for o in outcomes]
    if dim_a != dim_b:
        verdict.status = "dimension-mismatch"
    elif all(s == "pass" for s in statuses):
        verdict.status = "isomorphic"
    elif all(s == "fail" for s in statuses):
        verdict.status = "relation-failure"
    elif "fail" not in statuses and "undetermined" not in statuses:
        verdict.status = "conditional"
        hyps = []
        for o in outcomes:
            for h in o.hypotheses or ["generic values of the free correlators"]:
                if h not in hyps:
                    hyps.append(h)
        verdict.hypotheses = hyps
    elif "pass" in statuses and "undetermined" not in statuses:
        verdict.status = "isomorphic-up-to-sign-choice"
    return verdict


# --------------------------------------------------------- non-existence


def milnor_nonexistence_check(degrees: Sequence[Fraction], top_degree: Fraction, dimension: int) -> MirrorVerdict:
    """Test whether generators of these degrees can come from a Milnor ring.

    A Milnor ring with generator weights q_i = d_i * alpha has top degree
    sum(1 - 2 q_i) = D * alpha; solving fixes alpha, and then mu must equal
    prod(1/q_i - 1) and the dimension.
    """
    degrees = [Fraction(d) for d in degrees]
    n = len(degrees)
    alpha = Fraction(n) / (Fraction(top_degree) + 2 * sum(degrees))
    q = [d * alpha for d in degrees]
    verdict = MirrorVerdict("", "undetermined", dimension, None, alpha=alpha)
    if alpha <= 0 or any(not (0 < x < 1) for x in q):
        verdict.status = "no-milnor-ring-exists"
        verdict.notes.append("candidate weights fall outside (0, 1)")
        return verdict
    mu = Fraction(1)
    for x in q:
        mu *= 1 / x - 1
    verdict.mu = mu
    if mu.denominator != 1:
        verdict.status = "no-milnor-ring-exists"
        verdict.notes.append(f"mu = {mu} is not an integer")
    elif mu != dimension:
        verdict.status = "no-milnor-ring-exists"
        verdict.notes.append(f"mu = {mu} differs from the dimension {dimension}")
    else:
        verdict.status = "undetermined"
        verdict.notes.append("degrees are consistent with a Milnor ring")
    return verdict

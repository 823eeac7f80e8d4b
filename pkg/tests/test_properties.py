"""Structural invariants on every corpus entry and on random invertible potentials."""

from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from fjrw import linalg
from fjrw.correlators import selection_rules
from fjrw.corpus import load_corpus
from fjrw.frobenius import check_frobenius
from fjrw.milnor import quotient_ring
from fjrw.mirror import analyze
from fjrw.poly import Polynomial, exponent_matrix, parse_polynomial, solve_weights, transpose_potential
from fjrw.state_space import build_state_space
from fjrw.symmetry import maximal_symmetry_group

ENTRIES = load_corpus()
NAMES = [e.name for e in ENTRIES]
BY_NAME = {e.name: e for e in ENTRIES}
INVERTIBLE = [e.name for e in ENTRIES if not e.nonexistence]


def entry_analysis(run, entry):
    """Analysis with the maximal group; sums are analysed directly here."""
    return run.analysis or analyze(entry.potential())


def check_pairing(space) -> None:
    """Symmetric, non-degenerate, graded, and every element has a dual of complementary degree."""
    eta, n, chat = space.eta, space.dimension, space.central_charge
    assert all(eta[i][j] == eta[j][i] for i in range(n) for j in range(n))
    assert linalg.determinant(eta) != 0
    for i in range(n):
        assert space.partner(i)
        for j in space.partner(i):
            assert space.degree(i) + space.degree(j) == 2 * chat


def check_algebras(algebras) -> None:
    """Two-sided unit, associativity and invariance of the pairing."""
    assert algebras
    for A in algebras:
        one = A.basis(A.identity)
        for i in range(A.dimension):
            assert A.multiply(one, A.basis(i)) == A.basis(i) == A.multiply(A.basis(i), one)
        report = check_frobenius(A)
        assert report.ok, report.failures


def check_correlator_symmetry(an) -> None:
    space, table = an.space, an.table
    for key, c in table.entries.items():
        assert len({str(table.value(*p)) for p in permutations(key)}) == 1
        assert len({(ok, data.h0, data.h1) for ok, data in (selection_rules(space, p) for p in permutations(key))}) == 1
        if space.identity in key and c.known:
            rest = list(key)
            rest.remove(space.identity)
            assert c.value == space.eta[rest[0]][rest[1]]


def check_invertible(W, an) -> None:
    """|G| = |det B|, dim = mu(W^T), and transposing twice returns W."""
    assert maximal_symmetry_group(W).order == abs(exponent_matrix(W).determinant) == an.group.order
    WT = transpose_potential(W)
    assert an.space.dimension == quotient_ring(WT, solve_weights(WT).weights).mu
    assert set(transpose_potential(WT).monomials()) == set(W.monomials())


PROPERTY_LABELS = ("pairing", "frobenius", "symmetry", "invertible")
_results: dict[str, dict[str, str | None]] = {}


def property_results(entry, run) -> dict[str, str | None]:
    """Failure message per property for one corpus entry (None when it holds); computed once per session."""
    if entry.name not in _results:
        an = entry_analysis(run, entry)
        steps = {
            "pairing": lambda: check_pairing(an.space),
            "frobenius": lambda: check_algebras(list(run.algebras) + [an.algebra(b) for b in an.branches]),
            "symmetry": lambda: check_correlator_symmetry(an),
            "invertible": lambda: check_invertible(entry.potential(), an),
        }
        if entry.nonexistence:
            del steps["invertible"]
        out = {}
        for label, step in steps.items():
            try:
                step()
                out[label] = None
            except AssertionError as exc:
                out[label] = str(exc) or "assertion failed"
        _results[entry.name] = out
    return _results[entry.name]


CASES = [(n, label) for n in NAMES for label in PROPERTY_LABELS if label != "invertible" or n in INVERTIBLE]


@pytest.mark.parametrize("name,label", CASES)
def test_corpus_property(runs, name, label):
    """pairing: symmetric, non-degenerate, graded, degree duality.  frobenius: unit, associativity and
    invariance for every algebra produced, one per sign assignment.  symmetry: correlators are
    permutation-symmetric.  invertible: |G| = |det B|, dim = mu(W^T), transpose involutive."""
    results = property_results(BY_NAME[name], runs(name))
    assert results[label] is None, results[label]


# ------------------------------------------------------------ random potentials

VARS = ("x", "y", "z")


@st.composite
def invertible_potentials(draw, max_vars=3, max_exp=4):
    """Sums of Fermat, chain and loop blocks in at most max_vars variables."""
    n = draw(st.integers(1, max_vars))
    terms = {}
    start = 0
    while start < n:
        size = draw(st.integers(1, n - start))
        kind = draw(st.sampled_from(["fermat", "chain", "loop"])) if size > 1 else "fermat"
        idx = list(range(start, start + size))
        exps = [draw(st.integers(2, max_exp)) for _ in idx]
        for pos, i in enumerate(idx):
            mono = [0] * n
            mono[i] = exps[pos]
            if kind == "fermat" and size > 1:
                nxt = None
            elif kind == "chain":
                nxt = idx[pos + 1] if pos + 1 < size else None
            elif kind == "loop":
                nxt = idx[(pos + 1) % size]
            else:
                nxt = None
            if nxt is not None:
                mono[nxt] = 1
            terms[tuple(mono)] = 1
        start += size
    return Polynomial(VARS[:n], terms)


fast = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(invertible_potentials())
def test_random_transpose_involutive(W):
    assert transpose_potential(transpose_potential(W)) == W


@fast
@given(invertible_potentials())
def test_random_group_order(W):
    assert maximal_symmetry_group(W).order == abs(exponent_matrix(W).determinant)


@fast
@given(invertible_potentials(max_vars=2, max_exp=4))
def test_random_state_space_dimension(W):
    space = build_state_space(W, maximal_symmetry_group(W))
    WT = transpose_potential(W)
    assert space.dimension == quotient_ring(WT, solve_weights(WT).weights).mu
    chat = space.central_charge
    for i in range(space.dimension):
        assert all(space.degree(i) + space.degree(j) == 2 * chat for j in space.partner(i))


@fast
@given(invertible_potentials())
def test_random_milnor_number(W):
    q = solve_weights(W).weights
    mu = 1
    for w in q:
        mu *= 1 / w - 1
    assert quotient_ring(W, q).mu == mu


coefficients = st.fractions(min_value=-20, max_value=20, max_denominator=7)
monomials = st.tuples(st.integers(0, 4), st.integers(0, 4))
polynomials = st.dictionaries(monomials, coefficients, max_size=6).map(lambda d: Polynomial(("x", "y"), d))


@fast
@given(polynomials)
def test_parser_round_trip(P):
    assert parse_polynomial(str(P), ["x", "y"]) == P


RING = quotient_ring(parse_polynomial("x^3*y + y^7"), [F(2, 7), F(1, 7)])


@fast
@given(polynomials, polynomials, coefficients, coefficients)
def test_normal_form_linear(P, Q, a, b):
    combined = RING.normal_form(P * a + Q * b)
    assert combined == [a * p + b * q for p, q in zip(RING.normal_form(P), RING.normal_form(Q))]


@fast
@given(polynomials, polynomials)
def test_normal_form_multiplicative(P, Q):
    assert RING.reduce(P * Q) == RING.reduce(RING.reduce(P) * RING.reduce(Q))

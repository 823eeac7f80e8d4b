from fractions import Fraction as F

import pytest

from fjrw.correlators import (
    InconsistentRelations,
    four_point_value,
    line_bundle_data,
    resolve_unknowns,
    selection_rules,
)
from fjrw.mirror import analyze
from fjrw.poly import parse_polynomial

from conftest import corpus_poly, poly

E19_CONCAVE = [(2, 4, 16), (2, 7, 13), (4, 4, 14), (4, 5, 13), (4, 7, 11), (11, 13, 19), (11, 16, 16), (13, 13, 17), (13, 14, 16)]


@pytest.fixture(scope="module")
def e19():
    return analyze(poly("x^3 + x*y^7"))


def corr(an, *labels):
    space = an.space
    return an.table.get(*(space.index(l) for l in labels))


class TestSelectionRules:
    def test_concave_triple(self, e19):
        ok, data = selection_rules(e19.space, [e19.space.index(l) for l in ("e_2", "e_4", "e_16")])
        assert ok and data.concave

    def test_wrong_degree_is_inadmissible(self, e19):
        i = e19.space.index("e_11")
        ok, _ = selection_rules(e19.space, [i, i, i])
        assert not ok and corr(e19, "e_11", "e_11", "e_11") is None
        assert e19.table.value(i, i, i) == 0


class TestAxioms:
    def test_pairing(self, e19):
        assert corr(e19, "1", "1", "e_20").value == 1
        c = corr(e19, "y^6e_0", "y^6e_0", "1")
        assert c.value == F(-1, 7) and c.axiom == "pairing"

    def test_pairing_zero_off_degree(self, e19):
        assert e19.table.value(e19.space.identity, e19.space.identity, e19.space.index("e_13")) == 0

    def test_e19_concavity(self, e19):
        concave = sorted(
            tuple(int(e19.space.labels[i][2:]) for i in c.insertions)
            for c in e19.table.by_axiom("concavity")
        )
        assert concave == sorted(E19_CONCAVE)
        assert all(c.value == 1 for c in e19.table.by_axiom("concavity"))

    def test_q11_concavity(self):
        assert corr(analyze(corpus_poly("Q_11")), "e_10", "e_13", "e_14").value == 1

    def test_z19t_concavity(self):
        an = analyze(corpus_poly("Z_19T"), generator=None)
        c = corr(an, "e_17", "e_19", "e_19")
        assert c.value == 1 and c.axiom == "concavity"

    @pytest.mark.parametrize("name,labels,value", [
        ("S_12", ("e_9", "e_9", "e_9"), -3),
        ("Q_11", ("e_11", "e_13", "e_13"), -2),
        ("W_13", ("e_11", "e_11", "e_11"), -4),
        ("W_17", ("e_7", "e_7", "e_7"), -5),
    ])
    def test_index_zero(self, name, labels, value):
        c = corr(analyze(corpus_poly(name)), *labels)
        assert c.axiom == "index_zero" and c.value == value


class TestFourPoint:
    def test_e19_e11(self, e19):
        i = e19.space.index("e_11")
        assert four_point_value(e19.table, [i] * 4) == -7

    def test_z12_e6(self):
        an = analyze(corpus_poly("Z_12"))
        i = an.space.index("e_6")
        assert four_point_value(an.table, [i] * 4) == -4

    def test_line_bundle_degrees(self, e19):
        i = e19.space.index("e_11")
        data = line_bundle_data(e19.space, [i] * 4)
        assert data.integral and data.h0 == (0, 1) and data.h1 == (1, 0)


class TestComposition:
    def test_e19_relation(self, e19):
        assert e19.table.unknowns == ("u1",)
        assert {str(r.polynomial) for r in e19.relations} == {"-7*u1^2 + 7"}
        assert corr(e19, "y^6e_0", "e_11", "e_11").name == "u1"

    def test_e19_branches(self, e19):
        assert [b.constant_values() for b in e19.branches] == [{"u1": 1}, {"u1": -1}]

    def test_q11_sign(self):
        an = analyze(corpus_poly("Q_11"))
        c = corr(an, "z^2e_9", "e_14", "e_14")
        values = sorted(b.reduce(an.table.as_polynomial(*c.insertions)).constant_value() for b in an.branches)
        assert values == [-1, 1]

    def test_s17t_relations(self, runs):
        an = runs("S_17T").analysis
        names = {"a", "b", "c", "d", "e", "f"}
        assert names <= set(an.table.unknowns)
        # -2af = e, -2bd = e, -2ab = d, -2ae = c, -2b^2 = f, -2d^2 = c
        rels = [
            "-2*a*f - e", "-2*b*d - e", "-2*a*b - d", "-2*a*e - c", "-2*b^2 - f", "-2*d^2 - c",
        ]
        for br in an.branches:
            for r in rels:
                p = parse_polynomial(r, an.table.unknowns)
                assert br.reduce(p).is_zero(), (r, br.describe())


class TestResolve:
    def test_square(self):
        u = ("a",)
        branches = resolve_unknowns([parse_polynomial("a^2 - 1", u)], u)
        assert [b.constant_values() for b in branches] == [{"a": 1}, {"a": -1}]

    def test_empty(self):
        assert resolve_unknowns([], ())[0].values == {}

    def test_inconsistent(self):
        u = ("a",)
        with pytest.raises(InconsistentRelations):
            resolve_unknowns([parse_polynomial("a^2 + 1", u), parse_polynomial("a", u)], u)

    def test_back_substitution_leaves_free(self):
        u = ("a", "b", "c")
        rels = [parse_polynomial(t, u) for t in ("-2*a*b - c", "b^2 - 1")]
        branches = resolve_unknowns(rels, u)
        assert len(branches) == 2 and all(len(b.free) == 1 for b in branches)
        for b in branches:
            assert all(b.reduce(r).is_zero() for r in rels)

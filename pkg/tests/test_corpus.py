import os
from fractions import Fraction as F
from pathlib import Path

import pytest
import yaml

from fjrw.corpus import (
    CorpusEntry,
    CorpusError,
    canonical,
    find_entry,
    load_corpus,
    normalize_name,
    run_entry,
    select,
)
from fjrw.poly import DegenerateInputError
from fjrw.state_space import degree_table, render_degree_table

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_ENTRIES = [
    "E_19", "Q_11", "S_11", "S_12", "Z_11", "Z_12", "Z_13", "W_13", "E_13", "Z_17", "Z_17T", "Z_18", "Z_19",
    "Z_19T", "W_17", "W_17T", "Q_17", "Q_17T", "S_16", "S_17", "S_17T", "Q_2_0", "Q_2_0T", "S_1_0", "S_1_0T",
    "J_3_0", "Z_1_0", "W_1_0",
]
SUMS = ["Q_10", "Q_12", "U_12", "W_12", "E_12", "E_14", "E_18", "E_20", "U_16", "W_18", "Q_16", "Q_18"]


class TestLoading:
    def test_names_unique_and_sectioned(self, corpus):
        assert len({e.key for e in corpus}) == len(corpus) == 40
        assert {e.section for e in corpus} == {"example", "unimodal", "bimodal", "corank3", "corank2"}

    def test_normalize(self):
        assert normalize_name("Q_{2,0}^T") == normalize_name("Q_2_0T") == normalize_name("q20t") == "Q20T"

    def test_find(self, corpus):
        assert find_entry(corpus, "Z_{1,0}").name == "Z_1_0"
        assert find_entry(corpus, "nonsense") is None

    def test_filter(self, corpus):
        names = [e.name for e in select(corpus, "Z_*")]
        assert names == ["Z_11", "Z_12", "Z_13", "Z_17", "Z_17T", "Z_18", "Z_19", "Z_19T", "Z_1_0"]

    def test_schema_checked(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(yaml.safe_dump({"schema": 99, "entries": []}))
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_duplicates_rejected(self, tmp_path):
        e = {"name": "A", "section": "x", "polynomial": "x^3", "variables": ["x"]}
        path = tmp_path / "c.yaml"
        path.write_text(yaml.safe_dump({"schema": 1, "entries": [e, e]}))
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_missing_fields(self):
        with pytest.raises(CorpusError):
            CorpusEntry.from_dict({"name": "A"})


class TestParameters:
    def test_degenerate_parameter(self, corpus):
        with pytest.raises(DegenerateInputError):
            find_entry(corpus, "W_1_0").potential({"a": F(2)})

    def test_unknown_parameter(self, corpus):
        with pytest.raises(CorpusError):
            find_entry(corpus, "J_3_0").bindings({"c": F(1)})

    @pytest.mark.parametrize("b", [F(1), F(-2), F(1, 2)])
    def test_j30_family(self, corpus, b):
        result = run_entry(find_entry(corpus, "J_3_0"), {"b": b})
        assert result.ok, [c.as_dict() for c in result.mismatches]


class TestRecorder:
    def test_canonical(self):
        assert canonical(F(2, 4)) == "1/2" and canonical(None) == "-" and canonical([1, F(1, 2)]) == canonical(["1", "1/2"])

    def test_mismatch_reported(self, corpus):
        entry = find_entry(corpus, "E_19")
        data = dict(entry.__dict__)
        data["expected"] = dict(entry.expected, chat="1")
        result = run_entry(CorpusEntry(**data))
        assert not result.ok and [c.field for c in result.mismatches] == ["chat"]

    def test_erratum_must_match_computed(self, corpus):
        entry = find_entry(corpus, "Q_11")
        data = dict(entry.__dict__)
        data["errata"] = [dict(entry.errata[0], corrected=5)]
        result = run_entry(CorpusEntry(**data))
        assert [(c.field, c.key) for c in result.mismatches] == [("sector_mu", "y")]


class TestFullRun:
    def test_no_mismatches(self, corpus_results):
        bad = {n: [c.as_dict() for c in r.mismatches] or r.error for n, r in corpus_results.items() if not r.ok}
        assert bad == {}

    def test_order_preserved(self, corpus, corpus_results):
        assert list(corpus_results) == [e.name for e in corpus]

    @pytest.mark.parametrize("name", SUMS)
    def test_sums_use_tensor_route(self, corpus_results, name):
        r = corpus_results[name]
        assert r.verdict["status"] == "isomorphic" and r.report["factors"]


@pytest.mark.parametrize("name", GOLDEN_ENTRIES)
def test_golden_sector_table(runs, corpus_results, name):
    """Rendered sector tables match the stored files, and the stored values match the printed tables."""
    table_checks = [c for c in corpus_results[name].checks if c.field == "table"]
    assert table_checks and all(c.status in ("match", "erratum") for c in table_checks)
    text = render_degree_table(degree_table(runs(name).analysis.space)) + "\n"
    path = GOLDEN / f"{name}.md"
    if os.environ.get("FJRW_REGEN_GOLDEN"):
        path.write_text(text)
    assert path.read_text() == text

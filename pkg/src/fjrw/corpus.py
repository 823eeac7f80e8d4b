"""The bundled corpus of singularities and the runner that checks it.

Each entry carries a polynomial, the group data needed to reproduce the
printed sector labels, and the printed values.  Running an entry recomputes
everything and compares value by value.  A disagreement that matches a
recorded erratum is reported as such instead of as a mismatch.
"""

from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .frobenius import milnor_nonexistence_check
from .mirror import MirrorRun, parse_group_choice, split_summands, verify_mirror
from .poly import DegenerateInputError, Polynomial, parse_polynomial
from .state_space import degree_table
from .symmetry import grading_element, parse_phases

SCHEMA_VERSION = 1


class CorpusError(ValueError):
    pass


def normalize_name(text: str) -> str:
    """Canonical lookup key: Q_{2,0}^T, Q_2_0T and q20t all give Q20T."""
    return re.sub(r"[^0-9A-Za-z]", "", text).upper()


@dataclass
class CorpusEntry:
    name: str
    title: str
    section: str
    polynomial: str
    variables: list[str]
    params: dict[str, Fraction] = field(default_factory=dict)
    nondegenerate: list[str] = field(default_factory=list)
    group: str = "maximal"
    generator: str | None = None
    names: dict[str, list[str]] = field(default_factory=dict)
    factors: list[str] = field(default_factory=list)
    expected: dict[str, Any] = field(default_factory=dict)
    mirror: dict[str, Any] = field(default_factory=dict)
    nonexistence: dict[str, Any] = field(default_factory=dict)
    errata: list[dict[str, Any]] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CorpusEntry":
        missing = {"name", "section", "polynomial", "variables"} - set(data)
        if missing:
            raise CorpusError(f"entry {data.get('name', '?')} lacks {', '.join(sorted(missing))}")
        return cls(
            name=data["name"],
            title=data.get("title", data["name"]),
            section=data["section"],
            polynomial=data["polynomial"],
            variables=list(data["variables"]),
            params={k: Fraction(str(v)) for k, v in (data.get("params") or {}).items()},
            nondegenerate=list(data.get("nondegenerate") or []),
            group=data.get("group", "maximal"),
            generator=data.get("generator"),
            names={k: list(v) for k, v in (data.get("names") or {}).items()},
            factors=list(data.get("factors") or []),
            expected=dict(data.get("expected") or {}),
            mirror=dict(data.get("mirror") or {}),
            nonexistence=dict(data.get("nonexistence") or {}),
            errata=list(data.get("errata") or []),
        )

    @property
    def key(self) -> str:
        return normalize_name(self.name)

    def bindings(self, overrides: Mapping[str, Fraction] | None = None) -> dict[str, Fraction]:
        values = dict(self.params)
        for k, v in (overrides or {}).items():
            if k not in values:
                raise CorpusError(f"{self.name} has no parameter {k!r}")
            values[k] = Fraction(v)
        return values

    def potential(self, overrides: Mapping[str, Fraction] | None = None) -> Polynomial:
        params = self.bindings(overrides)
        for expr in self.nondegenerate:
            if parse_polynomial(expr, [], params).constant_value() == 0:
                raise DegenerateInputError(f"{self.name} is degenerate when {expr} = 0")
        return parse_polynomial(self.polynomial, self.variables, params)

    def target(self) -> Polynomial | None:
        text = self.mirror.get("target")
        if text is None:
            return None
        return parse_polynomial(text, self.mirror.get("target_variables", self.variables))


def load_corpus(path: str | Path | None = None) -> list[CorpusEntry]:
    if path is None:
        text = resources.files("fjrw").joinpath("data/corpus.yaml").read_text()
    else:
        text = Path(path).read_text()
    data = yaml.safe_load(text)
    if not isinstance(data, dict) or data.get("schema") != SCHEMA_VERSION:
        raise CorpusError(f"corpus schema must be {SCHEMA_VERSION}")
    entries = [CorpusEntry.from_dict(e) for e in data.get("entries", [])]
    seen: set[str] = set()
    for e in entries:
        if e.key in seen:
            raise CorpusError(f"duplicate corpus entry {e.name}")
        seen.add(e.key)
    return entries


def find_entry(entries: Sequence[CorpusEntry], name: str) -> CorpusEntry | None:
    key = normalize_name(name)
    return next((e for e in entries if e.key == key), None)


def select(entries: Sequence[CorpusEntry], pattern: str | None) -> list[CorpusEntry]:
    """Entries whose name matches a shell-style pattern, in corpus order."""
    if not pattern:
        return list(entries)
    return [e for e in entries if fnmatchcase(e.name, pattern) or fnmatchcase(e.title, pattern)]


# ------------------------------------------------------------ comparison


def canonical(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(canonical(v) for v in value) + "]"
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    text = str(value).strip()
    try:
        return str(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return text


@dataclass
class Check:
    field: str
    key: str
    expected: str
    computed: str
    status: str = "match"  # match | mismatch | erratum
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "field": self.field,
            "key": self.key,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
            "note": self.note,
        }


@dataclass
class EntryResult:
    name: str
    title: str
    section: str
    checks: list[Check] = field(default_factory=list)
    verdict: dict | None = None
    report: dict | None = None
    error: str | None = None

    @property
    def mismatches(self) -> list[Check]:
        return [c for c in self.checks if c.status == "mismatch"]

    @property
    def errata(self) -> list[Check]:
        return [c for c in self.checks if c.status == "erratum"]

    @property
    def ok(self) -> bool:
        return self.error is None and not self.mismatches

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "title": self.title,
            "section": self.section,
            "ok": self.ok,
            "error": self.error,
            "verdict": self.verdict,
            "checks": [c.as_dict() for c in self.checks],
        }


class _Recorder:
    def __init__(self, errata: Iterable[Mapping[str, Any]]):
        self.checks: list[Check] = []
        self.errata = {(e["field"], str(e.get("key", ""))): e for e in errata}

    def compare(self, field_name: str, key: str, expected: Any, computed: Any) -> None:
        exp, got = canonical(expected), canonical(computed)
        check = Check(field_name, key, exp, got)
        if exp != got:
            erratum = self.errata.get((field_name, key))
            if erratum is not None and canonical(erratum.get("corrected")) == got:
                check.status = "erratum"
                check.note = erratum.get("note", "")
            else:
                check.status = "mismatch"
        self.checks.append(check)


def _value(text: Any, params: Mapping[str, Fraction]) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return parse_polynomial(str(text), [], params).constant_value()


def _label(k: Any) -> str:
    return k if isinstance(k, str) else f"e_{k}"


def _compare_space(rec: _Recorder, run: MirrorRun, expected: Mapping[str, Any], params) -> None:
    an = run.analysis
    space, table = an.space, an.table
    labels = set(space.labels)
    if "weights" in expected:
        rec.compare("weights", "", [Fraction(str(q)) for q in expected["weights"]], list(an.weights.weights))
    if "chat" in expected:
        rec.compare("chat", "", Fraction(str(expected["chat"])), an.weights.central_charge)
    if "group_order" in expected:
        rec.compare("group_order", "", expected["group_order"], an.group.order)
    if "j_order" in expected:
        rec.compare("j_order", "", expected["j_order"], grading_element(an.weights).order)
    mus: dict[str, int] = {}
    for sector in space.sectors:
        fixed = "".join(an.potential.variables[j] for j in sector.fixed.indices)
        if fixed:
            mus[fixed] = sector.ring.mu
    for key, mu in (expected.get("sector_mu") or {}).items():
        rec.compare("sector_mu", key, mu, mus.get(key))
    rows = {r.sector: r for r in degree_table(space)}
    printed = set()
    for row in expected.get("table") or []:
        k, deg = str(row[0]), row[1]
        names = sorted(row[2]) if len(row) > 2 else [f"e_{k}"]
        printed.add(k)
        got = rows.get(k)
        rec.compare("table", k, [k, deg, names], None if got is None else [k, got.scaled_degree, sorted(got.invariants)])
    if expected.get("table"):
        for k, got in rows.items():
            if k not in printed:
                rec.compare("table", k, None, [k, got.scaled_degree, sorted(got.invariants)])
    for a, b, v in expected.get("pairing") or []:
        got = space.eta[space.index(a)][space.index(b)] if {a, b} <= labels else None
        rec.compare("pairing", f"{a} {b}", _value(v, params), got)
    for kind, axiom in (("concavity", "concavity"), ("index_zero", "index_zero")):
        for item in expected.get(kind) or []:
            triple, value = (item, 1) if kind == "concavity" else (item[:3], item[3])
            key = " ".join(str(k) for k in triple)
            names = [_label(k) for k in triple]
            got = None
            if set(names) <= labels:
                c = table.get(*(space.index(n) for n in names))
                if c is not None and c.known:
                    got = c.value if c.axiom == axiom else f"{c.value} ({c.axiom})"
            rec.compare(kind, key, value, got)
    for triple in expected.get("composition") or []:
        rec.compare("composition", " ".join(triple), "+-1", _composition_value(an, triple))
    for triple in expected.get("undetermined") or []:
        got = "-"
        if set(triple) <= labels:
            c = table.get(*(space.index(n) for n in triple))
            got = "unknown" if c is not None and not c.known else canonical(None if c is None else c.value)
        rec.compare("undetermined", " ".join(triple), "unknown", got)
    for base, power, coeff, result in expected.get("products") or []:
        key = f"{base}^{power}"
        for A in run.algebras:
            lhs = A.power(A.basis(space.index(base)), power)
            rhs = {space.index(result): Fraction(coeff)}
            rec.compare("products", key, A.render(rhs), A.render(lhs))


def _composition_value(an, triple: Sequence[str]) -> str:
    space = an.space
    try:
        c = an.table.get(*(space.index(n) for n in triple))
    except KeyError:
        return "-"
    if c is None:
        return "0"
    if c.known:
        return canonical(c.value)
    seen = set()
    for br in an.branches:
        v = br.reduce(an.table.as_polynomial(*c.insertions))
        if not v.is_constant() or abs(v.constant_value()) != 1:
            return str(v)
        seen.add(v.constant_value())
    return "+-1" if seen else "-"


def verify_entry(entry: CorpusEntry, params: Mapping[str, Fraction] | None = None, signs: str = "all") -> MirrorRun:
    """Run the mirror pipeline with the entry's group, labels, target and assignment."""
    W = entry.potential(params)
    generator = parse_phases(entry.generator) if entry.generator else None
    return verify_mirror(
        W,
        parse_group_choice(entry.group),
        generator,
        entry.names,
        entry.target(),
        entry.mirror.get("assignment"),
        signs=signs,
        name=entry.title,
    )


def run_entry(entry: CorpusEntry, params: Mapping[str, Fraction] | None = None, signs: str = "all") -> EntryResult:
    from .report import build_report

    result = EntryResult(entry.name, entry.title, entry.section)
    rec = _Recorder(entry.errata)
    bindings = entry.bindings(params)
    try:
        W = entry.potential(params)
        run = verify_entry(entry, params, signs)
    except (DegenerateInputError, ValueError, KeyError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
        return result
    verdict = run.verdict
    if entry.factors:
        parts = [str(W.restrict(p)) for p in split_summands(W)]
        wanted = [str(parse_polynomial(f, entry.variables).restrict(p)) for f, p in zip(entry.factors, split_summands(W))]
        rec.compare("factors", "", wanted, parts)
    if run.analysis is not None and entry.expected:
        _compare_space(rec, run, entry.expected, bindings)
    m = entry.mirror
    if "status" in m:
        rec.compare("mirror.status", "", m["status"], verdict.status)
    if "dimension" in m:
        # the printed dimension is that of the transpose's Milnor ring when one exists
        dim = verdict.dim_B if verdict.dim_B is not None else verdict.dim_A
        rec.compare("mirror.dimension", "", m["dimension"], dim)
    if "hypotheses" in m:
        rec.compare("mirror.hypotheses", "", list(m["hypotheses"]), list(verdict.hypotheses))
    ne = entry.nonexistence
    if ne:
        printed = milnor_nonexistence_check(ne["degrees"], ne["top"], verdict.dim_A or 0)
        rec.compare("nonexistence.printed_alpha", "", ne["alpha"], printed.alpha)
        rec.compare("nonexistence.alpha", "", ne["alpha"], verdict.alpha)
        if "mu" in ne:
            rec.compare("nonexistence.printed_mu", "", ne["mu"], printed.mu)
            rec.compare("nonexistence.mu", "", ne["mu"], verdict.mu)
        if "mu_integral" in ne:
            rec.compare("nonexistence.printed_mu_integral", "", ne["mu_integral"], printed.mu.denominator == 1)
            rec.compare("nonexistence.mu_integral", "", ne["mu_integral"], verdict.mu.denominator == 1)
    result.checks = rec.checks
    result.verdict = verdict.as_dict()
    result.report = build_report(run, entry.title, bindings)
    return result


def _run_one(args) -> EntryResult:
    entry, params, signs = args
    return run_entry(entry, params, signs)


def run_corpus(
    entries: Sequence[CorpusEntry],
    jobs: int = 1,
    signs: str = "all",
    params: Mapping[str, Fraction] | None = None,
) -> list[EntryResult]:
    """Run entries, in parallel when jobs > 1; results come back in corpus order."""
    work = [(e, {k: v for k, v in (params or {}).items() if k in e.params}, signs) for e in entries]
    if jobs <= 1 or len(work) <= 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))

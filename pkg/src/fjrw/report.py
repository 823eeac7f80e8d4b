"""Per-singularity reports in a fixed layout.

The layout follows the usual presentation of these computations: header,
fixed loci with their restricted Milnor rings, the sector table, correlators
grouped by the axiom that fixes them, and the mirror verdict.  Rendering is a
pure function of the report dictionary, so equal input gives equal bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .mirror import MirrorRun
from .poly import format_monomial
from .state_space import degree_table

AXIOM_ORDER = (("pairing", "Pairing"), ("concavity", "Concavity"), ("index_zero", "Index zero"))


def _triple(space, key) -> str:
    return "<" + ", ".join(space.labels[i] for i in key) + ">"


def _fixed_loci(an) -> list[dict]:
    loci: dict[tuple[int, ...], dict] = {}
    for sector in an.space.sectors:
        idx = sector.fixed.indices
        entry = loci.setdefault(idx, {
            "fixed": "".join(an.potential.variables[j] for j in idx) or "0",
            "sectors": [],
            "mu": sector.ring.mu,
            "basis": [format_monomial(sector.ring.variables, m, sep="") or "1" for m in sector.ring.basis],
        })
        entry["sectors"].append(sector.label[2:] if sector.label.startswith("e_") else sector.label)
    return sorted(loci.values(), key=lambda d: (-len(d["fixed"]) if d["fixed"] != "0" else 1, d["fixed"]))


def _correlators(an) -> dict[str, list[str]]:
    space, table = an.space, an.table
    out: dict[str, list[str]] = {name: [] for name, _ in AXIOM_ORDER}
    for c in table.entries.values():
        if c.known and c.value != 0 and c.axiom in out:
            out[c.axiom].append(f"{_triple(space, c.insertions)} = {c.value}")
    out["composition"] = []
    unknown = []
    for c in table.unknown_entries():
        values = set()
        for br in an.branches:
            v = br.reduce(table.as_polynomial(*c.insertions))
            values.add(str(v))
        text = f"{_triple(space, c.insertions)} = {c.name}"
        if len(values) == 1 and next(iter(values)) != c.name:
            out["composition"].append(f"{text} = {next(iter(values))}")
        elif all(_is_rational(v) for v in values) and len(values) > 1:
            out["composition"].append(f"{text} in {{{', '.join(sorted(values))}}}")
        else:
            unknown.append(text)
    out["undetermined"] = unknown
    out["relations"] = sorted({f"{r.polynomial} = 0" for r in an.relations})
    return out


def _is_rational(text: str) -> bool:
    try:
        Fraction(text)
    except ValueError:
        return False
    return True


def analysis_section(an, correlators: bool = True) -> dict[str, Any]:
    """Header, fixed loci and sector table of an analysis; correlators optional."""
    G = an.group
    out: dict[str, Any] = {
        "polynomial": str(an.potential),
        "jacobian": [str(an.potential.diff(i)) for i in range(len(an.potential.variables))],
        "weights": {v: str(q) for v, q in zip(an.potential.variables, an.weights.weights)},
        "chat": str(an.weights.central_charge),
        "group": {
            "order": G.order,
            "cyclic": G.is_cyclic(),
            "generator": None if an.generator is None else str(an.generator),
        },
        "fixed_loci": _fixed_loci(an),
        "sectors": [r.as_dict() for r in degree_table(an.space)],
        "warnings": list(an.warnings),
    }
    if correlators:
        out["correlators"] = _correlators(an)
        out["solutions"] = [b.describe() for b in an.branches]
    return out


def build_analysis_report(an, title: str, params: Mapping[str, Fraction] | None = None,
                          correlators: bool = False) -> dict[str, Any]:
    report: dict[str, Any] = {"title": title, "params": {k: str(v) for k, v in sorted((params or {}).items())}}
    report.update(analysis_section(an, correlators))
    return report


def build_report(run: MirrorRun, title: str, params: Mapping[str, Fraction] | None = None) -> dict[str, Any]:
    verdict = run.verdict
    report: dict[str, Any] = {
        "title": title,
        "params": {k: str(v) for k, v in sorted((params or {}).items())},
        "verdict": verdict.as_dict(),
        "assignment": dict(verdict.assignment),
        "branches": [
            {"branch": b.description, "status": b.status, "reason": b.reason, "coefficients": list(b.coefficients),
             "hypotheses": list(b.hypotheses), "surjectivity": b.surjectivity}
            for b in verdict.branches
        ],
        "factors": [f.as_dict() for f in verdict.factors],
        "notes": list(verdict.notes),
    }
    if run.analysis is None:
        report["polynomial"] = verdict.singularity
    else:
        report.update(analysis_section(run.analysis))
    return report


def ring_report(ring, title: str) -> dict[str, Any]:
    """Milnor ring summary: Groebner basis, monomial basis with degrees, Hessian class and pairing."""
    names = ring.variables
    return {
        "title": title,
        "polynomial": str(ring.potential),
        "weights": {v: str(q) for v, q in zip(names, ring.weights)},
        "mu": ring.mu,
        "groebner_basis": [str(g) for g in ring.gb],
        "basis": [{"monomial": format_monomial(names, m) or "1", "degree": str(ring.degree(m))} for m in ring.basis],
        "hessian": str(ring.element(ring.hessian_coords)),
        "pairing": [[str(x) for x in row] for row in ring.pairing_matrix()],
    }


def render_json(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _render_ring(report: Mapping[str, Any]) -> list[str]:
    lines = [f"W = {report['polynomial']}"]
    lines.append("weights: " + ", ".join(f"q_{k} = {v}" for k, v in report["weights"].items()))
    lines.append(f"mu = {report['mu']}")
    lines.append("Groebner basis: " + ", ".join(report["groebner_basis"]))
    lines.append(f"hess(W) = {report['hessian']} (mod Jacobian ideal)")
    lines += ["", "| monomial | weighted degree |", "|---|---|"]
    lines += [f"| {b['monomial']} | {b['degree']} |" for b in report["basis"]]
    lines += ["", "pairing matrix:"] + ["  [" + ", ".join(row) + "]" for row in report["pairing"]]
    return lines


def _render_analysis(report: Mapping[str, Any]) -> list[str]:
    lines = ["Jacobian ideal: (" + ", ".join(report["jacobian"]) + ")"]
    lines.append("weights: " + ", ".join(f"q_{k} = {v}" for k, v in report["weights"].items()))
    lines.append(f"central charge: {report['chat']}")
    g = report["group"]
    gen = f", generator {g['generator']}" if g["generator"] else ""
    lines.append(f"group: order {g['order']}{gen}")
    for w in report.get("warnings", []):
        lines.append(f"warning: {w}")
    lines += ["", "| fixed locus | sectors | mu | basis |", "|---|---|---|---|"]
    for f in report["fixed_loci"]:
        lines.append(f"| {f['fixed']} | {', '.join(f['sectors'])} | {f['mu']} | {', '.join(f['basis'])} |")
    rows = report["sectors"]
    lines += ["", "| k | " + " | ".join(r["sector"] for r in rows) + " |", "|---|" + "---|" * len(rows)]
    lines.append("| order*deg | " + " | ".join(str(r["scaled_degree"]) for r in rows) + " |")
    lines.append("| invariants | " + " | ".join(", ".join(r["invariants"]) for r in rows) + " |")
    corr = report.get("correlators") or {}
    for key, heading in AXIOM_ORDER + (("composition", "Composition"), ("undetermined", "Undetermined")):
        if corr.get(key):
            lines += ["", f"{heading}:"] + [f"- {c}" for c in corr[key]]
    if corr.get("relations"):
        lines += ["", "Relations:"] + [f"- {r}" for r in corr["relations"]]
    if report.get("solutions") and corr.get("relations"):
        lines += ["", "Solutions:"] + [f"- {b}" for b in report["solutions"]]
    return lines


def _render_verdict(report: Mapping[str, Any]) -> list[str]:
    v = report["verdict"]
    lines = ["", f"Verdict: {v['status']}"]
    lines.append(f"dim A = {v['dim_A']}, dim B = {v['dim_B']}, sign assignments tested: {v['sign_assignments_tested']}")
    if v["hypotheses"]:
        lines.append("hypotheses: " + ", ".join(v["hypotheses"]))
    if v["alpha"] is not None:
        lines.append(f"alpha = {v['alpha']}, mu = {v['mu']}")
    if report["assignment"]:
        lines.append("map: " + ", ".join(f"{k} -> {x}" for k, x in report["assignment"].items()))
    for b in report["branches"]:
        extra = f" ({b['reason']})" if b["reason"] else ""
        lines.append(f"- {b['branch']}: {b['status']}{extra}")
    for f in report["factors"]:
        lines.append(f"- factor {f['singularity']}: {f['status']}, dim {f['dim_A']}")
    for n in report["notes"]:
        lines.append(f"note: {n}")
    return lines


def render_markdown(report: Mapping[str, Any]) -> str:
    lines = [f"## {report['title']}", ""]
    if "groebner_basis" in report:
        return "\n".join(lines + _render_ring(report)) + "\n"
    lines.append(f"W = {report['polynomial']}")
    if report.get("params"):
        lines.append("parameters: " + ", ".join(f"{k} = {v}" for k, v in report["params"].items()))
    if "weights" in report:
        lines += _render_analysis(report)
    if "verdict" in report:
        lines += _render_verdict(report)
    return "\n".join(lines) + "\n"


def render(report: Mapping[str, Any], fmt: str = "md") -> str:
    return render_json(report) if fmt == "json" else render_markdown(report)

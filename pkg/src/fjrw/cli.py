"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
3 degenerate input.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Sequence

import click

from .corpus import CorpusError, find_entry, load_corpus, run_corpus, select, verify_entry
from .milnor import quotient_ring
from .mirror import analyze, parse_group_choice, verify_mirror
from .poly import DegenerateInputError, PolynomialSyntaxError, parse_polynomial, solve_weights
from .report import build_analysis_report, build_report, render, ring_report

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_DEGENERATE = 0, 1, 2, 3
FAILING_STATUSES = ("relation-failure", "dimension-mismatch")


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _params(values: Sequence[str]) -> dict[str, Fraction]:
    out = {}
    for item in values:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise click.BadParameter(f"expected k=v, got {item!r}", param_hint="--param")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise click.BadParameter(f"{value!r} is not a rational number", param_hint="--param")
    return out


def _variables(text: str | None) -> list[str] | None:
    return [v.strip() for v in text.split(",") if v.strip()] if text else None


def _run_guarded(fn):
    """Map library errors onto the exit-code contract."""
    try:
        return fn()
    except PolynomialSyntaxError as exc:
        _fail(f"cannot parse polynomial: {exc}", EXIT_PARSE)
    except CorpusError as exc:
        _fail(str(exc), EXIT_PARSE)
    except DegenerateInputError as exc:
        _fail(f"degenerate input: {exc}", EXIT_DEGENERATE)
    except ValueError as exc:
        _fail(str(exc), EXIT_PARSE)


def _emit(report: dict, fmt: str) -> None:
    click.echo(render(report, fmt), nl=False)


format_option = click.option("--format", "fmt", type=click.Choice(["md", "json"]), default="md", show_default=True)
param_option = click.option("--param", "params", multiple=True, metavar="K=V", help="Bind a coefficient name to a rational value.")
group_option = click.option("--group", default="maximal", show_default=True, metavar="maximal|J|gen=<phases>")
variables_option = click.option("--variables", default=None, help="Comma-separated variable order (default: first use).")
signs_option = click.option("--signs", type=click.Choice(["all", "first"]), default="all", show_default=True,
                            help="Check every solution of the composition relations, or only the first.")


@click.group()
@click.version_option(package_name="fjrw")
def main() -> None:
    """Exact FJRW rings of invertible potentials and mirror checks against Milnor rings."""


@main.command("analyze")
@click.argument("polynomial")
@group_option
@param_option
@variables_option
@format_option
def analyze_cmd(polynomial: str, group: str, params: tuple[str, ...], variables: str | None, fmt: str) -> None:
    """Weights, central charge, group and sector table of POLYNOMIAL."""
    bindings = _params(params)

    def work():
        W = parse_polynomial(polynomial, _variables(variables), bindings)
        an = analyze(W, parse_group_choice(group))
        return build_analysis_report(an, str(W), bindings)

    _emit(_run_guarded(work), fmt)


@main.command("correlators")
@click.argument("polynomial")
@group_option
@param_option
@variables_option
@format_option
def correlators_cmd(polynomial: str, group: str, params: tuple[str, ...], variables: str | None, fmt: str) -> None:
    """Three-point correlators of POLYNOMIAL grouped by the axiom that fixes them."""
    bindings = _params(params)

    def work():
        W = parse_polynomial(polynomial, _variables(variables), bindings)
        an = analyze(W, parse_group_choice(group))
        return build_analysis_report(an, str(W), bindings, correlators=True)

    _emit(_run_guarded(work), fmt)


@main.command("ring")
@click.argument("polynomial")
@param_option
@variables_option
@format_option
def ring_cmd(polynomial: str, params: tuple[str, ...], variables: str | None, fmt: str) -> None:
    """Milnor ring of POLYNOMIAL: Groebner basis, monomial basis and residue pairing."""
    bindings = _params(params)

    def work():
        W = parse_polynomial(polynomial, _variables(variables), bindings)
        return ring_report(quotient_ring(W, solve_weights(W).weights), str(W))

    _emit(_run_guarded(work), fmt)


@main.command("mirror-check")
@click.argument("subject")
@group_option
@param_option
@variables_option
@click.option("--target", default=None, help="Transpose written with your own variable names.")
@signs_option
@format_option
def mirror_check_cmd(subject: str, group: str, params: tuple[str, ...], variables: str | None,
                     target: str | None, signs: str, fmt: str) -> None:
    """Compare the FJRW ring of SUBJECT with the Milnor ring of its transpose.

    SUBJECT is a corpus name such as E_19 or Q_17T, or a polynomial.
    """
    bindings = _params(params)

    def work():
        entry = find_entry(load_corpus(), subject)
        if entry is not None:
            return build_report(verify_entry(entry, bindings, signs), entry.title, entry.bindings(bindings))
        W = parse_polynomial(subject, _variables(variables), bindings)
        T = parse_polynomial(target) if target else None
        return build_report(verify_mirror(W, parse_group_choice(group), target=T, signs=signs), str(W), bindings)

    report = _run_guarded(work)
    _emit(report, fmt)
    if report["verdict"]["status"] in FAILING_STATUSES:
        sys.exit(EXIT_MISMATCH)


@main.group("corpus")
def corpus_group() -> None:
    """The bundled corpus of singularities."""


@corpus_group.command("list")
def corpus_list() -> None:
    """List bundled entries."""
    for e in _run_guarded(load_corpus):
        click.echo(f"{e.name:8} {e.section:10} {e.polynomial}")


@corpus_group.command("run")
@click.argument("pattern", required=False)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@param_option
@signs_option
@format_option
@click.option("--reports", is_flag=True, help="Include the full report of every entry.")
def corpus_run(pattern: str | None, jobs: int, params: tuple[str, ...], signs: str, fmt: str, reports: bool) -> None:
    """Recompute every entry matching PATTERN (shell-style, e.g. 'Z_*') and compare with the stored values."""
    bindings = _params(params)
    entries = select(_run_guarded(load_corpus), pattern)
    if not entries:
        _fail(f"no corpus entry matches {pattern!r}", EXIT_PARSE)
    results = run_corpus(entries, jobs=jobs, signs=signs, params=bindings)
    failed = [r for r in results if not r.ok]
    if fmt == "json":
        out = []
        for r in results:
            d = r.as_dict()
            if reports:
                d["report"] = r.report
            out.append(d)
        summary = {"entries": len(results), "failed": [r.name for r in failed],
                   "mismatches": sum(len(r.mismatches) for r in results),
                   "errata": sum(len(r.errata) for r in results)}
        click.echo(json.dumps({"summary": summary, "results": out}, indent=2, sort_keys=True))
    else:
        for r in results:
            state = "ok" if r.ok else "FAIL"
            status = r.verdict["status"] if r.verdict else "-"
            click.echo(f"{r.name:8} {state:4} {status:22} checks={len(r.checks)} errata={len(r.errata)}")
            if r.error:
                click.echo(f"    error: {r.error}")
            for c in r.mismatches:
                click.echo(f"    mismatch {c.field} {c.key}: expected {c.expected}, computed {c.computed}")
            for c in r.errata:
                click.echo(f"    erratum {c.field} {c.key}: printed {c.expected}, computed {c.computed}")
            if reports and r.report:
                click.echo("")
                click.echo(render(r.report, "md"))
        total = sum(len(r.mismatches) for r in results)
        click.echo(f"{len(results)} entries, {len(failed)} failed, {total} mismatches")
    if failed:
        sys.exit(EXIT_MISMATCH)


if __name__ == "__main__":
    main()

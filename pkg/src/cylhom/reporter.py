"""Plain-text rendering of reports with rich tables."""

from __future__ import annotations

from io import StringIO

from rich.console import Console
from rich.table import Table

from cylhom.document import (
    BuildingOut,
    BuildingsReport,
    ClassifyReport,
    CobordismReport,
    ConditionDReport,
    CzReport,
    HomologyReport,
    IndexReport,
    LemmaOut,
)

WIDTH = 120


def _console() -> Console:
    return Console(file=StringIO(), force_terminal=False, width=WIDTH)


def _text(console: Console) -> str:
    output = console.file
    assert isinstance(output, StringIO)
    return output.getvalue()


def _verdict(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def _budgets(budgets: dict[str, int]) -> str:
    return ",".join(f"{k}={v}" for k, v in budgets.items())


def format_cz(report: CzReport) -> str:
    console = _console()
    table = Table(title=f"Conley-Zehnder indices (k <= {report.k_max})", show_header=True, header_style="bold")
    table.add_column("Orbit", style="cyan")
    table.add_column("k", justify="right")
    table.add_column("μ", justify="right")
    table.add_column("Grading", justify="right")
    table.add_column("Parity")
    table.add_column("Good/bad")
    table.add_column("Action", justify="right")
    table.add_column("Class", justify="right")
    for row in report.rows:
        table.add_row(
            row.orbit,
            str(row.k),
            str(row.cz),
            str(row.grading),
            row.parity.value,
            "bad" if row.bad else "good",
            row.action,
            str(row.homotopy_class),
        )
    console.print(table)
    return _text(console)


def format_classify(report: ClassifyReport) -> str:
    console = _console()
    convexity, separation = report.convexity, report.separation
    console.print(f"dynamically convex: {_verdict(convexity.passed)} (k <= {convexity.k_cap}, action <= {convexity.action_cap})")
    if convexity.violations:
        table = Table(title="Convexity violations", show_header=True, header_style="bold")
        table.add_column("Orbit", style="cyan")
        table.add_column("k", justify="right")
        table.add_column("μ", justify="right")
        for v in convexity.violations:
            table.add_row(v.orbit, str(v.k), str(v.cz))
        console.print(table)

    console.print(f"dynamically separated: {_verdict(separation.passed)}")
    if separation.separated_below is not None:
        console.print(f"separated below action {separation.separated_below}")
    if separation.violations:
        table = Table(title="Separation violations", show_header=True, header_style="bold")
        table.add_column("Condition", style="cyan")
        table.add_column("Orbit")
        table.add_column("Class", justify="right")
        table.add_column("k", justify="right")
        table.add_column("μ", justify="right")
        table.add_column("Previous", justify="right")
        for v in separation.violations:
            previous = "" if v.previous_k is None else f"k={v.previous_k}, μ={v.previous_cz}"
            table.add_row(v.condition, v.orbit, str(v.homotopy_class), str(v.k), str(v.cz), previous)
        console.print(table)
    return _text(console)


def describe_building(building: BuildingOut) -> str:
    levels = []
    for i, level in enumerate(building.levels, start=1):
        parts = []
        for c in level:
            if c.kind == "trivial_cylinder":
                parts.append(f"trivial {c.positive}")
            else:
                parts.append(f"{c.positive} → ({', '.join(c.negatives)}) ind {c.index}")
        levels.append(f"L{i}: " + "; ".join(parts))
    return " | ".join(levels)


def _building_table(title: str, buildings: list[BuildingOut]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("#", justify="right")
    table.add_column("Ends", style="cyan")
    table.add_column("Index", justify="right")
    table.add_column("Type")
    table.add_column("Levels")
    for n, b in enumerate(buildings, start=1):
        ends = f"{b.positive_end} → {', '.join(b.negative_ends) or '∅'}"
        kind = b.type.value if b.type is not None else ""
        table.add_row(str(n), ends, str(b.index), kind, describe_building(b))
    return table


def _format_lemmas(console: Console, lemmas: LemmaOut) -> None:
    table = Table(title="Lemma checks", show_header=True, header_style="bold")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Applicable")
    table.add_column("Counterexamples", justify="right")
    table.add_column("Detail")
    for check in lemmas.checks:
        table.add_row(
            check.name,
            _verdict(check.passed),
            "yes" if check.applicable else "no",
            str(len(check.counterexamples)),
            check.detail,
        )
    console.print(table)
    for check in lemmas.checks:
        if check.counterexamples:
            console.print(_building_table(f"Counterexamples: {check.name}", check.counterexamples))


def format_buildings(report: BuildingsReport) -> str:
    console = _console()
    console.print(
        f"target index {report.target_index}, {report.negative_ends} negative end(s), "
        f"budgets {_budgets(report.budgets)}"
    )
    if report.incomplete:
        console.print("INCOMPLETE: the search hit a budget; results are a lower bound")
    console.print(_building_table(f"Buildings ({len(report.buildings)})", report.buildings))
    if report.type_counts is not None:
        console.print("types: " + ", ".join(f"{k}={v}" for k, v in report.type_counts.items()))
    if report.lemmas is not None:
        _format_lemmas(console, report.lemmas)
    return _text(console)


def format_condition_d(report: ConditionDReport) -> str:
    console = _console()
    console.print(f"condition D for {report.x} → {report.z}: {_verdict(report.passed)} (budgets {_budgets(report.budgets)})")
    if report.incomplete:
        console.print("INCOMPLETE: the search hit a budget; results are a lower bound")
    console.print(_building_table("Limit configurations", report.buildings))
    table = Table(title="Intermediate orbits", show_header=True, header_style="bold")
    table.add_column("Iterate", style="cyan")
    table.add_column("μ", justify="right")
    table.add_column("Action", justify="right")
    table.add_column("Good/bad")
    for y in report.intermediates:
        table.add_row(y.iterate, str(y.cz), y.action, "bad" if y.bad else "good")
    console.print(table)
    return _text(console)


def format_homology(report: HomologyReport) -> str:
    console = _console()
    check = report.d_squared
    if check.passed:
        console.print("∂² = 0: PASS")
    else:
        assert check.witness is not None
        w = check.witness
        through = ", ".join(w.through) or "nothing"
        console.print(
            f"∂² ≠ 0: coefficient of {w.z} in ∂²{w.x} is {w.value} (class {w.homotopy_class}, through {through})"
        )
        return _text(console)

    lo, hi = report.degrees
    table = Table(
        title=f"Homology over {report.coefficients.value}, ∂{report.variant.value}, degrees {lo}..{hi}",
        show_header=True,
        header_style="bold",
    )
    table.add_column("Degree", justify="right", style="cyan")
    table.add_column("Rank", justify="right")
    table.add_column("By class")
    table.add_column("Torsion")
    for total in report.totals:
        groups = [g for g in report.groups if g.degree == total.degree]
        by_class = ", ".join(f"{g.homotopy_class}:{g.rank}" for g in groups if g.rank)
        torsion = ", ".join(f"Z/{t}" for g in groups for t in g.torsion)
        degree = f"{total.degree}*" if total.edge else str(total.degree)
        table.add_row(degree, str(total.rank), by_class, torsion)
    console.print(table)
    console.print(f"{report.generators} generators; * marks window edges where ranks may be truncated")
    return _text(console)


def format_index(report: IndexReport) -> str:
    console = _console()
    table = Table(title=f"Index data for {report.config}", show_header=True, header_style="bold")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("Fredholm index", str(report.index))
    table.add_row("Even ends #Γ₀", str(report.even_ends))
    table.add_row("Normal Chern number", report.normal_chern)
    table.add_row("Z", str(report.z))
    table.add_row("Automatically regular", "yes" if report.regular else "no")
    console.print(table)
    return _text(console)


def format_cobordism(report: CobordismReport) -> str:
    console = _console()
    table = Table(title="Equal gradings across the cobordism", show_header=True, header_style="bold")
    table.add_column("Grading", justify="right", style="cyan")
    table.add_column("Positive end")
    table.add_column("Negative end")
    table.add_column("Simple")
    simple = {(m.positive, m.negative) for m in report.simple_matches}
    for m in report.matches:
        table.add_row(str(m.grading), m.positive, m.negative, "yes" if (m.positive, m.negative) in simple else "")
    console.print(table)
    console.print(f"base cylinder index: {report.base_cylinder_index}")
    console.print(f"double cover index: {report.double_cover_index}")
    return _text(console)

import math
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel

from anneal.compare import ComparisonTable
from app.schemas import AnalyzeReport, DemoReport, SampleReport, SweepReport


def _strip_zero(s: str) -> str:
    if s.startswith("0."):
        return s[1:]
    if s.startswith("-0."):
        return "-" + s[2:]
    return s


def fixed(x: float, places: int = 4) -> str:
    """Fixed decimals without the leading zero: .0672, 2.7000."""
    return _strip_zero(f"{x:.{places}f}")


def num(x: float, digits: int = 4) -> str:
    return _strip_zero(f"{x:.{digits}g}")


def length(d: float) -> str:
    return _strip_zero(f"{round(d, 10):g}")


def alpha_label(alpha: float) -> str:
    return "e" if alpha == math.e else f"{alpha:g}"


def yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def to_structured(report: BaseModel) -> str:
    return report.model_dump_json(indent=2) + "\n"


def log_form(value: Optional[float], log_value: float) -> str:
    """The value itself, or e^x when it does not fit in a float."""
    if value is None or value == 0.0:
        return f"e^{log_value:.6g}"
    return num(value)


def _resources_line(r) -> str:
    m = "n/a (tied edge lengths)" if r.m_bits is None else f"{r.m_bits} bits"
    aa = "overflow" if r.aa_repeats is None else str(r.aa_repeats)
    return (f"resources: m={m}, success={log_form(r.success_prob, r.log_success_prob)}, "
            f"expected repeats={log_form(r.expected_repeats, -r.log_success_prob)}, "
            f"repeats to optimum={log_form(r.expected_repeats_to_optimum, r.log_repeats_to_optimum)}, "
            f"amplified repeats={aa}")


def render_demo(report: DemoReport) -> str:
    lines: List[str] = [f"four-city example, alpha={alpha_label(report.alpha)}", "", "bias per edge"]
    for e in report.edges:
        lines.append(f"  q{e.edge}={fixed(e.q)} (d={length(e.distance)})")
    lines += ["", "tours"]
    for t in report.tours:
        lines.append(f"  {t.tour} Πq={fixed(t.bias_product)} D={length(t.distance)} p={fixed(t.probability)}")
    lines += [
        "",
        f"Z={fixed(report.z)}",
        f"P(solution)={fixed(report.solution_probability, 2)} vs unbiased {fixed(report.unbiased_probability, 2)}",
        _resources_line(report.resources),
        "",
    ]
    if report.checks_skipped:
        lines.append(f"reference checks skipped (alpha={alpha_label(report.alpha)}, reference values are for alpha=e)")
    else:
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status} {c.name} expected {num(c.expected)} got {num(c.actual, 6)} (tol {c.tolerance:g})")
    return "\n".join(lines) + "\n"


def render_analyze(report: AnalyzeReport) -> str:
    lines: List[str] = [f"instance n={report.n} alpha={alpha_label(report.alpha)}", "", "top tours"]
    for t in report.top:
        lines.append(f"  {t.tour} Πq={num(t.bias_product)} D={length(t.distance)} p={num(t.probability)}")
    cp = report.cp
    deg = report.degeneracy
    lines += [
        "",
        f"Z={log_form(report.z, report.log_z)}",
        f"Z within [(n−1)!/α^n, (n−1)!/α] : {yes_no(report.z_within_bounds)}"
        f"  [{num(report.z_lower)}, {num(report.z_upper)}]",
        _resources_line(report.resources),
        f"CP (k={cp.k:g}): Pr(optimal)={num(cp.probability)} vs n^-k={num(report.n ** -cp.k)}"
        f"  lhs={num(cp.lhs)} rhs={num(cp.rhs)}",
        f"CP satisfied: {yes_no(cp.satisfied)}",
        f"degeneracy: min edge gap={num(deg.min_edge_gap)} min tour gap={num(deg.min_tour_gap)}"
        f" flags: {', '.join(deg.flags) if deg.flags else 'none'}",
    ]
    return "\n".join(lines) + "\n"


def render_sample(report: SampleReport) -> str:
    lines: List[str] = [
        f"sampled {report.shots} shots, n={report.n} alpha={alpha_label(report.alpha)} "
        f"backend={report.backend} seed={report.seed}",
        f"post-selection success={num(report.success_prob, 6)}",
        "",
    ]
    for r in report.rows:
        lines.append(f"  {r.tour} count={r.count} freq={fixed(r.frequency, 6)} p={fixed(r.probability, 6)}"
                     f" dev={r.deviation:+.6f}")
    lines += ["", f"max |empirical - analytic| = {fixed(report.max_abs_deviation, 6)}"]
    return "\n".join(lines) + "\n"


def render_sweep(report: SweepReport) -> str:
    frame = pd.DataFrame([r.model_dump() for r in report.rows])
    return f"sweep n={report.n} k={report.k:g}\n" + frame.to_string(index=False) + "\n"


def render_compare(table: ComparisonTable) -> str:
    head = (f"compare n={table.n} alpha={alpha_label(table.alpha)} optimum D={length(table.optimal_distance)} "
            f"over {len(table.seeds)} seeds")
    return head + "\n" + table.to_frame().to_string() + "\n"

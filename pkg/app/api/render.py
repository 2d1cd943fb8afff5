"""Human, CSV and JSON renderings of solver results.

Machine formats carry 12 significant digits and fixed column/key order; human output 6.
"""
import csv
import io
import json
from typing import Any, Dict, List, Sequence

from app import __version__
from app.api.schemas import (
    BifurcationRow,
    CriticalReport,
    InvariantSet,
    ModelParams,
    SolutionSet,
    TheoremReport,
)

SOLUTION_COLUMNS = ["class", "z1", "z2", "z7", "z8", "x", "y", "residual", "tangent"]
SCAN_COLUMNS = ["lambda", "n_total", "n_ti", "n_wp", "tangent", "coordinates"]
CRITICAL_FIELDS = ["lambda_cr", "x_star", "convex", "s_minus", "s_plus", "lambda_minus", "lambda_plus"]


def num(value: float) -> str:
    return f"{value:.12g}"


def human(value: float) -> str:
    return f"{value:.6g}"


def _round(value: float) -> float:
    return float(num(value))


def _write_csv(header: Sequence[str], rows: List[List[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def params_payload(params: ModelParams, invariant_set: InvariantSet) -> Dict[str, Any]:
    return {"k": params.k, "i": params.i, "lambda": _round(params.lam), "set": invariant_set.value}


def solution_set_json(result: SolutionSet) -> str:
    solutions = [
        {
            "class": s.solution_class.value,
            "law": {name: _round(v) for name, v in s.law.model_dump().items()},
            "reduced": {"x": _round(s.reduced.x), "y": _round(s.reduced.y)},
            "residual": _round(s.residual),
            "tangent": s.tangent,
        }
        for s in result.solutions
    ]
    return _dumps({
        "params": params_payload(result.params, result.invariant_set),
        "solutions": solutions,
        "version": __version__,
    })


def solution_set_csv(result: SolutionSet) -> str:
    rows = []
    for s in result.solutions:
        law = s.law
        rows.append([
            s.solution_class.value,
            num(law.z1), num(law.z2), num(law.z7), num(law.z8),
            num(s.reduced.x), num(s.reduced.y),
            num(s.residual),
            str(s.tangent).lower(),
        ])
    return _write_csv(SOLUTION_COLUMNS, rows)


def solution_set_human(result: SolutionSet) -> str:
    p = result.params
    lines = [
        f"{result.invariant_set.value}  k={p.k} i={p.i} lambda={human(p.lam)}: "
        f"{len(result.solutions)} solution(s), {result.n_ti} TI, {result.n_wp} WP",
    ]
    for s in result.solutions:
        z = s.law
        flag = "  tangent" if s.tangent else ""
        lines.append(
            f"  {s.solution_class.value:<2}  z=({human(z.z1)}, {human(z.z2)}, {human(z.z7)}, {human(z.z8)})"
            f"  (x, y)=({human(s.reduced.x)}, {human(s.reduced.y)})  residual={s.residual:.1e}{flag}"
        )
    if not result.oracle_agrees:
        lines.append(f"  note: solver found {result.solver_count}, grid oracle {result.oracle_count}")
    return "\n".join(lines) + "\n"


def _coordinates(row: BifurcationRow) -> str:
    return ";".join(f"{num(p.x)} {num(p.y)}" for p in row.coordinates)


def scan_csv(rows: Sequence[BifurcationRow]) -> str:
    return _write_csv(
        SCAN_COLUMNS,
        [[num(r.lam), r.n_total, r.n_ti, r.n_wp, str(r.tangent).lower(), _coordinates(r)] for r in rows],
    )


def scan_json(params: ModelParams, invariant_set: InvariantSet, rows: Sequence[BifurcationRow]) -> str:
    payload_rows = [
        {
            "lambda": _round(r.lam),
            "n_total": r.n_total,
            "n_ti": r.n_ti,
            "n_wp": r.n_wp,
            "tangent": r.tangent,
            "coordinates": [[_round(p.x), _round(p.y)] for p in r.coordinates],
        }
        for r in rows
    ]
    params_out = {"k": params.k, "i": params.i, "set": invariant_set.value}
    return _dumps({"params": params_out, "rows": payload_rows, "version": __version__})


def scan_human(rows: Sequence[BifurcationRow]) -> str:
    lines = [f"{'lambda':>12}  {'total':>5}  {'TI':>3}  {'WP':>3}"]
    for r in rows:
        flag = "  tangent" if r.tangent else ""
        lines.append(f"{human(r.lam):>12}  {r.n_total:>5}  {r.n_ti:>3}  {r.n_wp:>3}{flag}")
    return "\n".join(lines) + "\n"


def critical_human(report: CriticalReport) -> str:
    lines = [f"case: {report.case}"]
    for name in CRITICAL_FIELDS:
        value = getattr(report, name)
        if value is None:
            continue
        text = str(value).lower() if isinstance(value, bool) else f"{value:#.12g}"
        lines.append(f"{name} = {text}")
    return "\n".join(lines) + "\n"


def critical_json(report: CriticalReport) -> str:
    payload: Dict[str, Any] = {"case": report.case}
    for name in CRITICAL_FIELDS:
        value = getattr(report, name)
        if value is not None:
            payload[name] = value if isinstance(value, bool) else _round(value)
    payload["version"] = __version__
    return _dumps(payload)


def _evidence_text(evidence: Dict[str, Any]) -> str:
    def fmt(v):
        if isinstance(v, float):
            return human(v)
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return str(v)
    return ", ".join(f"{key}={fmt(value)}" for key, value in evidence.items())


def theorem_human(reports: Sequence[TheoremReport]) -> str:
    lines = []
    for report in reports:
        lines.append(f"{report.theorem_id}: {'PASS' if report.passed else 'FAIL'}")
        for check in report.checks:
            lines.append(f"  [{'PASS' if check.passed else 'FAIL'}] {check.name}")
            if check.evidence:
                lines.append(f"         {_evidence_text(check.evidence)}")
    if len(reports) > 1:
        failed = [r.theorem_id for r in reports if not r.passed]
        lines.append(f"{len(reports) - len(failed)}/{len(reports)} passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return "\n".join(lines) + "\n"


def theorem_json(reports: Sequence[TheoremReport]) -> str:
    def clean(v):
        if isinstance(v, float):
            return _round(v)
        if isinstance(v, dict):
            return {key: clean(x) for key, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    payload = {
        "theorems": [
            {
                "id": r.theorem_id,
                "passed": r.passed,
                "checks": [{"name": c.name, "passed": c.passed, "evidence": clean(c.evidence)} for c in r.checks],
            }
            for r in reports
        ],
        "version": __version__,
    }
    return _dumps(payload)

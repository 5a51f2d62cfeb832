"""Stable text renderings: plan JSON/DOT/table, budget JSON/CSV, simulation JSON.

Plan JSON schema::

    {"n": <int>, "colors": <int>, "table": [[...], ...]}

``table`` is the upper triangle: row u (u = 0 .. n-2) lists the wavelengths
linking u to u+1 .. n-1. ``null`` marks a missing link.

All JSON goes through :func:`dumps`, which keeps insertion order and Python's
shortest round-trip float repr so output is byte-stable.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import QRouterError
from .network import NetworkReport
from .photonics import MuxSpec, worst_case_crosstalk_sum
from .transport import Comparison, SimReport
from .wiring import UNASSIGNED, WiringPlan, node_label


class PlanFormatError(QRouterError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _finite(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def plan_to_json(plan: WiringPlan) -> str:
    rows = plan.upper_triangle()[:-1]
    body = ",\n".join("    " + json.dumps(row) for row in rows)
    return ('{\n'
            f'  "n": {plan.n_nodes},\n'
            f'  "colors": {plan.color_count},\n'
            '  "table": [\n'
            f'{body}\n'
            '  ]\n'
            '}\n')


def plan_from_json(text: str) -> WiringPlan:
    """Parse plan JSON. Shape problems raise; content problems are left to verify_plan."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise PlanFormatError("plan must be a JSON object")
    for key in ("n", "colors", "table"):
        if key not in doc:
            raise PlanFormatError(f"missing key {key!r}")
    n, colors, rows = doc["n"], doc["colors"], doc["table"]
    for key, value in (("n", n), ("colors", colors)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise PlanFormatError(f"{key!r} must be an integer")
    if n < 2:
        raise PlanFormatError(f"n must be >= 2, got {n}")
    if not isinstance(rows, list) or len(rows) != n - 1:
        raise PlanFormatError(f"table must have {n - 1} rows")
    table = np.full((n, n), UNASSIGNED, dtype=np.int64)
    for u, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n - 1 - u:
            raise PlanFormatError(f"table row {u} must have {n - 1 - u} entries")
        for k, value in enumerate(row):
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise PlanFormatError(f"table[{u}][{k}] must be a wavelength number or null")
            if value >= 2**62:
                raise PlanFormatError(f"table[{u}][{k}] is out of range")
            v = u + 1 + k
            table[u, v] = table[v, u] = value
    return WiringPlan(n, colors, table)


_PALETTE = 12


def plan_to_dot(plan: WiringPlan) -> str:
    lines = [f"graph router_{plan.n_nodes} {{",
             "  node [shape=circle, style=filled, colorscheme=set312];"]
    for u in range(plan.n_nodes):
        lines.append(f'  {node_label(u)} [fillcolor={u % _PALETTE + 1}];')
    for u, v in plan.pairs():
        w = int(plan.table[u, v])
        if w != UNASSIGNED:
            lines.append(f'  {node_label(u)} -- {node_label(v)} [label="{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def plan_to_table(plan: WiringPlan) -> str:
    """Upper-triangular grid: row u, column v holds the u-v wavelength."""
    n = plan.n_nodes
    labels = [node_label(u) for u in range(n)]
    width = max(len(str(plan.color_count)), max(len(s) for s in labels))
    head = " " * width + "".join(" " + s.rjust(width) for s in labels)
    out = [head.rstrip()]
    for u in range(n):
        cells = []
        for v in range(n):
            w = int(plan.table[u, v])
            cells.append(str(w) if v > u and w != UNASSIGNED else "")
        line = labels[u].ljust(width) + "".join(" " + c.rjust(width) for c in cells)
        out.append(line.rstrip())
    return "\n".join(out) + "\n"


def mux_to_dict(spec: MuxSpec) -> dict:
    out = {
        "channel_count": spec.channel_count,
        "insertion_loss_db": spec.insertion_loss_db,
        # -inf (perfect isolation) is written as null
        "adjacent_crosstalk_db": _finite(spec.adjacent_crosstalk_db),
        "nonadjacent_crosstalk_db": _finite(spec.nonadjacent_crosstalk_db),
    }
    if spec.crosstalk_matrix_db is not None:
        out["crosstalk_matrix_db"] = [list(r) for r in spec.crosstalk_matrix_db]
    return out


def _ratio_entry(ratio: float) -> dict:
    db = 10.0 * math.log10(ratio) if ratio > 0 else None
    return {"ratio": ratio, "db": db}


def budget_to_dict(report: NetworkReport, mux: MuxSpec) -> dict:
    worst = report.worst
    x = worst.sender_loss_db if worst else 0.0
    ref = worst_case_crosstalk_sum(mux, x)
    return {
        "attenuation_db_per_km": report.attenuation_db_per_km,
        "mux": mux_to_dict(mux),
        "policy": {
            "max_loss_budget_db": report.policy.max_loss_budget_db,
            "max_crosstalk_ratio": report.policy.max_crosstalk_ratio,
        },
        "reach": {
            "per_arm_km": report.reach_per_arm_km,
            "end_to_end_km": report.reach_end_to_end_km,
        },
        "summary": {
            "pairs": report.n_pairs,
            "feasible": report.n_feasible,
            "all_feasible": report.all_feasible,
            "worst_pair": [node_label(u) for u in worst.pair] if worst else None,
            "worst_total_loss_db": worst.total_loss_db if worst else None,
        },
        "crosstalk_reference": {
            "signal_channel": ref.signal_channel,
            "pre_router_loss_db": ref.pre_router_loss_db,
            "interferers": mux.channel_count - 1,
            "all_interferers": _ratio_entry(ref.worst_case_sum),
            "index_below_channel_count": _ratio_entry(ref.truncated_index_sum),
            "note": ("all_interferers sums every channel j != i in 1..N; "
                     "index_below_channel_count stops at j = N-1, leaving channel N out"),
        },
        "pairs": [
            {
                "u": node_label(b.pair[0]),
                "v": node_label(b.pair[1]),
                "wavelength": b.wavelength,
                "sender_loss_db": b.sender_loss_db,
                "router_loss_db": b.router_loss_db,
                "receiver_loss_db": b.receiver_loss_db,
                "total_loss_db": b.total_loss_db,
                "crosstalk_sum": b.crosstalk_sum,
                "feasible": b.feasible,
            }
            for b in report.budgets
        ],
    }


def budget_to_csv(report: NetworkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "v", "wavelength", "loss_db", "crosstalk", "feasible"])
    for b in report.budgets:
        writer.writerow([node_label(b.pair[0]), node_label(b.pair[1]), b.wavelength,
                         repr(b.total_loss_db), repr(b.crosstalk_sum),
                         "true" if b.feasible else "false"])
    return buf.getvalue()


def sim_to_dict(report: SimReport, cmp: Comparison) -> dict:
    cfg = report.config
    tallies = {}
    for key, count in report.counts.items():
        tallies[key] = {
            "count": count,
            "fraction": report.fractions[key],
            "standard_error": report.standard_error[key],
            "analytic": report.analytic_expected[key],
            "path_weighted": report.path_weighted[key],
            "z": _finite(cmp.z_scores[key]),
            "tested": cmp.tested[key],
        }
    wrong_to_correct = {}
    for key, row in report.wrong_to_correct.items():
        wrong_to_correct[key] = {**row, "rel_error": cmp.ratio_rel_error[key]}
    return {
        "generator": report.generator,
        "seed": cfg.seed,
        "trials": report.trials,
        "passes": cfg.passes,
        "signal_channel": cfg.signal_channel,
        "weighted": cfg.weighted,
        "spec": mux_to_dict(cfg.spec),
        "tallies": tallies,
        "path_coverage": report.path_coverage,
        "wrong_to_correct": wrong_to_correct,
        "verdict": {
            "threshold_sigma": cmp.threshold,
            "passed": cmp.passed,
            "failures": cmp.failures(),
        },
    }

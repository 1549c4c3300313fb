"""Rendering of traces, reports and Sobol' results as table, CSV or JSON.

Tables and CSV print reals with 6 decimals; JSON keeps full precision.
Infinite values are written as the string ``"inf"`` in every format.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Sequence

import numpy as np

from .community import DetectionTrace
from .metrics import CommunityNetwork
from .sensitivity import SobolResult
from .vulnerability import VulnerabilityReport

PRECISION = 6


def fmt(x: Any, missing: str = "--") -> str:
    if x is None:
        return missing
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{x:.{PRECISION}f}"
    return str(x)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    return obj


_SPECIAL = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _restore(obj: Any, key: str | None = None) -> Any:
    if isinstance(obj, dict):
        return {k: _restore(v, k) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v, key) for v in obj]
    if isinstance(obj, str) and key not in ("members", "chain", "label") and obj in _SPECIAL:
        return _SPECIAL[obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads(text: str) -> Any:
    return _restore(json.loads(text))


def render_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [list(header)] + [[fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(c, missing="") for c in row])
    return buf.getvalue()


# detection trace

_TRACE_HEADER = ("t", "community structure", "Q_t", "dQ_t", "status")


def _trace_rows(trace: DetectionTrace) -> list[list[Any]]:
    return [
        [r["t"], r["structure"], r["q"], r["delta_q"], "applied" if r["applied"] else "rejected"]
        for r in trace.rows()
    ]


def trace_to_dict(trace: DetectionTrace) -> dict:
    return {
        "steps": trace.rows(),
        "final": {
            "communities": [list(c) for c in trace.final.communities],
            "labels": trace.final.labels(),
            "q": trace.final_q,
        },
    }


def format_trace(trace: DetectionTrace, fmt_name: str) -> str:
    if fmt_name == "json":
        return dumps(trace_to_dict(trace))
    if fmt_name == "csv":
        return render_csv(_TRACE_HEADER, _trace_rows(trace))
    out = render_table(_TRACE_HEADER, _trace_rows(trace))
    out += f"\nfinal partition: {trace.final.format()}\n"
    out += f"final Q: {fmt(trace.final_q)}\n"
    return out


# vulnerability report

_REPORT_HEADER = (
    "community", "members", "eta_raw", "sigma_raw", "gamma_raw",
    "eta", "sigma", "gamma", "zeta", "xi", "rank",
)


def _report_rows(report: VulnerabilityReport) -> list[list[Any]]:
    return [
        [c.label, " ".join(c.members), c.eta_raw, c.sigma_raw, c.gamma_raw,
         c.eta, c.sigma, c.gamma, c.zeta, c.xi, c.rank]
        for c in report.communities
    ]


def format_report(report: VulnerabilityReport, fmt_name: str) -> str:
    if fmt_name == "json":
        return dumps(report.to_dict())
    if fmt_name == "csv":
        return render_csv(_REPORT_HEADER, _report_rows(report))
    out = render_table(_REPORT_HEADER, _report_rows(report))
    w = f"alpha={fmt(report.alpha)} beta={fmt(report.beta)} chi={fmt(report.chi)} phi={fmt(report.phi)}"
    out += f"\nweights: {w}\n"
    if report.modularity is not None:
        out += f"modularity: {fmt(report.modularity)}\n"
    out += f"delta: {fmt(report.ranking.delta)}\n"
    out += f"fuzzy ranking: [{report.chain()}]\n"
    return out


def report_from_json(text: str) -> VulnerabilityReport:
    return VulnerabilityReport.from_dict(loads(text))


# sobol result

_SOBOL_HEADER = (
    "community", "parameter", "S_i", "S_Ti", "S_i_raw", "S_Ti_raw",
    "se_S_i", "se_S_Ti", "zero_variance", "n", "seed", "range_lo", "range_hi",
)


def _sobol_rows(result: SobolResult) -> list[list[Any]]:
    return [
        [r["community"], r["parameter"], r["first_order"], r["total_effect"],
         r["first_order_raw"], r["total_effect_raw"], r["first_se"], r["total_se"],
         r["zero_variance"], r["n"], r["seed"], r["range"][0], r["range"][1]]
        for r in result.rows()
    ]


def format_sobol(result: SobolResult, fmt_name: str) -> str:
    if fmt_name == "json":
        return dumps(
            {
                "n": result.n,
                "seed": result.seed,
                "distribution": result.distribution,
                "sampler": result.sampler,
                "range": [result.low, result.high],
                "indices": result.rows(),
            }
        )
    if fmt_name == "csv":
        return render_csv(_SOBOL_HEADER, _sobol_rows(result))
    out = render_table(_SOBOL_HEADER[:9], [r[:9] for r in _sobol_rows(result)])
    out += f"\nsamples: {result.n} per matrix, seed {result.seed}, {result.distribution}, {result.sampler}\n"
    return out


# community network

def format_network(cn: CommunityNetwork, fmt_name: str) -> str:
    if fmt_name == "dot":
        return cn.to_dot()
    if fmt_name == "csv":
        return cn.to_csv()
    if fmt_name == "json":
        return dumps(
            {"labels": cn.labels(), "sizes": list(cn.sizes), "phi": cn.phi, "jsd": cn.jsd, "ad": cn.ad}
        )
    header = ["community", *cn.labels()]
    return render_table(header, [[label, *row] for label, row in zip(cn.labels(), cn.ad)])

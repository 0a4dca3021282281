"""Validation report assembly and deterministic JSON serialization.

The report bundles everything a model validation produces: sample summary,
both ROC curves, the unified calibration test, a residual t-test, and a
binned calibration table.  Serialization is hand-rolled so float formatting
(17 significant digits) and key order are bit-stable across runs, which the
determinism contract requires and the stdlib json module cannot guarantee
for floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from .caltest import CalibrationTestResult, unified_test
from .core import RngStream, ValidationSample
from .roc import RocCurve, empirical_roc, model_roc

SCHEMA_REPORT = "rocval-report/1"
SCHEMA_POWER = "rocval-power/1"


class CalibrationBin(NamedTuple):
    mean_risk: float
    event_rate: float
    count: int


def calibration_bins(sample: ValidationSample, bins: int = 10) -> tuple:
    """Equal-count bins of predicted risk with observed event rates.

    Individuals are sorted by risk and cut into ``bins`` groups of near-equal
    size (the remainder spread over the leading bins); empty groups at tiny n
    are dropped.  Counts always sum to n.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    order = np.argsort(sample.risks, kind="stable")
    edges = np.linspace(0, sample.n, bins + 1).round().astype(int)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi == lo:
            continue
        idx = order[lo:hi]
        out.append(CalibrationBin(
            mean_risk=float(sample.risks[idx].mean()),
            event_rate=float(sample.outcomes[idx].mean()),
            count=int(hi - lo),
        ))
    return tuple(out)


def residual_t_test(sample: ValidationSample) -> float:
    """Two-sided one-sample t-test of the residuals (outcome - risk) against 0."""
    resid = sample.outcomes - sample.risks
    if float(resid.std(ddof=1)) == 0.0:
        # constant residuals: degenerate t; decide by the mean alone
        return 1.0 if float(resid.mean()) == 0.0 else 0.0
    return float(stats.ttest_1samp(resid, 0.0).pvalue)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    event_count: int
    mean_risk: float
    empirical_curve: RocCurve
    model_curve: RocCurve
    test: CalibrationTestResult
    t_test_p: float
    bins: tuple
    source_path: Optional[str]
    source_sha256: Optional[str]
    version: str

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_REPORT,
            "sample": {
                "n": self.n,
                "event_count": self.event_count,
                "mean_predicted_risk": self.mean_risk,
            },
            "curves": {
                "empirical": _curve_dict(self.empirical_curve),
                "model_based": _curve_dict(self.model_curve),
            },
            "test": {
                "stat_mean_calibration": self.test.stat_a,
                "stat_roc_equality": self.test.stat_b,
                "p_mean_calibration": self.test.p_a,
                "p_roc_equality": self.test.p_b,
                "stat_unified": self.test.stat_u,
                "brown_scale": self.test.brown_c,
                "brown_df": self.test.brown_k,
                "p_unified": self.test.p_unified,
                "n_sims": self.test.n_sims,
                "seed": self.test.seed,
            },
            "t_test_p": self.t_test_p,
            "calibration_bins": [
                {"mean_risk": b.mean_risk, "event_rate": b.event_rate, "count": b.count}
                for b in self.bins
            ],
            "provenance": {
                "source_path": self.source_path,
                "source_sha256": self.source_sha256,
                "seed": self.test.seed,
                "n_sims": self.test.n_sims,
                "tool_version": self.version,
            },
        }


def _curve_dict(curve: RocCurve) -> dict:
    return {
        "kind": curve.kind.value,
        "auc": curve.auc,
        "points": [[float(f), float(t)] for f, t in curve.points],
    }


def build_report(sample: ValidationSample, n_sims: int, rng: RngStream,
                 bins: int = 10, source_path: Optional[str] = None,
                 source_sha256: Optional[str] = None) -> ValidationReport:
    """Run the full validation pipeline on one sample."""
    from . import __version__

    return ValidationReport(
        n=sample.n,
        event_count=sample.case_count,
        mean_risk=float(sample.risks.mean()),
        empirical_curve=empirical_roc(sample),
        model_curve=model_roc(sample.risks),
        test=unified_test(sample, n_sims, rng),
        t_test_p=residual_t_test(sample),
        bins=calibration_bins(sample, bins),
        source_path=source_path,
        source_sha256=source_sha256,
        version=__version__,
    )


def power_table_dict(table) -> dict:
    rows = []
    for row in table.rows:
        sc = row.scenario
        rows.append({
            "family": sc.family.value,
            "a": sc.a,
            "b": sc.b,
            "n": sc.n,
            "predictor_mean": sc.predictor_mean,
            "predictor_sd": sc.predictor_sd,
            "panel": sc.panel,
            "reject_mean_calibration": row.reject_mean_cal,
            "reject_roc_equality": row.reject_roc_eq,
            "reject_unified": row.reject_unified,
            "reject_lrt": row.reject_lrt,
            "lrt_failures": row.lrt_failures,
        })
    return {
        "schema": SCHEMA_POWER,
        "alpha": table.alpha,
        "outer_reps": table.outer_reps,
        "inner_sims": table.inner_sims,
        "seed": table.seed,
        "rows": rows,
    }


def dump_json(value) -> str:
    """Serialize with stable key order and 17-significant-digit floats."""
    pieces = []
    _write_json(value, pieces)
    return "".join(pieces) + "\n"


def _write_json(value, out: list) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(_quote(value))
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(format_float(float(value)))
    elif isinstance(value, dict):
        out.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(_quote(str(k)))
            out.append(":")
            _write_json(v, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, v in enumerate(value):
            if i:
                out.append(",")
            _write_json(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    return f"{x:.17g}"


def _quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)

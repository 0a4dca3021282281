"""Empirical and model-based ROC curves with exact step-function geometry.

Both curve flavors are built from a pair of cumulative distribution functions
of the predicted risk: the empirical pair counts individuals in the observed
case/control groups, while the model-based pair weights every individual by
``risk`` (as a fractional case) and ``1 - risk`` (as a fractional control),
reading no outcomes at all.  The model-based curve is the ROC that would be
expected if the predicted risks were the truth, so comparing it with the
empirical curve separates case-mix effects from miscalibration.

Two area conventions coexist deliberately:

* ``RocCurve.auc`` uses the trapezoidal rule, which matches the Mann-Whitney
  concordance (c-statistic) exactly, ties earning half credit.
* Integration of curve *differences* (see :mod:`rocval.caltest`) evaluates the
  curves as right-continuous step functions, where the area is an exact sum of
  rectangles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import ValidationSample, validate_risks
from .errors import AllOneRisksError, AllZeroRisksError, DegenerateSampleError

_AUC_TOL = 1e-12
_CDF_END_TOL = 1e-12


class CurveKind(enum.Enum):
    EMPIRICAL = "empirical"
    MODEL_BASED = "model-based"


def _group_starts(sorted_values: np.ndarray) -> np.ndarray:
    """Indices where each run of equal values begins (exact equality)."""
    if sorted_values.shape[0] == 0:
        return np.empty(0, dtype=np.intp)
    return np.flatnonzero(np.r_[True, sorted_values[1:] != sorted_values[:-1]])


@dataclass(frozen=True)
class WeightedCdfPair:
    """Positive- and negative-group CDFs of the risk, on a shared threshold grid.

    ``cdf1[j]`` is the positive-group probability mass at risks <= thresholds[j];
    ``cdf0[j]`` the negative-group analogue.  Thresholds are the sorted distinct
    risk values, so both CDFs end at exactly 1.
    """

    thresholds: np.ndarray
    cdf1: np.ndarray
    cdf0: np.ndarray

    def __post_init__(self):
        t, c1, c0 = self.thresholds, self.cdf1, self.cdf0
        if not (t.shape == c1.shape == c0.shape):
            raise ValueError("thresholds, cdf1 and cdf0 must have matching lengths")
        if t.shape[0] == 0:
            raise ValueError("at least one threshold required")
        if np.any(np.diff(t) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        for name, c in (("cdf1", c1), ("cdf0", c0)):
            if np.any(np.diff(c) < 0) or c[0] < 0:
                raise ValueError(f"{name} must be non-decreasing and non-negative")
            if abs(c[-1] - 1.0) > _CDF_END_TOL:
                raise ValueError(f"{name} must end at 1, ends at {c[-1]!r}")


@dataclass(frozen=True)
class RocCurve:
    """An ROC curve as an ordered set of (fpr, tpr) breakpoints plus its AUC.

    Points run from (0, 0) to (1, 1) with both coordinates non-decreasing.
    ``auc`` is the trapezoidal area under the polyline through the points.
    """

    points: np.ndarray
    auc: float
    kind: CurveKind

    def __post_init__(self):
        pts = self.points
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("points must be a (k, 2) array with k >= 2")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("curve points must lie in the unit square")
        if np.any(np.diff(pts[:, 0]) < 0) or np.any(np.diff(pts[:, 1]) < 0):
            raise ValueError("fpr and tpr must be non-decreasing along the curve")
        if tuple(pts[0]) != (0.0, 0.0) or tuple(pts[-1]) != (1.0, 1.0):
            raise ValueError("curve must start at (0,0) and end at (1,1)")
        if abs(self.auc - _trapezoid_area(pts)) > _AUC_TOL:
            raise ValueError("stored auc does not match the trapezoidal area of points")

    @property
    def fprs(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def tprs(self) -> np.ndarray:
        return self.points[:, 1]

    def step_breakpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct fpr values with the topmost tpr at each (step representation)."""
        fpr = self.points[:, 0]
        last = np.flatnonzero(np.r_[fpr[1:] != fpr[:-1], True])
        return fpr[last], self.points[last, 1]

    def tpr_at(self, t):
        """Evaluate the curve as a right-continuous step function of fpr.

        Returns the tpr of the last breakpoint with fpr <= t, which equals the
        classical composition 1 - F1(F0^{-1}(1 - t)).  Accepts scalars or arrays.
        """
        uf, uv = self.step_breakpoints()
        t_arr = np.asarray(t, dtype=np.float64)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise ValueError("fpr argument must lie in [0, 1]")
        idx = np.searchsorted(uf, t_arr, side="right") - 1
        out = uv[idx]
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def _trapezoid_area(points: np.ndarray) -> float:
    return float(np.trapezoid(points[:, 1], points[:, 0]))


def empirical_cdfs(sample: ValidationSample) -> WeightedCdfPair:
    """Per-group empirical CDFs of the risk over the sorted distinct risk values.

    ``cdf1[j]`` is the fraction of cases with risk <= thresholds[j]; ``cdf0``
    the fraction of controls.  Requires both outcome classes to be present.
    """
    n1 = sample.case_count
    n0 = sample.control_count
    if n1 == 0 or n0 == 0:
        raise DegenerateSampleError("empirical ROC needs at least one case and one control")
    order = np.argsort(sample.risks, kind="stable")
    s = sample.risks[order]
    y = sample.outcomes[order]
    starts = _group_starts(s)
    cases = np.add.reduceat(y, starts)
    totals = np.diff(np.r_[starts, s.shape[0]])
    cdf1 = np.cumsum(cases) / n1
    cdf0 = np.cumsum(totals - cases) / n0
    return WeightedCdfPair(thresholds=s[starts], cdf1=cdf1, cdf0=cdf0)


def model_based_cdfs(risks) -> WeightedCdfPair:
    """Risk-weighted CDFs implied by the predicted risks alone.

    Each individual contributes mass ``risk_i`` to the positive group and
    ``1 - risk_i`` to the negative group; no outcome values are read.
    """
    p = validate_risks(risks)
    order = np.argsort(p, kind="stable")
    s = p[order]
    starts = _group_starts(s)
    w1 = np.cumsum(np.add.reduceat(s, starts))
    w0 = np.cumsum(np.add.reduceat(1.0 - s, starts))
    if w1[-1] == 0.0:
        raise AllZeroRisksError("model-based ROC undefined when every risk is 0")
    if w0[-1] == 0.0:
        raise AllOneRisksError("model-based ROC undefined when every risk is 1")
    return WeightedCdfPair(thresholds=s[starts], cdf1=w1 / w1[-1], cdf0=w0 / w0[-1])


def curve_from_cdfs(cdfs: WeightedCdfPair, kind: CurveKind) -> RocCurve:
    """Assemble the ROC breakpoints (1 - cdf0, 1 - cdf1), highest threshold first.

    The walk from the largest threshold down sweeps fpr from 0 to 1; a (0, 0)
    prefix and (1, 1) suffix close the curve and consecutive duplicate points
    are collapsed.
    """
    fpr = np.concatenate(([0.0], (1.0 - cdfs.cdf0)[::-1], [1.0]))
    tpr = np.concatenate(([0.0], (1.0 - cdfs.cdf1)[::-1], [1.0]))
    keep = np.r_[True, (np.diff(fpr) != 0.0) | (np.diff(tpr) != 0.0)]
    points = np.column_stack((fpr[keep], tpr[keep]))
    points.setflags(write=False)
    return RocCurve(points=points, auc=_trapezoid_area(points), kind=kind)


def empirical_roc(sample: ValidationSample) -> RocCurve:
    """The empirical ROC curve of a sample."""
    return curve_from_cdfs(empirical_cdfs(sample), CurveKind.EMPIRICAL)


def model_roc(risks) -> RocCurve:
    """The model-based ROC curve implied by a risk vector (outcomes unused)."""
    return curve_from_cdfs(model_based_cdfs(risks), CurveKind.MODEL_BASED)


def auc_concordance(sample: ValidationSample) -> float:
    """Mann-Whitney concordance: P(case risk > control risk) + half P(tie).

    Computed from average ranks in O(n log n); serves as an independent
    cross-check of the trapezoidal curve AUC, to which it is identical.
    """
    n1 = sample.case_count
    n0 = sample.control_count
    if n1 == 0 or n0 == 0:
        raise DegenerateSampleError("concordance needs at least one case and one control")
    risks = sample.risks
    order = np.argsort(risks, kind="stable")
    s = risks[order]
    starts = _group_starts(s)
    stops = np.r_[starts[1:], s.shape[0]]
    # average 1-based rank within each tie group
    avg_rank = (starts + 1 + stops) / 2.0
    ranks = np.empty(s.shape[0])
    ranks[order] = np.repeat(avg_rank, stops - starts)
    rank_sum = ranks[sample.outcomes == 1].sum()
    u_stat = rank_sum - n1 * (n1 + 1) / 2.0
    return float(u_stat / (n1 * n0))

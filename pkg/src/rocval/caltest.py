"""Simulation-based calibration test combining mean calibration and ROC equality.

The test works from two observable discrepancies: the absolute mean residual
between outcomes and predicted risks (sensitive to calibration-in-the-large)
and the exact area between the empirical ROC and the model-based ROC
(sensitive to shape miscalibration that leaves the mean intact).  Neither
statistic has a tractable analytic null, so both are referred to a Monte Carlo
null distribution obtained by redrawing outcomes from the predicted risks
themselves, which is exactly the hypothesis under test: that the risks are the
true outcome probabilities.

The two p-values are merged with Fisher's statistic, rescaled for dependence
(the two statistics share the same data) by matching the first two moments of
the combined statistic across the same null replicates to a scaled chi-square.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import RngStream, ValidationSample, validate_risks
from .errors import DegenerateSampleError, DomainError, InvalidSimsError
from .roc import RocCurve, empirical_roc, model_roc

_CHUNK = 512


def mean_calibration_stat(sample: ValidationSample) -> float:
    """Absolute mean residual |sum(outcome - risk)| / n."""
    resid = sample.outcomes - sample.risks
    return abs(float(resid.sum())) / sample.n


def area_between_step_curves(curve_a: RocCurve, curve_b: RocCurve) -> float:
    """Exact integral of |tpr_a(t) - tpr_b(t)| dt over t in [0, 1].

    Both curves are evaluated as right-continuous step functions on the merged
    grid of their fpr breakpoints, so the integral is a finite sum of
    rectangles with no quadrature error.
    """
    fa, va = curve_a.step_breakpoints()
    fb, vb = curve_b.step_breakpoints()
    grid = np.union1d(fa, fb)
    ya = va[np.searchsorted(fa, grid, side="right") - 1]
    yb = vb[np.searchsorted(fb, grid, side="right") - 1]
    widths = np.diff(grid)
    return float(np.sum(widths * np.abs(ya[:-1] - yb[:-1])))


def roc_equality_stat(sample: ValidationSample) -> float:
    """Exact area between the sample's empirical ROC and its model-based ROC."""
    return area_between_step_curves(empirical_roc(sample), model_roc(sample.risks))


@dataclass(frozen=True)
class NullDistribution:
    """Monte Carlo null values of the two statistics and their combination.

    ``u_values`` stay zeroed until :func:`fill_unified_stats` computes the
    per-replicate combined statistics against these same vectors.
    """

    a_values: np.ndarray
    b_values: np.ndarray
    u_values: np.ndarray
    n_sims: int
    seed: int
    stream_id: int

    def __post_init__(self):
        if self.n_sims < 2:
            raise ValueError("null distribution needs at least 2 replicates")
        for name, v in (("a_values", self.a_values),
                        ("b_values", self.b_values),
                        ("u_values", self.u_values)):
            if v.shape != (self.n_sims,):
                raise ValueError(f"{name} must have length n_sims")
            if v.min() < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class CalibrationTestResult:
    """Everything the unified test produces, including its two components."""

    stat_a: float
    stat_b: float
    p_a: float
    p_b: float
    stat_u: float
    brown_c: float
    brown_k: float
    p_unified: float
    n_sims: int
    seed: int

    def __post_init__(self):
        for name in ("p_a", "p_b", "p_unified"):
            p = getattr(self, name)
            if not 0.0 < p <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {p!r}")
        if abs(self.stat_u + 2.0 * (math.log(self.p_a) + math.log(self.p_b))) > 1e-10:
            raise ValueError("stat_u inconsistent with -2(ln p_a + ln p_b)")


class _NullEngine:
    """Precomputed geometry for redrawing outcomes against a fixed risk vector.

    Sorting, tie-group boundaries, and the model-based curve depend only on
    the risks, so they are computed once; each batch of simulated outcome
    matrices then reduces to group count aggregation plus one argsort sweep
    that merges the fixed model breakpoints with each replicate's empirical
    breakpoints.
    """

    def __init__(self, risks):
        p = validate_risks(risks)
        self.n = p.shape[0]
        self.p = p
        self.sum_p = float(p.sum())
        self.order = np.argsort(p, kind="stable")
        s = p[self.order]
        self.starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
        self.m = self.starts.shape[0]
        counts = np.diff(np.r_[self.starts, self.n])
        self.cum_counts = np.cumsum(counts)
        # model curve as step events ascending in fpr, terminal (1, 1) included
        model = model_roc(p)
        f_mod, v_mod = model.step_breakpoints()
        self.model_events = np.vstack((f_mod, v_mod))

    def batch_stats(self, outcome_rows: np.ndarray, first_index: int):
        """Mean-calibration and ROC-equality statistics for a batch of outcome rows."""
        rows = outcome_rows.shape[0]
        ys = outcome_rows[:, self.order]
        cum1 = np.cumsum(np.add.reduceat(ys, self.starts, axis=1), axis=1)
        n1 = cum1[:, -1]
        single_class = (n1 == 0) | (n1 == self.n)
        if single_class.any():
            i = first_index + int(np.flatnonzero(single_class)[0])
            raise DegenerateSampleError(
                f"null replicate {i} drew a single-class outcome vector")
        a_vals = np.abs(n1 - self.sum_p) / self.n
        cum0 = self.cum_counts - cum1
        n0 = self.n - n1
        # empirical step events per row: breakpoints at each distinct risk,
        # highest threshold first, plus the terminal (1, 1)
        m = self.m
        fe = np.empty((rows, m + 1))
        ve = np.empty((rows, m + 1))
        fe[:, :m] = (n0[:, None] - cum0[:, ::-1]) / n0[:, None]
        ve[:, :m] = (n1[:, None] - cum1[:, ::-1]) / n1[:, None]
        fe[:, m] = 1.0
        ve[:, m] = 1.0
        b_vals = self._merged_area(fe, ve)
        return a_vals, b_vals

    def _merged_area(self, fe: np.ndarray, ve: np.ndarray) -> np.ndarray:
        """Row-wise exact area between each empirical step curve and the model curve.

        Both event lists are already sorted by fpr, so the merge is computed by
        scatter: each empirical event lands at (own index + count of model
        events strictly below it) and model events fill the remaining slots in
        order, which reproduces a stable merge with empirical events first on
        ties.  A running maximum over each tpr channel (seeded with a -1
        sentinel on the other curve's slots) recovers the step value of both
        curves on every merged interval; the sentinel only survives across
        zero-width intervals, so it never contributes area.
        """
        rows, ke = fe.shape
        f_mod, v_mod = self.model_events
        km = f_mod.shape[0]
        merged = ke + km
        pos_e = np.searchsorted(f_mod, fe) + np.arange(ke)
        f_run = np.empty((rows, merged))
        ve_run = np.full((rows, merged), -1.0)
        vm_run = np.full((rows, merged), -1.0)
        np.put_along_axis(f_run, pos_e, fe, axis=1)
        np.put_along_axis(ve_run, pos_e, ve, axis=1)
        model_slots = np.ones((rows, merged), dtype=bool)
        np.put_along_axis(model_slots, pos_e, False, axis=1)
        f_run[model_slots] = np.broadcast_to(f_mod, (rows, km)).reshape(-1)
        vm_run[model_slots] = np.broadcast_to(v_mod, (rows, km)).reshape(-1)
        np.maximum.accumulate(ve_run, axis=1, out=ve_run)
        np.maximum.accumulate(vm_run, axis=1, out=vm_run)
        widths = np.diff(f_run, axis=1)
        return np.sum(widths * np.abs(ve_run[:, :-1] - vm_run[:, :-1]), axis=1)


def simulate_null(risks, n_sims: int, rng: RngStream) -> NullDistribution:
    """Null distributions of both statistics under outcomes redrawn from the risks.

    Each replicate draws its Bernoulli outcomes from an independent sub-stream
    keyed by the replicate index, so the result does not depend on execution
    order or batching.  ``u_values`` are zeroed; see :func:`fill_unified_stats`.
    """
    if n_sims < 2:
        raise InvalidSimsError("n_sims must be at least 2")
    engine = _NullEngine(risks)
    a_vals = np.empty(n_sims)
    b_vals = np.empty(n_sims)
    for lo in range(0, n_sims, _CHUNK):
        hi = min(lo + _CHUNK, n_sims)
        outcome_rows = np.empty((hi - lo, engine.n), dtype=np.int64)
        for i in range(lo, hi):
            g = rng.child(i).generator()
            outcome_rows[i - lo] = g.random(engine.n) < engine.p
        a_vals[lo:hi], b_vals[lo:hi] = engine.batch_stats(outcome_rows, first_index=lo)
    for v in (a_vals, b_vals):
        v.setflags(write=False)
    u_zero = np.zeros(n_sims)
    u_zero.setflags(write=False)
    return NullDistribution(a_values=a_vals, b_values=b_vals, u_values=u_zero,
                            n_sims=n_sims, seed=rng.seed, stream_id=rng.stream_id)


def mc_p_value(observed: float, null_values) -> float:
    """Monte Carlo p-value: count(null >= observed)/N, floored at 1/N.

    Ties count toward the p-value, and the floor keeps logarithms finite when
    the observed statistic exceeds every simulated value.
    """
    v = np.asarray(null_values, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 2:
        raise ValueError("null_values must be a vector of length >= 2")
    count = int(np.count_nonzero(v >= observed))
    return max(count, 1) / v.shape[0]


def fill_unified_stats(null: NullDistribution) -> NullDistribution:
    """Copy of ``null`` with per-replicate combined statistics computed.

    Each replicate's own p-values are read off the full empirical CDFs of
    ``a_values`` and ``b_values`` (the replicate included, with the same 1/N
    floor as :func:`mc_p_value`), then combined as -2(ln p_a + ln p_b).
    """
    n = null.n_sims
    u = -2.0 * (_member_log_p(null.a_values, n) + _member_log_p(null.b_values, n))
    u.setflags(write=False)
    return dataclasses.replace(null, u_values=u)


def _member_log_p(values: np.ndarray, n: int) -> np.ndarray:
    ordered = np.sort(values)
    exceed = n - np.searchsorted(ordered, values, side="left")
    return np.log(np.maximum(exceed, 1) / n)


def unified_test(sample: ValidationSample, n_sims: int, rng: RngStream) -> CalibrationTestResult:
    """Run the full combined calibration test on one validation sample.

    Steps: compute both observed statistics; simulate the joint null by
    redrawing outcomes from the risks; convert to Monte Carlo p-values;
    combine as stat_u = -2(ln p_a + ln p_b); rescale stat_u against the
    moments of the same combination across the null replicates (scaled
    chi-square with fitted scale c and degrees of freedom k); report
    p_unified = 1 - ChiSquareCDF(stat_u / c; k), clamped away from zero.
    """
    if n_sims < 100:
        raise InvalidSimsError(f"n_sims must be at least 100, got {n_sims}")
    stat_a = mean_calibration_stat(sample)
    stat_b = roc_equality_stat(sample)
    null = fill_unified_stats(simulate_null(sample.risks, n_sims, rng))
    p_a = mc_p_value(stat_a, null.a_values)
    p_b = mc_p_value(stat_b, null.b_values)
    stat_u = -2.0 * (math.log(p_a) + math.log(p_b))
    mean_u = float(null.u_values.mean())
    var_u = float(null.u_values.var(ddof=1))
    if var_u > 0.0 and mean_u > 0.0:
        brown_c = var_u / (2.0 * mean_u)
        brown_k = 2.0 * mean_u * mean_u / var_u
    else:
        # all-replicate-identical null; fall back to the independent combination
        brown_c = 1.0
        brown_k = 4.0
    eps = np.finfo(np.float64).eps
    p_unified = 1.0 - chi_square_cdf(stat_u / brown_c, brown_k)
    p_unified = min(max(p_unified, eps), 1.0)
    return CalibrationTestResult(stat_a=stat_a, stat_b=stat_b, p_a=p_a, p_b=p_b,
                                 stat_u=stat_u, brown_c=brown_c, brown_k=brown_k,
                                 p_unified=p_unified, n_sims=n_sims, seed=rng.seed)


def chi_square_cdf(x: float, k: float) -> float:
    """Chi-square CDF with (possibly fractional) degrees of freedom k.

    Equals the regularized lower incomplete gamma function P(k/2, x/2),
    evaluated by the power series for small x and the Lentz continued
    fraction for the complement otherwise.
    """
    if not (x >= 0.0):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if not (k > 0.0):
        raise DomainError(f"k must be > 0, got {k!r}")
    return _reg_lower_gamma(k / 2.0, x / 2.0)


def _reg_lower_gamma(a: float, x: float) -> float:
    if x == 0.0:
        return 0.0
    log_prefix = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        # series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a (a+1) ... (a+n))
        denom = a
        term = 1.0 / a
        total = term
        for _ in range(10_000):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return min(max(total * math.exp(log_prefix), 0.0), 1.0)
    # modified Lentz continued fraction for Q(a,x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    q = math.exp(log_prefix) * h
    return min(max(1.0 - q, 0.0), 1.0)

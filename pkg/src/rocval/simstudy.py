"""Synthetic validation scenarios and the power-study harness.

Every scenario draws a standard logistic data-generating process: a normal
predictor X, true outcome probability logistic of a linear (or distorted)
function of X, and a predicted risk that may be deliberately miscalibrated.
The returned samples contain outcomes and predicted risks only, exactly what
an external validation would see.

Families:

* ``LOGIT_LINEAR``: logit of predicted risk = a + b * logit(true risk).
  a=0, b=1 is calibrated by construction.
* ``SIGN_POWER``: logit of predicted risk = a + b * sign(X) * |X|^(1/b),
  an odd monotone distortion that preserves the mean predicted risk at a=0
  while bending the risk distribution, so it defeats mean-based checks.
* ``SHIFTED_LOGIT_LINEAR``: the logit-linear family with the predictor
  centered at -2, giving a rare-outcome population (prevalence ~0.155).
* ``CASE_MIX_PRESET``: four fixed panels (A-D) crossing predictor dispersion
  with miscalibration, for studying case-mix effects on the ROC.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .caltest import chi_square_cdf, unified_test
from .core import RngStream, ValidationSample, bernoulli_draw, make_sample
from .errors import (
    InfiniteLogitError,
    InvalidScenarioError,
    InvalidSimsError,
    NonConvergenceError,
    SeparationDetectedError,
)

ALPHA = 0.05

_PRESET_PANELS = {
    # panel: (predictor sd, true-risk slope on X)
    "A": (1.0, 1.0),
    "B": (0.5, 1.0),
    "C": (1.0, 0.5),
    "D": (0.5, 0.5),
}


class ScenarioFamily(enum.Enum):
    LOGIT_LINEAR = "logit-linear"
    SIGN_POWER = "sign-power"
    SHIFTED_LOGIT_LINEAR = "shifted-logit-linear"
    CASE_MIX_PRESET = "case-mix-preset"


@dataclass(frozen=True)
class Scenario:
    """One data-generating configuration; see the module docstring for families."""

    family: ScenarioFamily
    a: float
    b: float
    n: int
    predictor_mean: float
    predictor_sd: float
    panel: Optional[str] = None

    def __post_init__(self):
        if self.n < 10:
            raise InvalidScenarioError(f"sample size must be >= 10, got {self.n}")
        if not self.predictor_sd > 0:
            raise InvalidScenarioError("predictor_sd must be positive")
        if self.family is ScenarioFamily.SIGN_POWER and not self.b > 0:
            raise InvalidScenarioError("sign-power family requires b > 0")
        if self.family is ScenarioFamily.CASE_MIX_PRESET:
            if self.panel not in _PRESET_PANELS:
                raise InvalidScenarioError(f"panel must be one of A-D, got {self.panel!r}")
        elif self.panel is not None:
            raise InvalidScenarioError("panel applies only to the case-mix-preset family")


def make_scenario(family, a: float = 0.0, b: float = 1.0, *, n: int,
                  predictor_mean: Optional[float] = None,
                  predictor_sd: Optional[float] = None,
                  panel: Optional[str] = None) -> Scenario:
    """Build a scenario with per-family defaults filled in.

    ``family`` may be a ScenarioFamily or its string value.  The shifted
    family defaults the predictor mean to -2; everything else to 0.  Case-mix
    panels fix their own dispersion unless explicitly overridden.
    """
    fam = family if isinstance(family, ScenarioFamily) else _family_from_name(family)
    mean = predictor_mean
    sd = predictor_sd
    if mean is None:
        mean = -2.0 if fam is ScenarioFamily.SHIFTED_LOGIT_LINEAR else 0.0
    if sd is None:
        if fam is ScenarioFamily.CASE_MIX_PRESET and panel in _PRESET_PANELS:
            sd = _PRESET_PANELS[panel][0]
        else:
            sd = 1.0
    return Scenario(family=fam, a=a, b=b, n=n, predictor_mean=mean,
                    predictor_sd=sd, panel=panel)


def _family_from_name(name: str) -> ScenarioFamily:
    for fam in ScenarioFamily:
        if fam.value == name:
            return fam
    known = ", ".join(f.value for f in ScenarioFamily)
    raise InvalidScenarioError(f"unknown scenario family {name!r} (known: {known})")


def _logistic(eta: np.ndarray) -> np.ndarray:
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p) - np.log1p(-p)


def generate_with_truth(scenario: Scenario, rng: RngStream):
    """Draw one scenario realization, keeping the true risks.

    Returns ``(sample, true_risks)``.  The predictor and the outcome noise
    come from separate sub-streams, so scenarios that share
    (predictor_mean, predictor_sd, n) and a stream see identical X and Y
    draws regardless of their risk-map parameters.
    """
    x = rng.child(0).generator().normal(scenario.predictor_mean,
                                        scenario.predictor_sd, scenario.n)
    fam = scenario.family
    if fam is ScenarioFamily.CASE_MIX_PRESET:
        true_slope = _PRESET_PANELS[scenario.panel][1]
        true_risk = _logistic(true_slope * x)
        predicted = _logistic(x)
    else:
        true_risk = _logistic(x)
        if fam is ScenarioFamily.SIGN_POWER:
            eta = scenario.a + scenario.b * np.sign(x) * np.abs(x) ** (1.0 / scenario.b)
        else:
            # logit-linear (possibly shifted): logit(true risk) is x itself
            eta = scenario.a + scenario.b * x
        predicted = _logistic(eta)
    outcomes = bernoulli_draw(true_risk, rng.child(1))
    return make_sample(outcomes, predicted), true_risk


def generate_dataset(scenario: Scenario, rng: RngStream) -> ValidationSample:
    """Draw one validation sample (outcomes, predicted risks) from a scenario."""
    sample, _ = generate_with_truth(scenario, rng)
    return sample


def case_mix_preset(panel: str, n: int, rng: RngStream) -> ValidationSample:
    """Draw one of the four fixed case-mix panels (see module docstring)."""
    return generate_dataset(make_scenario(ScenarioFamily.CASE_MIX_PRESET,
                                          n=n, panel=panel), rng)


class LogisticFit(NamedTuple):
    alpha: float
    beta: float
    loglik: float


def _bernoulli_loglik(outcomes: np.ndarray, eta: np.ndarray) -> float:
    return float(np.sum(outcomes * eta - np.logaddexp(0.0, eta)))


def fit_logistic_2param(sample: ValidationSample) -> LogisticFit:
    """Newton-Raphson fit of outcome on logit(predicted risk) with intercept.

    The model is logit P(Y=1) = alpha + beta * logit(risk).  Converged when
    every score component is below 1e-8 in absolute value; estimates walking
    past |50| are declared separated.
    """
    risks = sample.risks
    if risks.min() <= 0.0 or risks.max() >= 1.0:
        raise InfiniteLogitError("risks must lie strictly inside (0, 1) to take logits")
    if sample.case_count == 0 or sample.control_count == 0:
        raise SeparationDetectedError("single-class sample, estimates diverge")
    y = sample.outcomes
    # no finite maximum when the class risk ranges do not interlock (the slope
    # walks to infinity); the all-tied ridge is fine, beta is just inert there
    case_risks = risks[y == 1]
    ctrl_risks = risks[y == 0]
    separated = (case_risks.min() >= ctrl_risks.max()
                 or case_risks.max() <= ctrl_risks.min())
    if separated and risks.min() != risks.max():
        raise SeparationDetectedError("outcome classes separated on the risk scale")
    design = np.column_stack((np.ones(sample.n), _logit(risks)))
    theta = np.array([0.0, 1.0])
    for _ in range(100):
        eta = design @ theta
        mu = _logistic(eta)
        score = design.T @ (y - mu)
        if np.max(np.abs(score)) < 1e-8:
            return LogisticFit(alpha=float(theta[0]), beta=float(theta[1]),
                               loglik=_bernoulli_loglik(y, eta))
        weights = mu * (1.0 - mu)
        hessian = design.T @ (design * weights[:, None])
        try:
            theta = theta + np.linalg.solve(hessian, score)
        except np.linalg.LinAlgError:
            raise NonConvergenceError("singular information matrix") from None
        if abs(theta[0]) > 50.0 or abs(theta[1]) > 50.0:
            raise SeparationDetectedError(
                f"estimates diverged (alpha={theta[0]:.1f}, beta={theta[1]:.1f})")
    raise NonConvergenceError("no convergence in 100 iterations")


def lrt_calibration(sample: ValidationSample) -> float:
    """Likelihood-ratio test of intercept 0 and slope 1 on the logit scale.

    This is the oracle-style recalibration test the simulation study uses as
    the benchmark: it sees the same recalibration model the data were bent
    through, so its power is an upper target for the distribution-free tests.
    """
    fit = fit_logistic_2param(sample)
    loglik_null = _bernoulli_loglik(sample.outcomes, _logit(sample.risks))
    lr_stat = max(0.0, 2.0 * (fit.loglik - loglik_null))
    p = 1.0 - chi_square_cdf(lr_stat, 2.0)
    return max(p, float(np.finfo(np.float64).eps))


@dataclass(frozen=True)
class PowerRow:
    """Rejection rates at level ALPHA for one scenario."""

    scenario: Scenario
    reject_mean_cal: float
    reject_roc_eq: float
    reject_unified: float
    reject_lrt: Optional[float]
    lrt_failures: int

    def __post_init__(self):
        rates = [self.reject_mean_cal, self.reject_roc_eq, self.reject_unified]
        if self.reject_lrt is not None:
            rates.append(self.reject_lrt)
        for r in rates:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"rejection rate {r!r} outside [0, 1]")


@dataclass(frozen=True)
class PowerTable:
    rows: tuple
    outer_reps: int
    inner_sims: int
    alpha: float
    seed: int


def _scenario_key(scenario: Scenario) -> int:
    """Stable 64-bit stream key from scenario content, so grid order is irrelevant."""
    parts = (scenario.family.value, repr(float(scenario.a)), repr(float(scenario.b)),
             str(scenario.n), repr(float(scenario.predictor_mean)),
             repr(float(scenario.predictor_sd)), scenario.panel or "")
    digest = hashlib.blake2b("|".join(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def run_power_study(grid, outer_reps: int, inner_sims: int, rng: RngStream) -> PowerTable:
    """Estimate rejection rates of all four tests over a scenario grid.

    Each scenario gets a sub-stream keyed by its content (not its position),
    and each replicate a further sub-stream, so tables are reproducible and
    invariant under grid reordering.  Replicates where the likelihood-ratio
    fit fails (separation, non-convergence, infinite logit) are dropped from
    the LRT denominator only; the simulation-based tests always count.
    """
    if outer_reps < 50:
        raise InvalidSimsError(f"outer_reps must be at least 50, got {outer_reps}")
    if inner_sims < 100:
        raise InvalidSimsError(f"inner_sims must be at least 100, got {inner_sims}")
    rows = []
    for scenario in grid:
        stream = rng.child(_scenario_key(scenario))
        hits_a = hits_b = hits_u = hits_lrt = 0
        lrt_failures = 0
        for rep in range(outer_reps):
            rep_stream = stream.child(rep)
            sample = generate_dataset(scenario, rep_stream.child(0))
            result = unified_test(sample, inner_sims, rep_stream.child(1))
            hits_a += result.p_a < ALPHA
            hits_b += result.p_b < ALPHA
            hits_u += result.p_unified < ALPHA
            try:
                p_lrt = lrt_calibration(sample)
            except (SeparationDetectedError, NonConvergenceError, InfiniteLogitError):
                lrt_failures += 1
            else:
                hits_lrt += p_lrt < ALPHA
        lrt_denom = outer_reps - lrt_failures
        rows.append(PowerRow(
            scenario=scenario,
            reject_mean_cal=hits_a / outer_reps,
            reject_roc_eq=hits_b / outer_reps,
            reject_unified=hits_u / outer_reps,
            reject_lrt=hits_lrt / lrt_denom if lrt_denom else None,
            lrt_failures=lrt_failures,
        ))
    return PowerTable(rows=tuple(rows), outer_reps=outer_reps,
                      inner_sims=inner_sims, alpha=ALPHA, seed=rng.seed)

"""Tests for scenario generation, the recalibration LRT, and the power harness."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from rocval import (
    InfiniteLogitError,
    InvalidScenarioError,
    InvalidSimsError,
    PowerRow,
    RngStream,
    Scenario,
    ScenarioFamily,
    SeparationDetectedError,
    auc_concordance,
    case_mix_preset,
    empirical_roc,
    fit_logistic_2param,
    generate_dataset,
    generate_with_truth,
    lrt_calibration,
    make_sample,
    make_scenario,
    model_roc,
    run_power_study,
)

# population c-statistics of the four case-mix panels, from 2-D Gauss-Legendre
# quadrature over (case score, control score) at 4001 nodes per axis
PANEL_C_STATS = {"A": 0.73953, "B": 0.63439, "C": 0.63439, "D": 0.56963}


class TestScenarioValidation:
    def test_minimum_sample_size(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("logit-linear", n=9)

    def test_positive_sd(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("logit-linear", n=100, predictor_sd=0.0)

    def test_sign_power_needs_positive_b(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("sign-power", b=0.0, n=100)
        with pytest.raises(InvalidScenarioError):
            make_scenario("sign-power", b=-1.0, n=100)

    def test_panel_only_for_presets(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("logit-linear", n=100, panel="A")

    def test_preset_requires_known_panel(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("case-mix-preset", n=100)
        with pytest.raises(InvalidScenarioError):
            make_scenario("case-mix-preset", n=100, panel="E")

    def test_unknown_family(self):
        with pytest.raises(InvalidScenarioError):
            make_scenario("quadratic", n=100)

    def test_family_by_enum(self):
        sc = make_scenario(ScenarioFamily.SIGN_POWER, b=2.0, n=50)
        assert sc.family is ScenarioFamily.SIGN_POWER

    def test_defaults(self):
        plain = make_scenario("logit-linear", n=100)
        assert (plain.predictor_mean, plain.predictor_sd) == (0.0, 1.0)
        shifted = make_scenario("shifted-logit-linear", n=100)
        assert shifted.predictor_mean == -2.0
        preset = make_scenario("case-mix-preset", n=100, panel="B")
        assert preset.predictor_sd == 0.5

    def test_direct_construction_validates(self):
        with pytest.raises(InvalidScenarioError):
            Scenario(family=ScenarioFamily.SIGN_POWER, a=0.0, b=0.0, n=100,
                     predictor_mean=0.0, predictor_sd=1.0)


class TestGenerateDataset:
    def test_logit_linear_identity(self):
        sc = make_scenario("logit-linear", a=0.0, b=1.0, n=500)
        sample, true_risk = generate_with_truth(sc, RngStream(seed=1))
        assert_array_equal(sample.risks, true_risk)

    def test_sign_power_identity_at_b_one(self):
        sc = make_scenario("sign-power", a=0.0, b=1.0, n=500)
        sample, true_risk = generate_with_truth(sc, RngStream(seed=2))
        assert_array_equal(sample.risks, true_risk)

    def test_shifted_prevalence(self):
        sc = make_scenario("shifted-logit-linear", n=200_000)
        sample = generate_dataset(sc, RngStream(seed=606))
        assert sample.outcomes.mean() == pytest.approx(0.155, abs=0.004)

    def test_same_stream_shares_draws_across_maps(self):
        # predictor and outcome noise live in their own sub-streams, so any
        # two families with the same predictor law see identical X and Y
        a = make_scenario("logit-linear", a=0.5, b=2.0, n=300)
        b = make_scenario("sign-power", a=0.0, b=0.5, n=300)
        sample_a, truth_a = generate_with_truth(a, RngStream(seed=9))
        sample_b, truth_b = generate_with_truth(b, RngStream(seed=9))
        assert_array_equal(sample_a.outcomes, sample_b.outcomes)
        assert_array_equal(truth_a, truth_b)

    def test_deterministic(self):
        sc = make_scenario("sign-power", a=0.25, b=1.5, n=200)
        one = generate_dataset(sc, RngStream(seed=77))
        two = generate_dataset(sc, RngStream(seed=77))
        assert_array_equal(one.outcomes, two.outcomes)
        assert_array_equal(one.risks, two.risks)

    def test_sign_power_preserves_mean_risk(self):
        # the map is odd in X, so at a=0 the mean predicted risk equals the
        # mean true risk in population; 1e7 draws pin it to the third decimal
        g = RngStream(seed=55).generator()
        x = g.normal(0.0, 1.0, 10_000_000)
        p = 1.0 / (1.0 + np.exp(-x))
        for b in (0.5, 0.75, 1.5, 2.0):
            pi = 1.0 / (1.0 + np.exp(-(b * np.sign(x) * np.abs(x) ** (1.0 / b))))
            assert abs(float(pi.mean()) - float(p.mean())) < 0.002

    def test_monotone_maps_share_c_statistic(self):
        # every sign-power map is strictly increasing in X, so reusing the
        # same stream across b leaves the outcome-risk ranking untouched
        base = None
        for b in (0.5, 1.0, 2.0):
            sc = make_scenario("sign-power", a=0.25, b=b, n=2000)
            c = auc_concordance(generate_dataset(sc, RngStream(seed=31)))
            base = c if base is None else base
            assert c == base


class TestCaseMixPresets:
    @pytest.mark.parametrize("panel", ["A", "B", "C", "D"])
    def test_c_statistic_matches_population_value(self, panel):
        sample = case_mix_preset(panel, 300_000, RngStream(seed=910 + ord(panel)))
        assert auc_concordance(sample) == pytest.approx(PANEL_C_STATS[panel], abs=0.004)

    def test_calibrated_panel_curves_align(self):
        sample = case_mix_preset("B", 400_000, RngStream(seed=11))
        grid = np.linspace(0.0, 1.0, 1001)
        gap = np.max(np.abs(empirical_roc(sample).tpr_at(grid)
                            - model_roc(sample.risks).tpr_at(grid)))
        assert gap < 0.02

    def test_miscalibrated_panel_curves_split(self):
        sample = case_mix_preset("D", 400_000, RngStream(seed=12))
        grid = np.linspace(0.0, 1.0, 1001)
        gap = np.max(np.abs(empirical_roc(sample).tpr_at(grid)
                            - model_roc(sample.risks).tpr_at(grid)))
        assert gap > 0.03

    def test_underdispersion_shrinks_risk_spread(self):
        a = case_mix_preset("A", 5000, RngStream(seed=40))
        b = case_mix_preset("B", 5000, RngStream(seed=40))
        assert b.risks.std() < a.risks.std()


class TestFitLogistic:
    def test_recovers_calibrated_coefficients(self):
        sc = make_scenario("logit-linear", n=100_000)
        fit = fit_logistic_2param(generate_dataset(sc, RngStream(seed=300)))
        assert fit.alpha == pytest.approx(0.0, abs=0.05)
        assert fit.beta == pytest.approx(1.0, abs=0.05)

    def test_recovers_halved_slope(self):
        # predictions use half the true logit, so the refit slope doubles
        sc = make_scenario("logit-linear", a=0.0, b=0.5, n=100_000)
        fit = fit_logistic_2param(generate_dataset(sc, RngStream(seed=301)))
        assert fit.beta == pytest.approx(2.0, abs=0.1)

    def test_loglik_is_maximal(self):
        sample = generate_dataset(make_scenario("logit-linear", n=500), RngStream(seed=8))
        fit = fit_logistic_2param(sample)
        eta_null = np.log(sample.risks) - np.log1p(-sample.risks)
        loglik_null = float(np.sum(sample.outcomes * eta_null
                                   - np.logaddexp(0.0, eta_null)))
        assert fit.loglik >= loglik_null - 1e-12

    def test_complete_separation(self):
        with pytest.raises(SeparationDetectedError):
            fit_logistic_2param(make_sample([1, 1, 1, 0, 0, 0],
                                            [0.9, 0.8, 0.7, 0.3, 0.2, 0.1]))

    def test_reversed_separation(self):
        with pytest.raises(SeparationDetectedError):
            fit_logistic_2param(make_sample([0, 0, 1, 1], [0.9, 0.8, 0.2, 0.1]))

    def test_quasi_separation_boundary_tie(self):
        with pytest.raises(SeparationDetectedError):
            fit_logistic_2param(make_sample([1, 1, 0, 0], [0.9, 0.5, 0.5, 0.1]))

    def test_single_class(self):
        with pytest.raises(SeparationDetectedError):
            fit_logistic_2param(make_sample([1, 1, 1], [0.2, 0.5, 0.8]))

    def test_boundary_risk_rejected(self):
        with pytest.raises(InfiniteLogitError):
            fit_logistic_2param(make_sample([1, 0], [1.0, 0.3]))


class TestLrtCalibration:
    def test_exact_null_fit_gives_p_one(self):
        assert lrt_calibration(make_sample([1, 0], [0.5, 0.5])) == 1.0

    def test_nominal_size(self):
        master = RngStream(seed=112233)
        sc = make_scenario("logit-linear", n=1000)
        rejections = 0
        for rep in range(500):
            sample = generate_dataset(sc, master.child(rep))
            rejections += lrt_calibration(sample) < 0.05
        assert 0.03 <= rejections / 500 <= 0.07

    def test_detects_gross_miscalibration(self):
        sc = make_scenario("logit-linear", a=1.0, b=1.0, n=5000)
        assert lrt_calibration(generate_dataset(sc, RngStream(seed=404))) < 1e-6


@pytest.fixture(scope="module")
def tiny_grid():
    return [make_scenario("logit-linear", a=0.0, b=1.0, n=100),
            make_scenario("sign-power", a=0.5, b=2.0, n=100)]


class TestRunPowerStudy:

    def test_deterministic(self, tiny_grid):
        one = run_power_study(tiny_grid, 50, 100, RngStream(seed=3))
        two = run_power_study(tiny_grid, 50, 100, RngStream(seed=3))
        assert one == two

    def test_grid_order_invariant(self, tiny_grid):
        fwd = run_power_study(tiny_grid, 50, 100, RngStream(seed=3))
        rev = run_power_study(list(reversed(tiny_grid)), 50, 100, RngStream(seed=3))
        by_scenario = {row.scenario: row for row in rev.rows}
        for row in fwd.rows:
            assert by_scenario[row.scenario] == row

    def test_bounds(self, tiny_grid):
        with pytest.raises(InvalidSimsError):
            run_power_study(tiny_grid, 49, 100, RngStream(seed=0))
        with pytest.raises(InvalidSimsError):
            run_power_study(tiny_grid, 50, 99, RngStream(seed=0))

    def test_table_metadata(self, tiny_grid):
        table = run_power_study(tiny_grid[:1], 50, 120, RngStream(seed=5))
        assert table.outer_reps == 50
        assert table.inner_sims == 120
        assert table.alpha == 0.05
        assert table.seed == 5
        assert len(table.rows) == 1
        row = table.rows[0]
        assert row.lrt_failures == 0
        assert row.reject_lrt is not None

    def test_high_power_cell(self):
        # strong miscalibration at n=1000: every test should fire often
        grid = [make_scenario("logit-linear", a=1.0, b=1.0, n=1000)]
        table = run_power_study(grid, 50, 200, RngStream(seed=6))
        assert table.rows[0].reject_unified > 0.9
        assert table.rows[0].reject_lrt > 0.9

    def test_power_row_validation(self):
        sc = make_scenario("logit-linear", n=100)
        with pytest.raises(ValueError):
            PowerRow(scenario=sc, reject_mean_cal=1.2, reject_roc_eq=0.0,
                     reject_unified=0.0, reject_lrt=None, lrt_failures=0)

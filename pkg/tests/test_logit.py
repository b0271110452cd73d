"""Tests for the logit MLE, odds ratios and average marginal effects"""

import math

import numpy as np
import pytest
from scipy import optimize, special

from causaleval.analysis import logit
from causaleval.analysis.dataset import from_mapping
from causaleval.analysis.formula import build_design_matrix
from causaleval.errors import DataError, SeparationError


def fit_formula(formula, ds, **kwargs):
    return logit.fit_logit(build_design_matrix(formula, ds), **kwargs)


class TestFit:
    def test_intercept_only_is_logit_of_mean(self):
        y = np.array([1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0])
        fit = fit_formula("y ~ 1", from_mapping({"y": y}))

        assert fit.beta_hat[0] == pytest.approx(special.logit(np.mean(y)), abs=1e-8)
        assert fit.loglik_full == pytest.approx(fit.loglik_null, abs=1e-10)
        assert logit.mcfadden_r2(fit) == 0.0

    def test_gradient_vanishes_at_estimate(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)

        assert fit.converged
        assert np.max(np.abs(logit.gradient(fit.beta_hat, fit.design))) <= 1e-8

    def test_matches_generic_optimizer(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        dm = fit.design

        result = optimize.minimize(
            lambda b: -logit.log_likelihood(b, dm),
            np.zeros(dm.n_columns),
            jac=lambda b: -logit.gradient(b, dm),
            method="BFGS",
            options={"gtol": 1e-10},
        )

        np.testing.assert_allclose(fit.beta_hat, result.x, atol=1e-5)
        assert fit.loglik_full >= -result.fun - 1e-9

    def test_recovers_generating_effects(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)

        np.testing.assert_allclose(fit.beta_hat, [-0.5, 0.8, 1.2], atol=0.45)

    def test_covariance_is_inverse_information(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)

        information = -logit.hessian(fit.beta_hat, fit.design)
        np.testing.assert_allclose(fit.info_inv @ information, np.eye(3), atol=1e-8)
        np.testing.assert_array_equal(fit.info_inv, fit.info_inv.T)

    def test_derivatives_match_finite_differences(self, logit_dataset, rng):
        dm = build_design_matrix("y ~ x + g", logit_dataset)
        h = 1e-5
        for _ in range(50):
            beta = rng.normal(0.0, 1.0, dm.n_columns)
            grad = logit.gradient(beta, dm)
            hess = logit.hessian(beta, dm)
            for j in range(dm.n_columns):
                step = np.zeros(dm.n_columns)
                step[j] = h
                numeric = (logit.log_likelihood(beta + step, dm) - logit.log_likelihood(beta - step, dm)) / (2 * h)
                assert grad[j] == pytest.approx(numeric, rel=1e-6, abs=1e-6)
                numeric_row = (logit.gradient(beta + step, dm) - logit.gradient(beta - step, dm)) / (2 * h)
                np.testing.assert_allclose(hess[:, j], numeric_row, rtol=1e-6, atol=1e-6)

    def test_small_scale_regressor_with_outlier(self, rng):
        x = np.append(rng.uniform(-3.0, 3.0, 300), 40.0)
        y = (rng.random(301) < special.expit(x)).astype(float)
        y[-1] = 1.0

        original = fit_formula("y ~ x", from_mapping({"y": y, "x": x}))
        shrunk = fit_formula("y ~ x", from_mapping({"y": y, "x": 0.01 * x}))

        assert shrunk.converged
        assert abs(shrunk.beta_hat[1]) > 30.0
        assert shrunk.beta_hat[1] == pytest.approx(100.0 * original.beta_hat[1], rel=1e-6)
        np.testing.assert_allclose(shrunk.fitted_prob, original.fitted_prob, atol=1e-8)

    def test_log_likelihood_is_stable_for_large_eta(self):
        ds = from_mapping({"y": np.array([0.0, 1.0, 1.0, 0.0]), "x": np.array([-1.0, 1.0, 2.0, 3.0])})
        dm = build_design_matrix("y ~ x", ds)

        assert math.isfinite(logit.log_likelihood(np.array([0.0, 800.0]), dm))


class TestErrors:
    def test_complete_separation(self):
        x = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
        ds = from_mapping({"y": (x > 0).astype(float), "x": x})

        with pytest.raises(SeparationError, match="separation"):
            fit_formula("y ~ x", ds)

    def test_quasi_complete_separation(self):
        x = np.array([-2.0, -1.0, 0.0, 0.0, 1.0, 2.0])
        ds = from_mapping({"y": np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0]), "x": x})

        with pytest.raises(SeparationError, match="quasi-complete"):
            fit_formula("y ~ x", ds)

    def test_separation_by_factor_level(self):
        g = np.array(["a", "a", "b", "b", "c", "c", "c", "a"], dtype=object)
        y = np.array([0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0])
        ds = from_mapping({"y": y, "g": g})

        with pytest.raises(SeparationError):
            fit_formula("y ~ g", ds)

    def test_overlapping_classes_are_not_separated(self, logit_dataset):
        dm = build_design_matrix("y ~ x + g", logit_dataset)

        assert logit.separation_kind(dm.matrix, dm.response) is None

    def test_single_class(self):
        ds = from_mapping({"y": np.ones(5), "x": np.arange(5.0)})

        with pytest.raises(DataError, match="single class"):
            fit_formula("y ~ x", ds)

    def test_non_binary_response(self):
        ds = from_mapping({"y": np.array([0.0, 1.0, 2.0, 1.0]), "x": np.arange(4.0)})

        with pytest.raises(DataError, match="0/1"):
            fit_formula("y ~ x", ds)


class TestCoefTable:
    def test_odds_ratios(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        table = logit.coef_table_logit(fit)

        assert table.family == "logit"
        assert table.statistic_label == "z"
        for row, odds in zip(table.rows, table.odds_ratios):
            assert odds.odds_ratio == pytest.approx(math.exp(row.estimate))
            assert odds.ci_low == pytest.approx(math.exp(row.ci_low))
            assert odds.ci_high == pytest.approx(math.exp(row.ci_high))
            assert row.ci_low < row.estimate < row.ci_high

    def test_wald_interval(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        row = logit.coef_table_logit(fit, alpha=0.1).rows[1]
        se = math.sqrt(fit.info_inv[1, 1])

        assert row.std_error == pytest.approx(se)
        assert row.ci_high - row.estimate == pytest.approx(1.6448536269514722 * se, rel=1e-10)

    def test_fit_statistics(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        stats = logit.coef_table_logit(fit).fit_statistics

        assert stats["mcfadden_r2"] == pytest.approx(1.0 - fit.loglik_full / fit.loglik_null)
        assert 0.0 < stats["mcfadden_r2"] < 1.0
        assert stats["converged"] is True


class TestMarginalEffects:
    def test_derivative_form(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        p = fit.fitted_prob

        row = logit.average_marginal_effect(fit, "x")

        assert row.kind == "derivative"
        assert row.ame == pytest.approx(np.mean(p * (1 - p)) * fit.beta_hat[fit.column_names.index("x")], rel=1e-12)

    def test_derivative_matches_numerical_derivative(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        X = fit.design.matrix.copy()
        h = 1e-6
        col = fit.column_names.index("x")
        up, down = X.copy(), X.copy()
        up[:, col] += h
        down[:, col] -= h

        numeric = np.mean(special.expit(up @ fit.beta_hat) - special.expit(down @ fit.beta_hat)) / (2 * h)

        assert logit.average_marginal_effect(fit, "x").ame == pytest.approx(numeric, rel=1e-6)

    def test_discrete_form_for_dummies(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        X = fit.design.matrix
        x1, x0 = X.copy(), X.copy()
        col = fit.column_names.index("g=b")
        x1[:, col], x0[:, col] = 1.0, 0.0

        row = logit.average_marginal_effect(fit, "g=b")

        assert row.kind == "discrete"
        expected = np.mean(special.expit(x1 @ fit.beta_hat) - special.expit(x0 @ fit.beta_hat))
        assert row.ame == pytest.approx(expected, rel=1e-12)

    def test_discrete_form_recomputes_interactions(self, logit_dataset):
        fit = fit_formula("y ~ x*g", logit_dataset)
        X = fit.design.matrix
        names = fit.column_names
        col_g, col_gx = names.index("g=b"), names.index("g=b:x")
        x1, x0 = X.copy(), X.copy()
        x1[:, col_g], x1[:, col_gx] = 1.0, X[:, names.index("x")]
        x0[:, col_g], x0[:, col_gx] = 0.0, 0.0

        ame, _, kind = logit.ame_with_gradient(fit.design, fit.beta_hat, "g=b")

        assert kind == "discrete"
        expected = np.mean(special.expit(x1 @ fit.beta_hat) - special.expit(x0 @ fit.beta_hat))
        assert ame == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("column", ["x", "g=b"])
    def test_gradient_matches_finite_differences(self, logit_dataset, column):
        fit = fit_formula("y ~ x + g", logit_dataset)
        dm, beta = fit.design, fit.beta_hat
        _, grad, _ = logit.ame_with_gradient(dm, beta, column)
        h = 1e-6

        for j in range(dm.n_columns):
            step = np.zeros(dm.n_columns)
            step[j] = h
            numeric = (
                logit.ame_with_gradient(dm, beta + step, column)[0]
                - logit.ame_with_gradient(dm, beta - step, column)[0]
            ) / (2 * h)
            assert grad[j] == pytest.approx(numeric, rel=1e-5, abs=1e-8)

    def test_delta_method_standard_error(self, logit_dataset):
        fit = fit_formula("y ~ x + g", logit_dataset)
        _, grad, _ = logit.ame_with_gradient(fit.design, fit.beta_hat, "x")

        row = logit.average_marginal_effect(fit, "x")

        assert row.std_error == pytest.approx(math.sqrt(grad @ fit.info_inv @ grad))
        assert row.ci_low < row.ame < row.ci_high

    def test_rescaling_a_regressor(self, logit_dataset):
        rescaled = from_mapping(
            {
                "y": logit_dataset["y"].values,
                "x": 10.0 * logit_dataset["x"].values,
                "g": logit_dataset["g"].values,
            }
        )
        original = logit.marginal_effects_table(fit_formula("y ~ x + g", logit_dataset))
        scaled = logit.marginal_effects_table(fit_formula("y ~ x + g", rescaled))

        assert scaled.rows[0].name == "g=b"
        assert scaled.rows[0].ame == pytest.approx(original.rows[0].ame, rel=1e-6)
        assert scaled.rows[1].ame == pytest.approx(original.rows[1].ame / 10.0, rel=1e-6)

    def test_table_defaults_to_every_regressor(self, logit_dataset):
        table = logit.marginal_effects_table(fit_formula("y ~ x + g", logit_dataset))

        assert [r.name for r in table.rows] == ["g=b", "x"]

    def test_intercept_has_no_marginal_effect(self, logit_dataset):
        fit = fit_formula("y ~ x", logit_dataset)

        with pytest.raises(DataError, match="intercept"):
            logit.average_marginal_effect(fit, "(Intercept)")

    def test_unknown_column(self, logit_dataset):
        fit = fit_formula("y ~ x", logit_dataset)

        with pytest.raises(DataError, match="unknown design column"):
            logit.average_marginal_effect(fit, "z")


def test_predict_proba(logit_dataset):
    fit = fit_formula("y ~ x + g", logit_dataset)

    np.testing.assert_allclose(logit.predict_proba(fit, logit_dataset), fit.fitted_prob, rtol=1e-12)


def grid_maximum(dm, center, half_width, points=201):
    """Largest log-likelihood on a square lattice of (intercept, slope) values"""
    b0 = np.linspace(center[0] - half_width, center[0] + half_width, points)
    b1 = np.linspace(center[1] - half_width, center[1] + half_width, points)
    betas = np.column_stack([g.ravel() for g in np.meshgrid(b0, b1, indexing="ij")])
    eta = dm.matrix @ betas.T
    y = dm.response[:, None]
    ll = np.sum(y * eta - np.logaddexp(0.0, eta), axis=0)
    best = int(np.argmax(ll))
    return betas[best], float(ll[best])


def test_grid_search_brackets_newton_optimum(rng):
    checked = 0
    while checked < 10:
        n = int(rng.integers(5, 9))
        x = rng.normal(0.0, 1.0, n)
        y = (rng.random(n) < special.expit(x)).astype(float)
        ds = from_mapping({"y": y, "x": x})
        try:
            fit = fit_formula("y ~ x", ds)
        except (SeparationError, DataError):
            continue
        if np.max(np.abs(fit.beta_hat)) > 4.0:
            continue

        center, half_width = np.zeros(2), 6.0
        for _ in range(6):
            center, ll = grid_maximum(fit.design, center, half_width)
            half_width /= 10.0

        assert ll <= fit.loglik_full + 1e-9
        assert fit.loglik_full - ll <= 1e-6
        np.testing.assert_allclose(center, fit.beta_hat, atol=1e-3)
        checked += 1


def test_mcfadden_r2_grows_with_signal(rng):
    n = 2000
    x = rng.normal(0.0, 1.0, n)
    u = rng.random(n)

    values = []
    for slope in (0.5, 1.0, 2.0, 4.0, 8.0):
        ds = from_mapping({"y": (u < special.expit(slope * x)).astype(float), "x": x})
        values.append(logit.mcfadden_r2(fit_formula("y ~ x", ds)))

    assert all(0.0 < v < 1.0 for v in values)
    assert values == sorted(values)


@pytest.mark.slow
def test_wald_interval_coverage():
    rng = np.random.default_rng(17)
    n, replications = 2000, 500
    truth = np.array([-1.0, 2.0])
    covered = np.zeros(2)
    for _ in range(replications):
        x = rng.normal(0.0, 1.0, n)
        y = (rng.random(n) < special.expit(truth[0] + truth[1] * x)).astype(float)
        table = logit.coef_table_logit(fit_formula("y ~ x", from_mapping({"y": y, "x": x})))
        covered += [row.ci_low <= value <= row.ci_high for row, value in zip(table.rows, truth)]

    rate = covered / replications
    assert np.all((rate >= 0.925) & (rate <= 0.975))

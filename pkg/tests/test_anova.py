"""Tests for ANOVA sums of squares and partial eta squared"""

import numpy as np
import pytest
from scipy import stats

from causaleval.analysis import anova, ols
from causaleval.analysis.dataset import from_mapping
from causaleval.analysis.formula import build_design_matrix, parse
from causaleval.errors import ModelError
from causaleval.models.formula import Term


@pytest.fixture
def one_factor(rng):
    g = np.repeat(np.array(["a", "b", "c"], dtype=object), 8)
    y = np.repeat([1.0, 1.5, 3.0], 8) + rng.normal(0.0, 0.4, 24)
    return from_mapping({"y": y, "g": g})


@pytest.fixture
def two_factor(rng):
    a = np.tile(np.repeat(np.array(["p", "q"], dtype=object), 3), 6)
    b = np.tile(np.array(["u", "v", "w"], dtype=object), 12)
    y = 0.8 * (a == "q") + np.select([b == "v", b == "w"], [0.3, -0.5], 0.0) + rng.normal(0.0, 0.5, 36)
    return from_mapping({"y": y, "a": a, "b": b})


def fit_r2(formula, ds):
    return ols.fit(build_design_matrix(formula, ds)).r2


class TestOneFactor:
    def test_dummy_coefficients_are_cell_means(self, one_factor):
        fit = ols.fit(build_design_matrix("y ~ g", one_factor))
        y, g = one_factor["y"].values, one_factor["g"].values
        means = {level: np.mean(y[g == level]) for level in ("a", "b", "c")}

        assert fit.beta_hat[0] == pytest.approx(means["a"], abs=1e-12)
        assert fit.beta_hat[1] == pytest.approx(means["b"] - means["a"], abs=1e-12)
        assert fit.beta_hat[2] == pytest.approx(means["c"] - means["a"], abs=1e-12)

    def test_eta2_matches_r2_increase(self, one_factor):
        table = anova.anova_table("y ~ g", one_factor)
        row = table.rows[0]

        assert row.term == "g"
        assert row.df_term == 2
        assert row.eta2_partial == pytest.approx(anova.eta2_from_r2_delta(fit_r2("y ~ g", one_factor), 0.0), abs=1e-10)
        assert row.ss_effect + table.residual_ss == pytest.approx(table.total_ss, rel=1e-12)

    def test_f_test(self, one_factor):
        table = anova.anova_table("y ~ g", one_factor)
        row = table.rows[0]
        expected = stats.f_oneway(*[one_factor["y"].values[one_factor["g"].values == lv] for lv in "abc"])

        assert row.f_statistic == pytest.approx(expected[0], rel=1e-10)
        assert row.p_value == pytest.approx(expected[1], rel=1e-8)

    def test_noise_free_groups(self):
        ds = from_mapping(
            {"y": np.array([0.0, 0.0, 0.0, 2.0, 2.0, 2.0]), "g": np.array(list("aaabbb"), dtype=object)}
        )

        row = anova.anova_table("y ~ g", ds).rows[0]

        assert row.ss_error == 0.0
        assert row.eta2_partial == 1.0


class TestTwoFactor:
    def test_eta2_matches_reduced_models(self, two_factor):
        table = anova.anova_table("y ~ a*b", two_factor)
        r2_full = fit_r2("y ~ a*b", two_factor)
        reduced = {"a": "y ~ b", "b": "y ~ a", "a:b": "y ~ a + b"}

        assert [r.term for r in table.rows] == ["a", "b", "a:b"]
        for row in table.rows:
            expected = anova.eta2_from_r2_delta(r2_full, fit_r2(reduced[row.term], two_factor))
            assert row.eta2_partial == pytest.approx(expected, abs=1e-10)
            assert 0.0 <= row.eta2_partial <= 1.0

    def test_degrees_of_freedom_count_removed_columns(self, two_factor):
        table = anova.anova_table("y ~ a*b", two_factor)

        # dropping a main effect drops its interaction columns too
        assert [r.df_term for r in table.rows] == [3, 4, 2]
        assert table.df_resid == 36 - 6

    def test_balanced_main_effects_equal_between_group_ss(self, two_factor):
        table = anova.anova_table("y ~ a + b", two_factor)
        y = two_factor["y"].values
        grand = np.mean(y)

        for row in table.rows:
            labels = two_factor[row.term].values
            between = sum(
                np.sum(labels == level) * (np.mean(y[labels == level]) - grand) ** 2 for level in set(labels)
            )
            assert row.ss_effect == pytest.approx(between, rel=1e-9)

    def test_unchanged_by_rescaling(self, two_factor):
        rescaled = from_mapping(
            {
                "y": 3.0 * two_factor["y"].values - 7.0,
                "a": two_factor["a"].values,
                "b": two_factor["b"].values,
            }
        )

        original = anova.anova_table("y ~ a*b", two_factor)
        scaled = anova.anova_table("y ~ a*b", rescaled)

        for left, right in zip(original.rows, scaled.rows):
            assert left.eta2_partial == pytest.approx(right.eta2_partial, abs=1e-10)
            assert right.ss_effect == pytest.approx(9.0 * left.ss_effect, rel=1e-8)

    def test_single_term_agrees_on_balanced_design(self, two_factor):
        comparison = anova.anova_table("y ~ a + b", two_factor)
        single = anova.anova_table("y ~ a + b", two_factor, method="single_term")

        assert single.method == "single_term"
        for left, right in zip(comparison.rows, single.rows):
            assert left.ss_effect == pytest.approx(right.ss_effect, rel=1e-9)

    def test_workers_do_not_change_result(self, two_factor):
        serial = anova.anova_table("y ~ a*b", two_factor, workers=1)
        parallel = anova.anova_table("y ~ a*b", two_factor, workers=3)

        assert serial == parallel

    def test_reference_level_does_not_change_effect_sizes(self, two_factor):
        default = anova.anova_table("y ~ a*b", two_factor)
        moved = anova.anova_table("y ~ a*b", two_factor, reference_levels={"b": "w"})

        for left, right in zip(default.rows, moved.rows):
            assert left.eta2_partial == pytest.approx(right.eta2_partial, abs=1e-10)


class TestHelpers:
    def test_partial_eta2(self):
        assert anova.partial_eta2(3.0, 1.0) == 0.75
        assert anova.partial_eta2(0.0, 0.0) == 0.0

    def test_eta2_from_r2_delta(self):
        assert anova.eta2_from_r2_delta(0.6, 0.2) == pytest.approx(0.5)
        assert anova.eta2_from_r2_delta(1.0, 1.0) == 0.0

    def test_non_nested_models(self):
        with pytest.raises(ModelError, match="not nested"):
            anova.eta2_from_r2_delta(0.2, 0.5)

    def test_marginal_terms(self):
        formula = parse("y ~ a*b + c")

        assert anova.marginal_terms(formula, Term.of("a")) == (Term.of("a"), Term.of("a", "b"))
        assert anova.marginal_terms(formula, Term.of("c")) == (Term.of("c"),)


class TestErrors:
    def test_unknown_method(self, one_factor):
        with pytest.raises(ValueError, match="unknown ANOVA method"):
            anova.anova_table("y ~ g", one_factor, method="type3")

    def test_intercept_only(self, one_factor):
        with pytest.raises(ModelError, match="at least one term"):
            anova.anova_table("y ~ 1", one_factor)

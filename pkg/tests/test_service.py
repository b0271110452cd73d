"""Tests for the analysis service"""

import pytest

from causaleval.analysis.dataset import read_dataset
from causaleval.analysis.report import CAVEAT_LOGIT_WALD, render_json
from causaleval.config import Config, LogitSettings
from causaleval.errors import DataError, FormulaSyntaxError, UsageError
from causaleval.models.requests import RunConfig
from causaleval.services.analysis_service import AnalysisService
from causaleval.services.demo_data import DEMO_EFFECTS

OLS_FORMULA = "acc ~ pretrain + arch + algo + n_initial_classes"
LOGIT_FORMULA = "beats_baseline ~ arch + algo + n_initial_classes"


@pytest.fixture
def service():
    return AnalysisService()


def run_config(demo_csv, subcommand, formulas, **kwargs):
    return RunConfig(subcommand=subcommand, data_path=demo_csv, formulas=formulas, **kwargs)


class TestFit:
    def test_ols_with_diagnostics(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "fit", [OLS_FORMULA]))

        assert [s.kind for s in report.sections] == ["coefficients", "diagnostics"]
        rows = {r["name"]: r for r in report.sections[0].payload["rows"]}
        assert set(rows) == set(DEMO_EFFECTS)
        for name, effect in DEMO_EFFECTS.items():
            assert rows[name]["estimate"] == pytest.approx(effect, abs=0.015)

    def test_ols_without_diagnostics(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "fit", [OLS_FORMULA], diagnostics=False))

        assert [s.kind for s in report.sections] == ["coefficients"]

    def test_logit(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "fit", [LOGIT_FORMULA], family="logit"))
        payload = report.sections[0].payload

        assert payload["family"] == "logit"
        assert len(payload["odds_ratios"]) == len(payload["rows"])
        assert report.meta.caveats == [CAVEAT_LOGIT_WALD]

    def test_one_section_per_formula(self, service, demo_csv):
        run = run_config(demo_csv, "fit", ["acc ~ arch", "acc ~ algo"], diagnostics=False)

        report = service.run(run)

        assert [s.payload["formula"] for s in report.sections] == ["acc ~ arch", "acc ~ algo"]

    def test_centering_is_reported(self, service, demo_csv):
        run = run_config(demo_csv, "fit", ["acc ~ n_initial_classes"], center=["n_initial_classes"], diagnostics=False)

        payload = service.run(run).sections[0].payload

        assert "n_initial_classes" in payload["centering"]

    def test_digest_is_of_the_file(self, service, demo_csv):
        run = run_config(demo_csv, "fit", ["acc ~ arch"], center=["acc"], diagnostics=False)

        assert service.run(run).meta.dataset_digest == read_dataset(demo_csv).digest


class TestOtherSubcommands:
    def test_anova(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "anova", [OLS_FORMULA]))
        rows = report.sections[0].payload["rows"]

        assert [r["term"] for r in rows] == ["algo", "arch", "n_initial_classes", "pretrain"]
        assert all(0.0 <= r["eta2_partial"] <= 1.0 for r in rows)

    def test_diagnose_logit_records_seed(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "diagnose", [LOGIT_FORMULA], family="logit", seed=9, n_sim=100))

        assert report.meta.seed == 9
        checks = report.sections[0].payload["checks"]
        assert [c["name"] for c in checks] == ["simulated_residuals", "vif"]

    def test_compare(self, service, demo_csv):
        report = service.run(run_config(demo_csv, "compare", ["acc ~ arch", OLS_FORMULA]))
        payload = report.sections[0].payload

        assert payload["rows"][0]["formula"] == "acc ~ algo + arch + n_initial_classes + pretrain"
        assert payload["best"] == 0

    def test_ame(self, service, demo_csv):
        run = run_config(demo_csv, "ame", [LOGIT_FORMULA], family="logit", terms=["arch=transformer"])

        rows = service.run(run).sections[0].payload["rows"]

        assert [r["name"] for r in rows] == ["arch=transformer"]
        assert rows[0]["kind"] == "discrete"
        assert rows[0]["ame"] > 0.0

    def test_deterministic(self, service, demo_csv):
        run = run_config(demo_csv, "diagnose", [LOGIT_FORMULA], family="logit", n_sim=60, workers=2)

        assert render_json(service.run(run)) == render_json(service.run(run))

    async def test_run_async(self, service, demo_csv):
        run = run_config(demo_csv, "fit", ["acc ~ arch"], diagnostics=False)

        assert await service.run_async(run) == service.run(run)


class TestErrors:
    def test_ame_needs_logit(self, service, demo_csv):
        with pytest.raises(UsageError, match="'ame' requires"):
            service.run(run_config(demo_csv, "ame", [OLS_FORMULA]))

    def test_anova_needs_ols(self, service, demo_csv):
        with pytest.raises(UsageError, match="'anova' requires"):
            service.run(run_config(demo_csv, "anova", [LOGIT_FORMULA], family="logit"))

    def test_missing_file(self, service, tmp_path):
        with pytest.raises(DataError, match="cannot read data file"):
            service.run(run_config(tmp_path / "missing.csv", "fit", ["y ~ x"]))

    def test_formulas_are_parsed_before_reading(self, service, tmp_path):
        with pytest.raises(FormulaSyntaxError):
            service.run(run_config(tmp_path / "missing.csv", "fit", ["y ~ x +"]))


def test_compare_uses_configured_logit_settings(demo_csv):
    settings = Config()
    settings.logit = LogitSettings(max_iter=1)
    run = run_config(demo_csv, "compare", [LOGIT_FORMULA], family="logit")

    row = AnalysisService(settings).run(run).sections[0].payload["rows"][0]

    assert "did not converge" in row["error"]

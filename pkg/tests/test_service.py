import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from starlette.testclient import TestClient

from coxclaims import __version__, acf, total_count_law
from coxclaims.model import load_config  # noqa: F401  (exercised indirectly)
from coxclaims.service.app import app


@pytest.fixture
def client():
    return TestClient(app)


class TestHealth:
    def test_reports_version(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "version": __version__}


class TestSimulateEndpoint:
    def test_csv_shape(self, client, ref_config_dict):
        resp = client.post("/simulate", json={"config": ref_config_dict, "replications": 3})
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/csv")
        lines = resp.text.strip().splitlines()
        assert lines[0] == "replication,arrival,delay,report_time,period"
        reps = {int(line.split(",")[0]) for line in lines[1:]}
        assert reps <= {0, 1, 2}

    def test_deterministic_given_seed(self, client, ref_config_dict):
        a = client.post("/simulate", json={"config": ref_config_dict}).text
        b = client.post("/simulate", json={"config": ref_config_dict}).text
        assert a == b

    def test_seed_changes_output(self, client, ref_config_dict):
        other = dict(ref_config_dict, seed=1)
        a = client.post("/simulate", json={"config": ref_config_dict}).text
        b = client.post("/simulate", json={"config": other}).text
        assert a != b

    def test_missing_seed_is_config_error(self, client, ref_config_dict):
        config = {k: v for k, v in ref_config_dict.items() if k != "seed"}
        resp = client.post("/simulate", json={"config": config})
        assert resp.status_code == 400
        assert resp.json()["detail"]["exit_code"] == 2

    def test_bad_transition_matrix_is_config_error(self, client, ref_config_dict):
        config = dict(ref_config_dict, gamma=[0.9, 0.2, 0.2, 0.8])
        resp = client.post("/simulate", json={"config": config})
        assert resp.status_code == 400
        assert resp.json()["detail"]["exit_code"] == 2


class TestDistEndpoint:
    def test_matches_library_law(self, client, ref_config_dict, ref_spec, ref_delay):
        resp = client.post("/dist", json={"config": ref_config_dict, "which": "reported"})
        assert resp.status_code == 200
        law = total_count_law(ref_spec, ref_delay, 3.0, "reported")
        assert resp.text == law.to_csv()

    def test_period_marginal(self, client, ref_config_dict):
        resp = client.post(
            "/dist", json={"config": ref_config_dict, "which": "period-marginal", "period": 2}
        )
        assert resp.status_code == 200
        rows = [l for l in resp.text.strip().splitlines() if not l.startswith("#")]
        probs = [float(r.split(",")[1]) for r in rows[1:]]
        assert sum(probs) == pytest.approx(1.0, abs=1e-6)

    def test_tiny_n_max_is_accuracy_error(self, client, ref_config_dict):
        resp = client.post(
            "/dist", json={"config": ref_config_dict, "which": "reported", "n_max": 1}
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["exit_code"] == 4

    def test_mc_fallback_engages(self, client, ref_config_dict):
        resp = client.post(
            "/dist",
            json={"config": ref_config_dict, "which": "reported", "n_max": 1, "mc": 5000},
        )
        assert resp.status_code == 200
        assert "# method=monte-carlo replications=5000" in resp.text

    def test_verify_appends_comment(self, client, ref_config_dict):
        resp = client.post(
            "/dist",
            json={
                "config": ref_config_dict,
                "which": "ibnr",
                "verify": True,
                "verify_replications": 20000,
            },
        )
        assert resp.status_code == 200
        assert "# verify=pass max_abs_z=" in resp.text

    def test_off_grid_valuation_is_precondition_error(self, client, ref_config_dict):
        config = dict(ref_config_dict, valuation=2.5)
        resp = client.post("/dist", json={"config": config, "which": "reported"})
        assert resp.status_code == 400
        assert resp.json()["detail"]["exit_code"] == 3

    def test_unknown_which_is_422(self, client, ref_config_dict):
        resp = client.post("/dist", json={"config": ref_config_dict, "which": "everything"})
        assert resp.status_code == 422


class TestAcfEndpoint:
    def test_spectral_table(self, client, ref_config_dict, ref_spec):
        resp = client.post("/acf", json={"config": ref_config_dict, "max_lag": 5})
        assert resp.status_code == 200
        lines = resp.text.strip().splitlines()
        assert lines[0] == "k,rho"
        assert lines[-1] == "# method=spectral"
        for k, line in enumerate(lines[1:-1], start=1):
            assert float(line.split(",")[1]) == pytest.approx(acf(ref_spec, k), abs=1e-12)

    def test_direct_fallback_on_complex_spectrum(self, client, ref_config_dict):
        config = dict(
            ref_config_dict,
            g=3,
            gamma=[0.1, 0.8, 0.1, 0.1, 0.1, 0.8, 0.8, 0.1, 0.1],
            pi1=[1.0, 0.0, 0.0],
            shapes=[1, 2, 3],
        )
        resp = client.post("/acf", json={"config": config, "max_lag": 4})
        assert resp.status_code == 200
        assert resp.text.strip().endswith("# method=direct")

    def test_unequal_period_scales_is_precondition_error(self, client, ref_config_dict):
        config = dict(ref_config_dict, exposures=[1.0, 2.0, 1.0])
        resp = client.post("/acf", json={"config": config, "max_lag": 3})
        assert resp.status_code == 400
        assert resp.json()["detail"]["exit_code"] == 3


class TestVerifyEndpoint:
    def test_reference_model_passes(self, client, ref_config_dict):
        resp = client.post(
            "/verify",
            json={"config": ref_config_dict, "which": "reported", "replications": 30000},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"] is True
        assert body["max_abs_z"] <= 4.0
        assert body["bins_checked"] > 5
        assert body["which"] == "reported"

    def test_deterministic(self, client, ref_config_dict):
        payload = {"config": ref_config_dict, "which": "ibnr", "replications": 20000}
        a = client.post("/verify", json=payload).json()
        b = client.post("/verify", json=payload).json()
        assert a == b

# SPDX-License-Identifier: Apache-2.0
import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

import ldma

CONFIG_DIR = pathlib.Path(os.environ.get("LDMA_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))
CLI = os.environ.get("LDMA_CLI")


def small_multipath():
    return {
        "id": "py_small",
        "scenario_kind": "linear_multipath",
        "array": {"num_antennas": 64, "carrier_frequency": 30e9},
        "sys": {"num_users": 2, "total_power": 1.0},
        "kappa": 10.0,
        "L": 2,
        "user_region": {"angle_range": [0.0, 0.0], "distance_range": [4.0, 40.0]},
        "snr_grid": [0.0, 10.0],
        "num_trials": 6,
        "seed": 7,
        "precoder": ["zf", "wmmse", "sdma_dft_wmmse"],
    }


def test_geometry_and_vectors():
    cfg = ldma.ArrayConfig.half_wavelength(201, 30e9)
    assert math.isclose(cfg.aperture, 1.0, rel_tol=1e-12)
    assert math.isclose(ldma.rayleigh_distance(cfg), 200.0, rel_tol=1e-9)
    a = ldma.steering_vector(ldma.ArrayConfig.half_wavelength(64, 30e9), 0.3)
    assert a.shape == (64,)
    assert math.isclose(np.linalg.norm(a), 1.0, rel_tol=1e-12)
    b = ldma.focusing_vector(cfg, ldma.Location(5.0, math.pi / 6))
    assert math.isclose(np.linalg.norm(b), 1.0, rel_tol=1e-12)


def test_correlation_values():
    c, s = ldma.fresnel(1.0)
    assert math.isclose(c, 0.77989340037682, rel_tol=1e-10)
    assert math.isclose(s, 0.43825914739035, rel_tol=1e-10)
    assert ldma.fresnel_correlation(0.0) == 1.0
    assert ldma.fresnel_envelope(3.0) >= ldma.fresnel_correlation(3.0)
    cfg = ldma.ArrayConfig.half_wavelength(256, 30e9)
    rep = ldma.focusing_correlation_approx(cfg, 5.0, 15.0, math.pi / 6)
    assert math.isclose(rep["beta"], 2.862, rel_tol=1e-3)
    assert rep["abs_error"] <= 0.05
    gamma = ldma.lemma7_gamma(3, 0.3)
    assert math.isclose(gamma[1], 1.0 / 0.82, rel_tol=1e-12)


def test_codebook():
    cfg = ldma.ArrayConfig.half_wavelength(32, 30e9)
    meta, words = ldma.build_codebook("dft", cfg)
    assert words.shape == (32, 32)
    gram = words.conj().T @ words
    assert np.allclose(gram, np.eye(32), atol=1e-10)
    meta, polar = ldma.build_codebook("polar", ldma.ArrayConfig.half_wavelength(128, 30e9), 4.0, 0.5)
    assert polar.shape[1] > 128
    assert json.loads(meta)["kind"] == "polar"
    with pytest.raises(ValueError):
        ldma.build_codebook("hexagonal", cfg)


def test_run_scenario_rows_and_determinism():
    rows = ldma.run_scenario(small_multipath())
    assert rows
    assert list(rows[0].keys()) == ldma.CSV_HEADER.split(",")
    labels = {r["method"] for r in rows}
    assert labels == {"ldma_zf", "ldma_wmmse", "sdma_wmmse"}
    again = ldma.run_scenario_csv(json.dumps(small_multipath()), 3)
    assert again == ldma.run_scenario_csv(json.dumps(small_multipath()), 1)


def test_invalid_config_raises():
    bad = small_multipath()
    bad["sys"]["num_users"] = 0
    with pytest.raises(ValueError):
        ldma.run_scenario(bad)
    with pytest.raises(ValueError):
        ldma.validate_config("{not json")


@pytest.mark.skipif(CLI is None, reason="CLI binary not provided")
def test_cli_exit_codes(tmp_path):
    ok = subprocess.run([CLI, "validate", str(CONFIG_DIR / "fig4_linear_multipath.json")], capture_output=True)
    assert ok.returncode == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"id": "bad", "scenario_kind": "linear_multipath", "sys": {"num_users": -1}}))
    assert subprocess.run([CLI, "validate", str(bad)], capture_output=True).returncode == 2
    assert subprocess.run([CLI, "run", str(tmp_path / "missing.json")], capture_output=True).returncode == 2
    assert subprocess.run([CLI, "--help"], capture_output=True).returncode == 0
    run = subprocess.run([CLI, "run", str(CONFIG_DIR / "fig2_correlation.json"), "--out", str(tmp_path)],
                         capture_output=True)
    assert run.returncode == 0
    csv_text = (tmp_path / "fig2_correlation.csv").read_text()
    assert csv_text.splitlines()[0] == ldma.CSV_HEADER
    manifest = json.loads((tmp_path / "fig2_correlation.manifest.json").read_text())
    assert manifest["csv"] == "fig2_correlation.csv"

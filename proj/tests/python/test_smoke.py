import math

import numpy as np
import pytest

import conic_spectra as cs

QUINTIC = [0, -1, 0, 0, 0, 1]


def test_version():
    assert cs.__version__ == "0.1.0"


def test_riemann_matrix_symmetric_positive():
    b = np.asarray(cs.riemann_matrix(QUINTIC))
    assert b.shape == (2, 2)
    assert np.max(np.abs(b - b.T)) < 1e-8
    assert np.min(np.linalg.eigvalsh(b.imag)) > 0


def test_canonical_test_fiber():
    ok, margin = cs.canonical_test(QUINTIC, [(0.2 - 0.4j, 1), (0.2 - 0.4j, -1)])
    assert ok and margin < 1e-6
    ok, _ = cs.canonical_test(QUINTIC, [(0.2 - 0.4j, 1), (-0.7 + 0.3j, 1)])
    assert not ok


def test_lattice_isospectral():
    sp = cs.lattice_spectra("(3 4)", "(1 3)(2 4)", 4, 4)
    assert sp["max_relative_mismatch"] < 1e-10
    assert sp["ker_Dstar"] - sp["ker_D"] == 2


def test_run_job_report():
    rep = cs.run_job({"command": "periods", "curve": {"f": QUINTIC}})
    assert rep["pass"] and rep["command"] == "periods"
    assert {"inputs", "results", "checks", "version_hash", "payload_hash", "runtime"} <= rep.keys()


def test_config_error_raises():
    with pytest.raises(cs.ConicError, match="/curve/f/1"):
        cs.run_job({"command": "periods", "curve": {"f": [0, "x"]}})


def test_c2_minimal_budget():
    c2, err = cs.universal_c2(QUINTIC, [-0.3 - 0.2j, 1], budget=250000)
    assert math.isfinite(err)
    assert abs(c2 + 1) < 1e-3

import math

import numpy as np
import pytest

km = pytest.importorskip("kerrmech")


def bistable(z):
    return km.from_dimensionless(km.DimensionlessParams(chi=0.08, y=1.5, z=z, sideband=30, q_m=300))


def test_thresholds_and_window():
    assert km.bistability_window(math.sqrt(3) / 2 - 1e-6) is None
    w = km.bistability_window(1.5)
    assert w["z_minus"] < w["z_plus"]
    roots = km.mean_field_roots(1.5, 0.5 * (w["z_minus"] + w["z_plus"]))
    assert len(roots) == 3
    for lam in roots:
        assert abs(4 * lam**3 - 6 * lam**2 + (2.25 + 0.25) * lam - 0.5 * (w["z_minus"] + w["z_plus"])) < 1e-12


def test_branches_and_regions():
    branches = km.solve_branches(bistable(0.26))
    assert [b["branch"] for b in branches] == ["lower", "middle", "upper"]
    assert branches[1]["stability"] != "stable"
    assert km.region_classify(1.5, 0.26, 10, 1000) == "II"
    zc = km.critical_power(1.5, 10, 1000)
    assert 0.26 < zc < 0.30
    assert km.region_classify(1.5, 0.45, 10, 1000) == "IV"


def test_round_trip_params():
    d = km.to_dimensionless(bistable(0.2))
    assert d.chi == pytest.approx(0.08)
    assert d.z == pytest.approx(0.2)


def test_kerr_steady_state():
    ss = km.steady_state(bistable(0.26), 12)
    rho = ss["rho"]
    assert rho.shape == (12, 12)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rho, rho.conj().T)
    assert ss["residual"] < 1e-9
    assert km.fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)


def test_quantum_point_observables():
    q = km.solve_quantum_point(bistable(0.26), 8, 2)
    rho = q["rho_optical"]
    assert km.photon_number(rho) == pytest.approx(q["photon_number"], rel=1e-12)
    assert km.g2_zero(rho) == pytest.approx(q["g2"], rel=1e-12)
    assert 0.9 < q["fidelity_vs_kerr"] <= 1.0 + 1e-12


def test_coherent_and_thermal_states():
    coh = km.coherent_state(30, 1.2 + 0.5j)
    assert km.photon_number(coh) == pytest.approx(abs(1.2 + 0.5j) ** 2, rel=1e-9)
    assert km.g2_zero(coh) == pytest.approx(1.0, abs=1e-8)
    th = km.thermal_state(60, 0.7)
    assert km.g2_zero(th) == pytest.approx(2.0, abs=1e-6)
    assert km.g2_zero(km.coherent_state(5, 0.0)) is None


def test_wigner_of_vacuum():
    re, im, w = km.wigner(km.coherent_state(4, 0.0), extent=3.0, points=61)
    assert w.shape == (61, 61)
    assert w[30, 30] == pytest.approx(2 / math.pi, rel=1e-9)
    cell = (re[1] - re[0]) * (im[1] - im[0])
    assert w.sum() * cell == pytest.approx(1.0, abs=1e-6)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        km.fidelity(np.eye(3), np.eye(3))  # trace 3
    with pytest.raises(ValueError):
        km.run_sweep("[physical]\nbogus = 1\n")
    with pytest.raises(ValueError):
        km.steady_state(bistable(0.2), 8, 1)


def test_run_sweep_csv():
    text = km.run_sweep("[physical]\nchi = 0.08\ny = 1.5\nsideband = 10\nq_m = 1000\n[sweep]\nz_values = 0.1, 0.3\n")
    lines = text.splitlines()
    assert lines[0] == km.CSV_HEADER
    assert len(lines) == 3


def test_polaron_check():
    assert km.polaron_check(bistable(0.2), 6, 40) < 1e-6

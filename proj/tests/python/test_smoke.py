import math

import pytest

import itecloak


def test_spherical_bessel_closed_form():
    x = 2.3
    assert itecloak.sph_j(1, x) == pytest.approx(math.sin(x) / x**2 - math.cos(x) / x, rel=1e-13)
    assert itecloak.sph_y(0, x) == pytest.approx(-math.cos(x) / x, rel=1e-13)


def test_first_te_eigenvalue_of_the_reference_annulus():
    roots = itecloak.find_eigenvalues(0.5, 1.0, 4.0, 1, "TE", 0.5, 5.0)
    assert roots
    assert roots[0]["omega"] == pytest.approx(0.991133376621, abs=1e-9)
    assert roots[0]["bc_residual"] < 1e-8
    assert abs(itecloak.ite_det(0.5, 1.0, 4.0, 1, "TE", roots[0]["omega"])) < 1e-8


def test_pec_sphere_multiplier():
    x = 1.7
    psi = math.sin(x) / x - math.cos(x)
    chi = -math.cos(x) / x - math.sin(x)
    s = itecloak.mode_scattering_coeff({"layers": [{"r": 1.0, "kind": "PEC"}]}, x, 1, "TE")
    assert abs(s + psi / complex(psi, chi)) < 1e-12


def test_eigen_incident_is_invisible_and_plane_wave_is_not():
    eig = itecloak.farfield({"device": "two_layer", "incident": {"kind": "exact_multipole"}})
    assert eig["relative_farfield"] < 1e-8
    pw = itecloak.farfield({"device": "two_layer", "omega": eig["omega"], "incident": {"kind": "plane_wave"}})
    assert pw["relative_farfield"] > 1e6 * max(eig["relative_farfield"], 1e-300)


def test_tau_sweep_summary():
    summary = itecloak.sweep("tau-sweep", {}, threads=2)
    assert summary["pass"]
    assert summary["results_csv"].startswith("row,parameter")


def test_bad_config_raises():
    with pytest.raises(ValueError):
        itecloak.farfield({"device": "blob"})
    with pytest.raises(ValueError):
        itecloak.sweep("wiggle-sweep")

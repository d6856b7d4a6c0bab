import numpy as np
import pytest

from vacrad import gaussian as g
from vacrad.errors import InvalidStateError, UndefinedAngleError
from vacrad.harmonics import analytic_first_harmonic
from vacrad.model import thermal_occupation


def test_vacuum_covariance(resonant):
    cov = g.covariance_matrix(resonant(eps=0.0), 0.43)
    np.testing.assert_array_equal(cov.entries, 0.5 * np.eye(4))


def test_thermal_covariance_without_drive(resonant):
    p = resonant(eps=0.0, th=0.1)
    cov = g.covariance_matrix(p, 0.5 * p.omega_d + 0.02)
    nb_m = thermal_occupation(cov.omega_minus, 0.1)
    nb_p = thermal_occupation(cov.omega_plus, 0.1)
    expected = 0.5 * np.diag([1 + 2 * nb_m, 1 + 2 * nb_m, 1 + 2 * nb_p, 1 + 2 * nb_p])
    np.testing.assert_allclose(cov.entries, expected, rtol=1e-12, atol=1e-15)


def test_first_diagonal_entry_n1(resonant):
    p = resonant(eta=0.9, eps=0.05, th=0.07, n=1)
    w = 0.5 * p.omega_d + 0.011
    wm = p.omega_d - w
    k = analytic_first_harmonic(p, wm)
    s = lambda x: 1 + 2 * thermal_occupation(x, p.omega_th)
    expected = 0.5 * (abs(k[-1]) ** 2 * s(w) + abs(k[0]) ** 2 * s(wm) + abs(k[1]) ** 2 * s(2 * p.omega_d - w))
    assert g.covariance_matrix(p, w).entries[0, 0] == pytest.approx(expected, rel=1e-12)


def test_covariance_rejects_bad_input():
    with pytest.raises(InvalidStateError):
        g.CovMatrix4(np.eye(3))
    m = np.eye(4)
    m[0, 1] = 0.3
    with pytest.raises(InvalidStateError):
        g.CovMatrix4(m)


def test_covariance_anomalous_roundtrip(resonant):
    m = g.pair_moments(resonant(eta=0.95, eps=0.05), 0.5 * resonant(eta=0.95).omega_d + 0.004)
    cov = g.covariance_from_moments(m)
    assert cov.anomalous == pytest.approx(m.anomalous, rel=1e-14)


def test_squeezing_without_drive_is_shot_noise(resonant):
    p = resonant(eps=0.0)
    np.testing.assert_array_equal(g.squeezing_spectrum(p, np.linspace(-0.01, 0.01, 5), theta=0.3), 1.0)
    with pytest.raises(UndefinedAngleError):
        g.optimal_angle(g.pair_moments(p, 0.5 * p.omega_d))


def test_squeezing_n1_closed_form(resonant):
    p = resonant(eta=0.95, eps=0.05, n=1)
    half, d, theta = 0.5 * p.omega_d, 0.007, 0.37
    km, kp = analytic_first_harmonic(p, half - d), analytic_first_harmonic(p, half + d)
    expected = (1 + abs(km[-1]) ** 2 + abs(kp[-1]) ** 2
                + 2 * np.real(np.exp(2j * theta) * km[0] * kp[-1]))
    assert g.squeezing_spectrum(p, d, theta=theta) == pytest.approx(expected, rel=1e-12)


def test_optimal_angle_minimizes(resonant):
    p = resonant(eta=0.97, eps=0.05, n=8)
    m = g.pair_moments(p, 0.5 * p.omega_d + 0.002)
    t = g.optimal_angle(m)
    assert -np.pi / 2 < t <= np.pi / 2
    angles = np.linspace(-np.pi / 2, np.pi / 2, 2001)
    assert g._spectrum_at(m, t) <= np.min(g._spectrum_at(m, angles)) + 1e-12


def test_optimal_angle_branch_for_real_amplitude():
    m = g.PairMoments(0.1, 0.1, 0.4 + 0j, 1.0, 1.0)
    assert g.optimal_angle(m) == pytest.approx(np.pi / 2)
    m = g.PairMoments(0.1, 0.1, -0.4 + 0j, 1.0, 1.0)
    assert g.optimal_angle(m) == pytest.approx(0.0, abs=1e-15)


def test_optimal_angle_approaches_quarter_turn_weak_damping(resonant):
    dev = []
    for gamma in (3e-2, 1e-2, 3e-3, 1e-3):
        p = resonant(eta=0.9, gamma=gamma, eps=1e-2, n=8)
        dev.append(abs(abs(g.optimal_angle(g.pair_moments(p, 0.5 * p.omega_d))) - np.pi / 4))
    assert np.all(np.diff(dev) < 0)
    assert dev[-1] < 0.05


def test_optimal_angle_deviation_grows_toward_criticality(resonant):
    def dev(eta):
        p = resonant(eta=eta, gamma=3e-2, eps=1e-2, n=8)
        return abs(abs(g.optimal_angle(g.pair_moments(p, 0.5 * p.omega_d))) - np.pi / 4)

    assert dev(0.5) < dev(0.9) < dev(0.99)


def test_squeeze_scan_fixed_angle(resonant):
    p = resonant(eta=0.99, gamma=1e-2, eps=1e-2, n=8)
    res = g.squeeze_scan(p, np.linspace(-0.01, 0.01, 21))
    assert res.theta == res.theta_opt
    assert res.s_min < 1.0
    assert res.percent == pytest.approx(100 * (1 - res.s_min))
    # the fixed-angle spectrum is minimal at the detuning where the angle was chosen
    assert res.spectrum.values[10] == pytest.approx(res.s_min)


def test_wigner_vacuum_origin():
    assert g.wigner_value(g.tmsv_covariance(0.0), np.zeros(4)) == pytest.approx(1 / np.pi**2, rel=1e-14)


def test_wigner_symmetric_and_normalized(rng):
    cov = g.rotate_locally(g.tmsv_covariance(0.3, 0.2), 0.4, -0.1)
    r = rng.normal(size=(20, 4))
    np.testing.assert_allclose(g.wigner_value(cov, r), g.wigner_value(cov, -r), rtol=1e-14)
    x = np.linspace(-5.5, 5.5, 41)
    h = x[1] - x[0]
    grid = np.stack(np.meshgrid(x, x, x, x, indexing="ij"), axis=-1)
    assert g.wigner_value(cov, grid).sum() * h**4 == pytest.approx(1.0, rel=1e-4)


def test_wigner_rejects_indefinite():
    with pytest.raises(InvalidStateError):
        g.wigner_value(g.CovMatrix4(np.diag([0.5, 0.5, 0.5, -0.1])), np.zeros(4))


@pytest.mark.parametrize("r", [0.1, 0.5, 1.2])
def test_tmsv_log_negativity(r):
    assert g.log_negativity(g.tmsv_covariance(r)) == pytest.approx(2 * r, rel=1e-12)


def test_tmsv_half_is_unit_negativity():
    assert g.log_negativity(g.tmsv_covariance(0.5)) == pytest.approx(1.0, abs=1e-12)


def test_local_rotations_preserve_negativity():
    cov = g.tmsv_covariance(0.4, 0.1)
    ref = g.log_negativity(cov)
    for a, b in [(0.3, 0.3), (1.1, -0.4), (2.0, 0.0)]:
        assert g.log_negativity(g.rotate_locally(cov, a, b)) == pytest.approx(ref, abs=1e-10)


def test_undriven_states_are_separable(resonant):
    for th in (0.0, 0.05, 0.3):
        p = resonant(eps=0.0, th=th)
        cov = g.covariance_matrix(p, 0.5 * p.omega_d + 0.01)
        assert g.partial_transpose_eigenvalue(cov) >= 0.5 - 1e-12
        assert g.log_negativity(cov) == 0.0


def test_negativity_consistent_with_eigenvalue(resonant):
    for eta in (0.9, 0.99):
        for th in (0.0, 0.14):
            p = resonant(eta=eta, gamma=1e-2, eps=1e-2, th=th, n=8)
            cov = g.covariance_matrix(p, 0.5 * p.omega_d + 1e-4)
            nu = g.partial_transpose_eigenvalue(cov)
            assert (nu < 0.5) == (g.log_negativity(cov) > 0)


def test_witness_vanishes_for_vacuum(resonant):
    p = resonant(eps=0.0)
    assert g.nonclassicality_witness(p, 0.5 * p.omega_d + 0.01) == 0.0


def test_witness_matches_squeezing_when_converged(resonant):
    p = resonant(eta=0.99, gamma=1e-2, eps=1e-2, th=0.05, n=16)
    omega = 0.5 * p.omega_d + 3e-4
    m = g.pair_moments(p, omega)
    w_min, t_w = g.witness_minimum(m)
    s_min = g.squeezing_spectrum(p, 3e-4)
    assert 1 + 0.5 * w_min == pytest.approx(s_min, abs=1e-8)
    t_s = g.optimal_angle(m)
    assert abs(np.angle(np.exp(2j * (t_w - t_s - np.pi / 2)))) < 1e-9


def test_thermal_ladder_degrades_squeezing(resonant):
    s = []
    for th in (0.0, 0.05, 0.1, 0.2):
        p = resonant(eta=0.99, gamma=1e-2, eps=1e-2, th=th, n=8)
        s.append(g.squeeze_scan(p, np.linspace(-0.005, 0.005, 11)).s_min)
    assert np.all(np.diff(s) >= 0)


def test_axis_ratio_independent_of_temperature(resonant):
    ratios = []
    for th in (0.0, 0.05, 0.1, 0.2, 0.4):
        p = resonant(eta=0.96, gamma=3e-2, eps=5 / 3 * 1e-2, th=th, n=8)
        ratios.append(g.principal_axis_ratio(g.covariance_matrix(p, 0.5 * p.omega_d + 1e-4)))
    assert max(ratios) / min(ratios) - 1 < 0.01
    assert ratios[0] > 1.0


def test_reduced_wigner_normalized(resonant):
    p = resonant(eta=0.96, n=8)
    cov = g.covariance_matrix(p, 0.5 * p.omega_d + 1e-4)
    x = np.linspace(-6, 6, 241)
    a, b = np.meshgrid(x, x, indexing="ij")
    assert g.reduced_wigner(cov, a, b).sum() * (x[1] - x[0]) ** 2 == pytest.approx(1.0, rel=1e-6)

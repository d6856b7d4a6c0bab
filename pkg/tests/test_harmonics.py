import numpy as np
import pytest

from vacrad.errors import ConvergenceError, OutOfRegimeError, SingularSystemError
from vacrad.harmonics import (
    analytic_first_harmonic,
    build_tridiagonal,
    coefficients_from_central_row,
    converged_coefficients,
    linearized_coefficients,
    scattering_coefficients,
    solve_harmonic_response,
    sum_rule_deviation,
    thomas_solve,
)
from vacrad.model import ModelParams, char_poly

# k_j at omega = 0.21 for eta/eta_c = 0.9, gamma = 0.03, eps/gamma = 0.05,
# resonant drive, N = 4: 40-digit dense inversion (mpmath) of the same system
MP_ORACLE = {
    -4: -1.6907193200399797e-11 + 4.8620802584293067e-11j,
    -3: 2.4423858760136285e-8 - 7.333766858388512e-8j,
    -2: -1.670581909282276e-5 + 5.3426527738202148e-5j,
    -1: 0.0032125099041895301 - 0.011526015384758167j,
    0: 0.97509466615053178 + 0.22210070191009878j,
    1: 0.00015444630042242335 - 0.0021951693500990393j,
    2: -2.0579361788526439e-7 + 4.2029938219102008e-6j,
    3: 1.1941052318736992e-10 - 3.4737259339356162e-9j,
    4: -3.7340295097184387e-14 + 1.6047217215742083e-12j,
}


def closed_form_n1(p, w):
    """Three N = 1 coefficients written out directly from D(w), D(w +- wd)."""
    D = lambda x: x**2 + 1j * p.gamma * x - p.omega_tilde_sq
    d0, dp, dm = D(w), D(w + p.omega_d), D(w - p.omega_d)
    ea = p.epsilon * p.omega_a
    kt = (2j * p.gamma * w / d0) / (1 - 4 * ea**2 * (dp + dm) / (d0 * dp * dm))
    return np.stack([
        2 * ea * kt / dm * np.sqrt((p.omega_d - w) / w),
        1 - kt,
        2 * ea * kt / dp * np.sqrt((p.omega_d + w) / w),
    ], axis=-1)


@pytest.fixture
def p09():
    return ModelParams.from_ratios(
        gamma_over_omega_a=0.03, eta_over_eta_c=0.9, epsilon_over_gamma=0.05, omega_d="resonant", n_harmonics=4
    )


def test_matches_high_precision_oracle(p09):
    c = scattering_coefficients(p09, 0.21)
    for j, ref in MP_ORACLE.items():
        assert abs(c[j] - ref) <= 1e-12 * abs(ref) + 1e-16, j


def test_tridiagonal_entries(p09):
    sys = build_tridiagonal(p09, 0.21, 2)
    assert sys.size == 5
    assert sys.diagonal[4] == pytest.approx(-char_poly(p09, 0.21 + 2 * p09.omega_d) / 2.0)
    dense = sys.dense()
    np.testing.assert_array_equal(dense, dense.T)
    assert np.all(np.diag(dense, 1) == -p09.epsilon)


def test_n1_matrix_matches_explicit_3x3(p09):
    w = 0.3
    D = lambda x: char_poly(p09, x)
    wa, e = p09.omega_a, p09.epsilon
    # rows ordered j = -1, 0, +1
    expected = np.array([
        [-D(w - p09.omega_d) / (2 * wa), -e, 0],
        [-e, -D(w) / (2 * wa), -e],
        [0, -e, -D(w + p09.omega_d) / (2 * wa)],
    ])
    np.testing.assert_allclose(build_tridiagonal(p09, w, 1).dense(), expected, rtol=1e-15)


def test_zero_modulation_is_diagonal(p09):
    p = p09.replace(epsilon=0.0)
    sys = build_tridiagonal(p, 0.4)
    assert np.all(sys.dense()[~np.eye(sys.size, dtype=bool)] == 0)
    inv = solve_harmonic_response(sys)
    js = np.arange(-4, 5)
    np.testing.assert_allclose(np.diag(inv), -2.0 / char_poly(p, 0.4 + js * p.omega_d), rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_thomas_matches_dense_inverse(p09, n, rng):
    w = rng.uniform(0.05, 1.0, size=6)
    sys = build_tridiagonal(p09, w, n)
    inv = solve_harmonic_response(sys)
    dense_inv = np.linalg.inv(sys.dense())
    np.testing.assert_allclose(inv, dense_inv, rtol=1e-10, atol=1e-14 * np.abs(dense_inv).max())


def test_residual(p09, rng):
    sys = build_tridiagonal(p09, 0.33, 6)
    b = rng.normal(size=13) + 1j * rng.normal(size=13)
    x = solve_harmonic_response(sys, b)
    assert np.linalg.norm(sys.matvec(x) - b) <= 1e-12 * np.linalg.norm(b)


def test_thomas_rejects_tiny_pivot():
    lower = np.zeros(2, dtype=complex)
    diag = np.array([1.0, 0.0, 1.0], dtype=complex)
    with pytest.raises(SingularSystemError):
        thomas_solve(lower, diag, lower, np.eye(3, dtype=complex))


def test_undamped_pole_is_singular():
    p = ModelParams(eta0=0.1, epsilon=0.0, omega_d=0.5, gamma=0.0, n_harmonics=1)
    wt = np.sqrt(p.omega_tilde_sq)
    with pytest.raises(SingularSystemError):
        build_tridiagonal(p, wt - p.omega_d)


def test_n1_equals_closed_form(p09):
    w = np.linspace(0.01, p09.omega_d - 0.01, 200)
    p = p09.replace(n_harmonics=1)
    general = scattering_coefficients(p, w).k
    np.testing.assert_allclose(general, closed_form_n1(p, w), rtol=1e-10)
    np.testing.assert_allclose(analytic_first_harmonic(p, w).k, closed_form_n1(p, w), rtol=1e-12)


def test_two_assembly_routes_agree(p09):
    w = np.linspace(0.02, 1.5, 50)
    a = scattering_coefficients(p09, w).k
    b = coefficients_from_central_row(p09, w).k
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-15)


def test_analytic_out_of_regime(p09):
    with pytest.raises(OutOfRegimeError):
        analytic_first_harmonic(p09, p09.omega_d)
    with pytest.raises(OutOfRegimeError):
        analytic_first_harmonic(p09, 0.0)


def test_zero_modulation_reflection(p09):
    p = p09.replace(epsilon=0.0)
    w = np.linspace(0.05, 1.3, 31)
    c = scattering_coefficients(p, w)
    np.testing.assert_allclose(c[0], 1 - 2j * p.gamma * w / char_poly(p, w), rtol=1e-14)
    for j in (-4, -1, 1, 3):
        assert np.all(c[j] == 0)


def test_no_scattering_without_damping_or_drive():
    p = ModelParams(eta0=0.1, epsilon=0.0, gamma=0.0, omega_d=0.7)
    a = analytic_first_harmonic(p, 0.2)
    assert a[0] == 1.0


def test_linearized_limit(p09):
    p = p09.replace(epsilon=1e-4 * p09.gamma, n_harmonics=1)
    w = np.linspace(0.05, p.omega_d - 0.05, 40)
    exact = analytic_first_harmonic(p, w).k
    lin = linearized_coefficients(p, w).k
    np.testing.assert_allclose(lin, exact, rtol=1e-6)


def test_small_eps_power_law(p09):
    w = 0.5 * p09.omega_d
    eps = p09.gamma * np.logspace(-4, -2, 5)
    for j in (-1, 1, -2, 2):
        mags = [abs(scattering_coefficients(p09.replace(epsilon=e), w)[j]) for e in eps]
        slope = np.polyfit(np.log(eps), np.log(mags), 1)[0]
        assert abs(slope - abs(j)) < 0.02, (j, slope)


def test_resonant_k_minus1_peaks_at_half_drive(p09):
    p = p09.replace(n_harmonics=1)
    w = np.linspace(0.01, p.omega_d - 0.01, 2001)
    mags = np.abs(analytic_first_harmonic(p, w)[-1])
    assert abs(w[np.argmax(mags)] - 0.5 * p.omega_d) <= w[1] - w[0]


def test_sum_rule_exact_at_any_truncation(p09):
    w = np.linspace(0.01, 2.0, 100)
    for n in (1, 2, 4, 8):
        c = scattering_coefficients(p09, w, n)
        assert np.max(np.abs(sum_rule_deviation(p09, c))) < 1e-12


def test_converged_far_from_criticality():
    p = ModelParams.from_ratios(gamma_over_omega_a=0.03, eta_over_eta_c=0.5, epsilon_over_gamma=1 / 30, omega_d="resonant")
    _, n = converged_coefficients(p, np.linspace(0.02, 1.5, 40))
    assert n <= 4


def test_converged_order_grows_near_criticality():
    def order(eta):
        p = ModelParams.from_ratios(gamma_over_omega_a=0.03, eta_over_eta_c=eta, epsilon_over_gamma=1 / 30, omega_d="resonant")
        return converged_coefficients(p, np.array([0.5 * p.omega_d, 0.37 * p.omega_d]))[1]

    assert order(0.99) > order(0.5)


def test_converged_zero_modulation_stops_immediately(p09):
    _, n = converged_coefficients(p09.replace(epsilon=0.0), np.array([0.3]))
    assert n == 2


def test_converged_ceiling():
    p = ModelParams.from_ratios(gamma_over_omega_a=0.03, eta_over_eta_c=0.99, epsilon_over_gamma=1 / 30, omega_d="resonant")
    with pytest.raises(ConvergenceError):
        converged_coefficients(p, np.array([0.05]), rel_tol=1e-14, n_max=2)


def test_channel_flip_continuity(p09):
    # |k_-1| is continuous across w = wd where its channel frequency changes sign
    wd = p09.omega_d
    w = wd + np.array([-1e-7, 1e-7])
    mags = np.abs(scattering_coefficients(p09, w)[-1])
    assert abs(mags[0] - mags[1]) < 1e-5

import math

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharmonic.hermite import Poly, from_hermite, hermite, poly_diff, poly_eval, to_hermite, working_precision
from anharmonic.hierarchy import (
    MAX_ORDER,
    OscillatorSpec,
    _perturb_hermite,
    apply_perturbation,
    default_residual_grid,
    direct_energy,
    gamma_of,
    residual,
    scaled_couplings,
    solve_hierarchy,
    wavefunction,
)

QUARTIC = OscillatorSpec(mass=0.5, omega=2.0, mu=8.0, N=2)
SEXTIC = OscillatorSpec(mass=0.5, omega=2.0, mu=12.0, N=3)
# Variational PMS point of the quartic ground state at order 15.
QUARTIC_PMS_OMEGA = 8.149297051254894


@pytest.mark.parametrize(
    "spec,expected",
    [
        (QUARTIC, math.sqrt(2) / 3),
        (SEXTIC, math.sqrt(2) / 4),
        (OscillatorSpec(mass=0.5, omega=0.0, mu=1.0, N=2), 1 / 6),
    ],
)
def test_gamma_of(spec, expected):
    assert float(gamma_of(spec)) == pytest.approx(expected, rel=1e-15)


def test_spec_validation():
    with pytest.raises(ValueError):
        OscillatorSpec(mass=0.0)
    with pytest.raises(ValueError):
        OscillatorSpec(N=1)
    with pytest.raises(ValueError):
        OscillatorSpec(mu=-1.0)
    with pytest.raises(ValueError):
        OscillatorSpec(omega=0.0, mu=0.0)


def test_potential():
    assert QUARTIC.potential(1.0) == pytest.approx(0.25 * 4 + 2.0)


def test_scaled_couplings_example():
    c = scaled_couplings(QUARTIC, 2.0)
    assert float(c.Omega_tilde) == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    assert float(c.beta) == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    assert float(c.r) == pytest.approx(0.5, rel=1e-15)


@pytest.mark.parametrize("Omega", [0.3, 2.0, 17.0])
def test_pure_anharmonic_couplings(Omega):
    c = scaled_couplings(OscillatorSpec(omega=0.0, mu=1.0), Omega)
    assert c.Omega_tilde == c.Omega
    assert c.r == 1


@pytest.mark.parametrize("Omega", [0.0, -1.0])
def test_rejects_nonpositive_omega(Omega):
    with pytest.raises(ValueError):
        scaled_couplings(QUARTIC, Omega)


@settings(max_examples=50, deadline=None)
@given(
    st.just(0.0) | st.floats(min_value=1e-3, max_value=10.0),
    st.floats(min_value=1e-3, max_value=100.0),
    st.floats(min_value=0.1, max_value=2.0),
    st.sampled_from([2, 3, 4]),
)
def test_coupling_invariants(omega, Omega, mass, N):
    spec = OscillatorSpec(mass=mass, omega=omega, mu=4.0, N=N)
    c = scaled_couplings(spec, Omega)
    assert 0 < c.r <= 1
    assert (c.r == 1) == (omega == 0)
    assert min(c.beta, c.gamma, c.g, c.u_scale) > 0
    assert c.Omega_tilde >= c.Omega and c.Omega_tilde >= omega


def test_scaled_perturbation_matches_x_form():
    """The u-form perturbation, mapped back to x, reproduces the x-form bracket."""
    with working_precision(60):
        spec, Omega = QUARTIC, 2
        c = scaled_couplings(spec, Omega)
        m, w, mu, hbar, N = (gmpy2.mpfr(v) for v in (spec.mass, spec.omega, spec.mu, spec.hbar, spec.N))
        N = spec.N
        f = Poly([1, -3, 2, 0.5, -1])
        Pf = apply_perturbation(f, c, N)
        us = c.u_scale
        a = gmpy2.sqrt(mu * m / N)
        for x in [gmpy2.mpfr(v) / 7 for v in range(1, 20)]:
            u = us * x
            xi, dxi = poly_eval(f, u), poly_eval(poly_diff(f), u) * us
            rhs_x = (
                2 * a * x**N / hbar * dxi
                - m**2 * gmpy2.mpfr(Omega) ** 2 / hbar**2 * x**2 * xi
                - a * x ** (N - 1) / hbar**2 * (2 * m * c.Omega_tilde * x**2 - hbar * N) * xi
            )
            scaled = m * c.Omega_tilde / hbar * poly_eval(Pf, u)
            assert abs(scaled - rhs_x) <= 1e-20 * abs(rhs_x)


def test_apply_perturbation_examples():
    with working_precision(32):
        c = scaled_couplings(QUARTIC, 3.0)
        g, r = c.g, c.r
        p = apply_perturbation(Poly([1]), c, 2)
        expected = [0, 2 * g, -r, -2 * g]
        assert all(abs(a - b) < 1e-30 for a, b in zip(p.coeffs, expected))
        c3 = scaled_couplings(SEXTIC, 3.0)
        g, r = c3.g, c3.r
        p = apply_perturbation(Poly([0, 2]), c3, 3)
        expected = [0, 0, 0, 10 * g - 2 * r, 0, -4 * g]
        assert all(abs(a - b) < 1e-30 for a, b in zip(p.coeffs, expected))
        assert apply_perturbation(Poly(), c, 2).is_zero()


@pytest.mark.parametrize("N", [2, 3, 4])
def test_hermite_route_matches_monomial_route(N):
    with working_precision(32):
        c = scaled_couplings(OscillatorSpec(mu=5.0, N=N), 4.0)
        h = to_hermite(Poly([0.5, -1, 0, 2, 0.25, -0.75]))
        via_hermite = from_hermite(type(h)(_perturb_hermite(list(h.coeffs), c.g, c.r, N)))
        via_monomial = apply_perturbation(from_hermite(h), c, N)
        assert via_hermite.degree == via_monomial.degree
        for a, b in zip(via_hermite.coeffs, via_monomial.coeffs):
            assert abs(a - b) < 1e-28 * max(1, abs(b))


@pytest.mark.parametrize("n", [0, 1])
def test_order_zero(n):
    sol = solve_hierarchy(QUARTIC, n, 3.0, 0)
    assert sol.xi[0] == hermite(n)
    with working_precision(32):
        assert abs(sol.energies[0] - sol.couplings.Omega_tilde * (n + gmpy2.mpfr(0.5))) < 1e-30
    assert direct_energy(sol) == sol.energies[0]


def test_order_bounds():
    with pytest.raises(ValueError):
        solve_hierarchy(QUARTIC, 0, 3.0, MAX_ORDER + 1)
    with pytest.raises(ValueError):
        solve_hierarchy(QUARTIC, 2, 3.0, 3)
    with pytest.raises(ValueError):
        solve_hierarchy(QUARTIC, 0, 3.0, 3, gauge="other")
    with pytest.raises(ValueError):
        solve_hierarchy(QUARTIC, 0, -1.0, 3)


@pytest.mark.parametrize("n", [0, 1])
def test_intermediate_normalization(n):
    sol = solve_hierarchy(QUARTIC, n, 5.0, 12, gauge="intermediate")
    for j in range(1, 13):
        assert sol.xi_hermite[j][n] == 0
        assert gmpy2.is_finite(sol.energies[j])


@pytest.mark.parametrize("n", [0, 1])
def test_origin_gauge_has_no_leading_monomial(n):
    sol = solve_hierarchy(QUARTIC, n, 5.0, 12)
    for j in range(1, 13):
        assert abs(sol.xi[j][n]) < 1e-25 * max(abs(v) for v in sol.xi[j].coeffs)


@pytest.mark.parametrize("n", [0, 1])
def test_energies_do_not_depend_on_gauge(n):
    a = solve_hierarchy(SEXTIC, n, 6.0, 15, gauge="origin")
    b = solve_hierarchy(SEXTIC, n, 6.0, 15, gauge="intermediate")
    for ea, eb in zip(a.energies, b.energies):
        assert abs(ea - eb) <= 1e-24 * max(1, abs(ea))


@pytest.mark.parametrize("n", [0, 1])
def test_parity_for_odd_N(n):
    sol = solve_hierarchy(SEXTIC, n, 6.0, 8)
    for p in sol.xi:
        assert all(c == 0 for k, c in enumerate(p.coeffs) if k % 2 != n)


def test_truncate_matches_fresh_solve():
    full = solve_hierarchy(QUARTIC, 0, 6.0, 10)
    assert full.truncate(4) == solve_hierarchy(QUARTIC, 0, 6.0, 4)
    with pytest.raises(ValueError):
        full.truncate(11)


@pytest.mark.parametrize("n", [0, 1])
@pytest.mark.parametrize("m", [0, 5, 20])
def test_harmonic_exactness(n, m):
    spec = OscillatorSpec(mu=0.0)
    sol = solve_hierarchy(spec, n, 1e-15, m)
    assert abs(direct_energy(sol) - (n + 0.5) * 2.0) <= 1e-20 * (n + 0.5) * 2.0


def test_harmonic_residual_vanishes():
    sol = solve_hierarchy(OscillatorSpec(mu=0.0), 0, 1e-12, 0)
    assert residual(sol) < 1e-20


def test_order_zero_residual_is_bare_perturbation():
    for n in (0, 1):
        sol = solve_hierarchy(QUARTIC, n, 5.0, 0)
        grid = default_residual_grid(sol)
        with working_precision(32):
            pert = apply_perturbation(hermite(n), sol.couplings, 2)
            us = sol.couplings.u_scale
            num = max(abs(poly_eval(pert, us * x)) for x in grid)
            den = max(abs(poly_eval(hermite(n), us * x)) for x in grid)
        assert residual(sol, grid) == pytest.approx(float(num / den * us * us), rel=1e-12)


def test_residual_sequence_frozen():
    # Quartic ground state at its order-15 PMS point.
    got = [residual(solve_hierarchy(QUARTIC, 0, QUARTIC_PMS_OMEGA, m)) for m in (1, 5, 9, 15)]
    assert got[0] > got[1] > got[2] > got[3]
    assert got[3] < 1e-2 * got[0]


def test_flattening_in_omega():
    """Truncated series varies less across +-10% of the PMS point as order grows."""
    lo, hi = 0.9 * QUARTIC_PMS_OMEGA, 1.1 * QUARTIC_PMS_OMEGA
    spread = [
        abs(float(direct_energy(solve_hierarchy(QUARTIC, 0, lo, m)) - direct_energy(solve_hierarchy(QUARTIC, 0, hi, m))))
        for m in (2, 6, 10, 14)
    ]
    assert spread == sorted(spread, reverse=True)


def test_wavefunction_examples():
    assert wavefunction(solve_hierarchy(QUARTIC, 1, 5.0, 6), 0.0) == 0.0
    assert wavefunction(solve_hierarchy(QUARTIC, 0, 5.0, 0), 0.0) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.01, max_value=3.0), st.sampled_from([0, 1]))
def test_wavefunction_parity(x, n):
    sol = solve_hierarchy(QUARTIC, n, 6.0, 5)
    a, b = wavefunction(sol, x), wavefunction(sol, -x)
    assert a == pytest.approx((-1) ** n * b, rel=1e-14, abs=1e-300)


def test_psi_derivative_matches_finite_difference():
    sol = solve_hierarchy(SEXTIC, 1, 6.0, 10)
    x = np.linspace(0.1, 2.0, 9)
    h = 1e-6
    _, d = sol.psi_and_derivative(x)
    fd = (sol.psi_and_derivative(x + h)[0] - sol.psi_and_derivative(x - h)[0]) / (2 * h)
    np.testing.assert_allclose(d, fd, rtol=1e-6, atol=1e-9)

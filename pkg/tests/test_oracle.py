import numpy as np
import pytest

from anharmonic.hierarchy import OscillatorSpec, solve_hierarchy
from anharmonic.oracle import OracleError, compare_wavefunction, default_length, energy_guess, numerov_solve

from helpers import QUARTIC_B2, oracle, oracle_for, variational

HARMONIC = OscillatorSpec(mass=0.5, omega=2.0, mu=0.0)
PURE_QUARTIC = OscillatorSpec(mass=0.5, omega=0.0, mu=1.0, N=2)
# Frozen from this solver; V = x^4/4, m = 1/2, hbar = 1.
PURE_QUARTIC_E0 = 0.6679862592


@pytest.mark.parametrize("n", [0, 1])
def test_harmonic_eigenvalue(n):
    assert abs(oracle_for(HARMONIC, n).energy - (2 * n + 1)) < 1e-9


@pytest.mark.parametrize("n", [0, 1])
def test_harmonic_wavefunction(n):
    sol = oracle_for(HARMONIC, n)
    x = sol.grid
    exact = (x if n else 1.0) * np.exp(-0.5 * x * x)
    exact = exact / np.sqrt(2 * np.trapezoid(exact * exact, x))
    keep = np.abs(exact) > 1e-3 * np.abs(exact).max()
    rel = np.abs(sol.psi[keep] / exact[keep] - 1)
    assert rel.max() < 1e-7


def test_quartic_ground_state():
    assert abs(oracle("beta2", 2, 0).energy - 1.607541302) < 5e-10


def test_pure_quartic_frozen():
    assert oracle_for(PURE_QUARTIC, 0).energy == pytest.approx(PURE_QUARTIC_E0, abs=5e-10)


def test_pure_quartic_scaling():
    # V = g x^4 at m = 1/2: mu/4 = g.
    e_quarter = oracle_for(OscillatorSpec(mass=0.5, omega=0.0, mu=1.0, N=2), 0).energy
    e_one = oracle_for(OscillatorSpec(mass=0.5, omega=0.0, mu=4.0, N=2), 0).energy
    assert e_quarter == pytest.approx(0.25 ** (1 / 3) * e_one, rel=1e-8)


@pytest.mark.parametrize("case,N,n", [("beta2", 2, 0), ("beta2", 4, 1), ("beta400", 3, 0), ("beta400", 4, 1)])
def test_node_count_and_decay(case, N, n):
    sol = oracle(case, N, n)
    peak = np.abs(sol.psi).max()
    assert sol.nodes == 0
    assert sol.boundary == ("odd" if n else "even")
    assert abs(sol.psi[-2]) < 1e-12 * peak
    assert 2 * np.trapezoid(sol.psi**2, sol.grid) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("case,N,n", [("beta2", 3, 0), ("beta400", 2, 1)])
def test_grid_doubling(case, N, n):
    from anharmonic.reference import case_spec

    spec = case_spec(case, N)
    assert abs(oracle_for(spec, n, 40000).energy - oracle(case, N, n).energy) < 1e-9


def test_too_few_steps():
    with pytest.raises(ValueError):
        numerov_solve(QUARTIC_B2, 0, steps=1000)


def test_unsupported_state():
    with pytest.raises(ValueError):
        numerov_solve(QUARTIC_B2, 2)


def test_domain_too_small():
    with pytest.raises(OracleError):
        numerov_solve(QUARTIC_B2, 1, L=0.4)


def test_default_length_satisfies_margin():
    E = energy_guess(QUARTIC_B2, 0)
    L = default_length(QUARTIC_B2, E)
    assert QUARTIC_B2.potential(L) >= E + 50


def test_identical_inputs_ratio_one():
    sol = oracle("beta2", 2, 0)
    ratios = compare_wavefunction(sol, sol)
    assert all(r == pytest.approx(1.0, abs=1e-14) for _, r in ratios)


def test_ratio_excludes_origin_for_odd_state():
    sol = oracle("beta2", 2, 1)
    approx = solve_hierarchy(QUARTIC_B2, 1, 9.0, 6)
    xs = [x for x, _ in compare_wavefunction(approx, sol)]
    assert xs and xs[0] > 0


def test_order_zero_worse_than_order_15():
    num = oracle("beta2", 2, 0)
    w = variational("beta2", 2, 0)[15].Omega_star
    dev = lambda m: max(abs(r - 1) for _, r in compare_wavefunction(solve_hierarchy(QUARTIC_B2, 0, w, m), num))
    assert dev(0) > dev(15)

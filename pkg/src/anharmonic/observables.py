"""Half-line quadrature and energy estimators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad_vec

from .hierarchy import ExpansionSolution, direct_energy, truncation_point

Estimator = Literal["direct", "variational"]


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate, error_bound):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-13
    abs_tol: float = 1e-30
    # Integrate on [0, X] where 2 gamma X^(N+1) + 2 beta X^2 = truncation_log.
    truncation_log: float = 200.0
    max_intervals: int = 400

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.truncation_log > 0:
            raise ValueError("truncation_log must be positive")

    def halved(self) -> QuadratureSettings:
        return QuadratureSettings(self.rel_tol / 2, self.abs_tol / 2, self.truncation_log, self.max_intervals)


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    estimator: Estimator
    Omega: float
    order: int
    norm: float = float("nan")
    error_bound: float = 0.0


def weighted_integral(
    f: Callable[[float], np.ndarray | float],
    upper: float,
    settings: QuadratureSettings = QuadratureSettings(),
    lower: float = 0.0,
):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lower, upper]``.

    ``f`` may be vector valued; tolerances then apply in the max norm.
    Returns ``(value, error_bound)``.  Raises :class:`QuadratureError` when
    the subdivision budget is exhausted.
    """
    value, err, info = quad_vec(
        f,
        lower,
        upper,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        norm="max",
        limit=settings.max_intervals,
        full_output=True,
    )
    # status 2 means the float64 rounding floor was hit; the bound is still reported.
    if info.status == 1:
        raise QuadratureError(f"quadrature on [{lower}, {upper}] did not converge: {info.message}", value, err)
    return value, err


def integration_limit(sol: ExpansionSolution, settings: QuadratureSettings) -> float:
    c = sol.couplings
    return truncation_point(2 * float(c.gamma), 2 * float(c.beta), sol.spec.N, settings.truncation_log)


def energy_variational(sol: ExpansionSolution, settings: QuadratureSettings = QuadratureSettings()) -> EnergyEstimate:
    """Rayleigh quotient of the truncated ansatz, kinetic term in first-derivative form.

    Both integrals run over the half-line only; the even/odd extension
    doubles numerator and denominator alike.
    """
    spec = sol.spec
    kin = spec.hbar**2 / (2 * spec.mass)

    def integrand(x):
        psi, dpsi = sol.psi_and_derivative(x)
        v = spec.potential(x)
        return np.array([kin * dpsi * dpsi + v * psi * psi, psi * psi])

    (num, den), err = weighted_integral(integrand, integration_limit(sol, settings), settings)
    if not den > 0:
        raise QuadratureError("trial wave function has vanishing norm", den, err)
    value = num / den
    bound = err * (abs(value) + 1.0) / den
    return EnergyEstimate(float(value), "variational", float(sol.couplings.Omega), sol.order_m, float(den), float(bound))


def energy_direct(sol: ExpansionSolution) -> EnergyEstimate:
    return EnergyEstimate(float(direct_energy(sol)), "direct", float(sol.couplings.Omega), sol.order_m)


def estimate_energy(sol: ExpansionSolution, estimator: Estimator, settings: QuadratureSettings = QuadratureSettings()) -> EnergyEstimate:
    if estimator == "variational":
        return energy_variational(sol, settings)
    if estimator == "direct":
        return energy_direct(sol)
    raise ValueError(f"unknown estimator {estimator!r}")


def error_metric(approx: float, reference: float) -> float:
    """Percentage error ``100 |approx - reference| / |reference|``."""
    if reference == 0:
        raise ValueError("reference energy must be nonzero")
    return 100.0 * abs(approx - reference) / abs(reference)

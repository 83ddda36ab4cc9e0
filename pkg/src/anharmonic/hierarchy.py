"""Order-by-order solution of the delta-rearranged reduced Schrodinger equation.

With ``psi(x) = exp(-gamma |x|^(N+1) - beta x^2) xi(x)`` and the scaled
coordinate ``u = sqrt(m Omega_t / hbar) x``, the reduced equation reads::

    xi'' - 2u xi' + (eps - 1) xi = delta * P xi
    P xi = 2g u^N xi' - r u^2 xi - g u^(N-1) (2u^2 - N) xi

where ``eps = 2E / (hbar Omega_t)``, ``r = Omega^2 / Omega_t^2`` and
``g = sqrt(mu m / N) / hbar * (hbar / (m Omega_t))^((N+1)/2)``.  Inserting
``xi = sum_j delta^j xi_j`` and ``eps = sum_j delta^j eps_j`` and matching
powers of delta gives, for ``j >= 1``::

    (L + 2n) xi_j = P xi_{j-1} - sum_{k=1..j} eps_k xi_{j-k}

with ``L = d^2/du^2 - 2u d/du`` diagonal on Hermite polynomials,
``(L + 2n) H_k = 2(n - k) H_k``.  The ``H_n`` component of the right-hand
side must vanish, which fixes ``eps_j``.  The free ``H_n`` admixture of
``xi_j`` is fixed by a gauge:

* ``"origin"`` (default): ``xi_j`` has no ``u^n`` monomial term, so
  ``xi(0)`` (n = 0) or ``xi'(0)`` (n = 1) keeps its order-zero value;
* ``"intermediate"``: ``xi_j`` has no ``H_n`` component.

Energies of the truncated series do not depend on the gauge; the
truncated wave function, and hence the variational energy, does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import gmpy2
import numpy as np

from .hermite import (
    DEFAULT_DPS,
    HermiteCoeffs,
    Poly,
    _add,
    _default_precision,
    _hermite_int,
    from_hermite,
    hermite,
    hermite_diff,
    hermite_mul_u,
    poly_diff,
    poly_eval,
    poly_shift_mul,
    to_mpfr,
    working_precision,
)

MAX_ORDER = 40
GAUGES = ("origin", "intermediate")
_ZERO = gmpy2.mpfr(0)


class HierarchyError(RuntimeError):
    """Internal inconsistency while solving the perturbative hierarchy."""


@dataclass(frozen=True)
class OscillatorSpec:
    """``H = -hbar^2/(2m) d^2/dx^2 + m omega^2 x^2 / 2 + mu/(2N) x^(2N)``.

    ``mu = 0`` (pure harmonic) is accepted as long as ``omega > 0``.
    """

    mass: float = 0.5
    omega: float = 2.0
    mu: float = 8.0
    N: int = 2
    hbar: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be nonnegative, got {self.omega}")
        if not self.mu >= 0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.mu == 0 and self.omega == 0:
            raise ValueError("potential is not confining: omega and mu both vanish")
        object.__setattr__(self, "N", int(self.N))

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.mass * self.omega**2 * x**2 + self.mu / (2 * self.N) * x ** (2 * self.N)

    @property
    def anharmonic_scale(self) -> float:
        """Frequency scale ``(mu hbar^(N-1) / m^N)^(1/(N+1))`` of the pure x^(2N) term."""
        N = self.N
        return (self.mu * self.hbar ** (N - 1) / self.mass**N) ** (1.0 / (N + 1))

    @property
    def frequency_scale(self) -> float:
        return max(self.omega, self.anharmonic_scale)


@_default_precision
def gamma_of(spec: OscillatorSpec):
    """Asymptotic decay coefficient: ``psi ~ exp(-gamma |x|^(N+1))``."""
    N = spec.N
    return gmpy2.sqrt(to_mpfr(spec.mu) * to_mpfr(spec.mass) / N) / ((N + 1) * to_mpfr(spec.hbar))


@dataclass(frozen=True)
class ScaledCouplings:
    Omega: gmpy2.mpfr
    Omega_tilde: gmpy2.mpfr
    beta: gmpy2.mpfr
    gamma: gmpy2.mpfr
    g: gmpy2.mpfr
    r: gmpy2.mpfr
    u_scale: gmpy2.mpfr


@_default_precision
def scaled_couplings(spec: OscillatorSpec, Omega) -> ScaledCouplings:
    Omega = to_mpfr(Omega)
    if not Omega > 0:
        raise ValueError(f"Omega must be positive, got {Omega}")
    m, w, hbar = to_mpfr(spec.mass), to_mpfr(spec.omega), to_mpfr(spec.hbar)
    N = spec.N
    omega_t = gmpy2.sqrt(w * w + Omega * Omega)
    a = m * omega_t / hbar
    g = gmpy2.sqrt(to_mpfr(spec.mu) * m / N) / hbar * a ** (-gmpy2.mpfr(N + 1) / 2)
    return ScaledCouplings(
        Omega=Omega,
        Omega_tilde=omega_t,
        beta=a / 2,
        gamma=gamma_of(spec),
        g=g,
        r=Omega * Omega / (omega_t * omega_t),
        u_scale=gmpy2.sqrt(a),
    )


@_default_precision
def apply_perturbation(xi: Poly, c: ScaledCouplings, N: int) -> Poly:
    """``2g u^N xi' - r u^2 xi - g u^(N-1) (2u^2 - N) xi`` in monomials."""
    if xi.is_zero():
        return Poly()
    g, r = c.g, c.r
    t1 = poly_shift_mul(poly_diff(xi), N) * (2 * g)
    t2 = poly_shift_mul(xi, 2) * (-r)
    t3 = poly_shift_mul(xi, N + 1) * (-2 * g) + poly_shift_mul(xi, N - 1) * (g * N)
    return t1 + t2 + t3


def _mul_u_pow(c: list, k: int) -> list:
    for _ in range(k):
        c = hermite_mul_u(c)
    return c


def _perturb_hermite(c: Sequence, g, r, N: int) -> list:
    """Hermite-basis version of :func:`apply_perturbation`."""
    if not c:
        return []
    low = _mul_u_pow(list(c), N - 1)
    u2 = hermite_mul_u(hermite_mul_u(list(c)))
    high = hermite_mul_u(hermite_mul_u(low))
    deriv = _mul_u_pow(hermite_diff(c), N)
    two_g, gN = 2 * g, g * N
    out = [_ZERO] * len(high)
    for k, v in enumerate(deriv):
        out[k] = out[k] + two_g * v
    for k, v in enumerate(u2):
        out[k] = out[k] - r * v
    for k, v in enumerate(high):
        out[k] = out[k] - two_g * v
    for k, v in enumerate(low):
        out[k] = out[k] + gN * v
    return out


@dataclass(frozen=True)
class ExpansionSolution:
    """Per-order corrections ``xi_j`` (Hermite basis) and energies ``E_nj``."""

    spec: OscillatorSpec
    couplings: ScaledCouplings
    state_n: int
    order_m: int
    xi_hermite: tuple[HermiteCoeffs, ...]
    energies: tuple[gmpy2.mpfr, ...]
    dps: int = field(default=32, compare=False)
    gauge: str = "origin"

    @cached_property
    def xi(self) -> tuple[Poly, ...]:
        with working_precision(self.dps):
            return tuple(from_hermite(h) for h in self.xi_hermite)

    @cached_property
    def total_hermite(self) -> HermiteCoeffs:
        with working_precision(self.dps):
            acc = HermiteCoeffs()
            for h in self.xi_hermite:
                acc = acc + h
            return acc

    @cached_property
    def total_poly(self) -> Poly:
        """``sum_j xi_j`` as a monomial polynomial in ``u``."""
        with working_precision(self.dps):
            return from_hermite(self.total_hermite)

    @cached_property
    def _float_coeffs(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.total_poly
        return p.to_numpy(), poly_diff(p).to_numpy()

    def truncate(self, order: int) -> ExpansionSolution:
        """The same expansion cut at a lower order (the hierarchy is sequential)."""
        if not 0 <= order <= self.order_m:
            raise ValueError(f"order {order} outside 0..{self.order_m}")
        return ExpansionSolution(
            self.spec,
            self.couplings,
            self.state_n,
            order,
            self.xi_hermite[: order + 1],
            self.energies[: order + 1],
            self.dps,
            self.gauge,
        )

    @property
    def eps(self) -> tuple:
        """Dimensionless energy coefficients ``2 E_nj / (hbar Omega_t)``."""
        scale = 2 / (to_mpfr(self.spec.hbar) * self.couplings.Omega_tilde)
        return tuple(e * scale for e in self.energies)

    def psi_and_derivative(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Unnormalized ``psi(x)`` and ``psi'(x)`` for ``x >= 0`` (float64)."""
        x = np.asarray(x, dtype=float)
        c = self.couplings
        N = self.spec.N
        us, beta, gam = float(c.u_scale), float(c.beta), float(c.gamma)
        cf, dcf = self._float_coeffs
        u = us * x
        xi = np.polynomial.polynomial.polyval(u, cf)
        dxi = np.polynomial.polynomial.polyval(u, dcf) * us
        weight = np.exp(-gam * x ** (N + 1) - beta * x * x)
        slope = -(N + 1) * gam * x**N - 2 * beta * x
        return weight * xi, weight * (dxi + slope * xi)


def _hermite_taylor_row(n: int, size: int) -> list[int]:
    """``h[k]`` = coefficient of ``u^n`` in ``H_k`` (n in {0, 1})."""
    row = [0] * size
    for k in range(size):
        mono = _hermite_int(k)
        row[k] = mono[n] if n < len(mono) else 0
    return row


def solve_hierarchy(
    spec: OscillatorSpec,
    n: int,
    Omega,
    m: int,
    dps: int | None = None,
    gauge: str = "origin",
) -> ExpansionSolution:
    """Solve the hierarchy for state ``n`` through order ``m`` at frequency ``Omega``."""
    if n not in (0, 1):
        raise ValueError(f"only n = 0 and n = 1 are supported, got {n}")
    if not 0 <= m <= MAX_ORDER:
        raise ValueError(f"order must lie in 0..{MAX_ORDER}, got {m}")
    if gauge not in GAUGES:
        raise ValueError(f"unknown gauge {gauge!r}; expected one of {GAUGES}")
    if dps is None:
        dps = DEFAULT_DPS
    with working_precision(dps):
        c = scaled_couplings(spec, Omega)
        N = spec.N
        taylor = _hermite_taylor_row(n, n + m * (N + 1) + 1)
        xi = [[_ZERO] * n + [gmpy2.mpfr(1)]]
        eps = [gmpy2.mpfr(2 * n + 1)]
        for j in range(1, m + 1):
            src = _perturb_hermite(xi[j - 1], c.g, c.r, N)
            for k in range(1, j):
                ek = eps[k]
                src = _add(src, [-ek * v for v in xi[j - k]])
            if len(src) <= n:
                src = src + [_ZERO] * (n + 1 - len(src))
            # Solvability: the H_n component of the full source must vanish.
            e_j = src[n]
            if not gmpy2.is_finite(e_j):
                raise HierarchyError(f"non-finite energy coefficient at order {j}")
            eps.append(e_j)
            src[n] = _ZERO
            corr = [v / (2 * (n - k)) if k != n else _ZERO for k, v in enumerate(src)]
            if gauge == "origin":
                lead = _ZERO
                for k, v in enumerate(corr):
                    if taylor[k]:
                        lead = lead + taylor[k] * v
                corr[n] = -lead / taylor[n]
            xi.append(corr)
        half_hw = to_mpfr(spec.hbar) * c.Omega_tilde / 2
        return ExpansionSolution(
            spec=spec,
            couplings=c,
            state_n=n,
            order_m=m,
            xi_hermite=tuple(HermiteCoeffs(v) for v in xi),
            energies=tuple(e * half_hw for e in eps),
            dps=dps,
            gauge=gauge,
        )


def direct_energy(sol: ExpansionSolution):
    """Truncated energy series ``sum_j E_nj`` at delta = 1."""
    with working_precision(sol.dps):
        total = _ZERO
        for e in sol.energies:
            total = total + e
        return total


def wavefunction(sol: ExpansionSolution, x):
    """Unnormalized ``psi_n(x)`` on the full line, parity ``(-1)^n``."""
    x_arr = np.asarray(x, dtype=float)
    psi, _ = sol.psi_and_derivative(np.abs(x_arr))
    if sol.state_n % 2:
        psi = psi * np.sign(x_arr)
    return float(psi) if psi.ndim == 0 else psi


def reduced_residual_poly(sol: ExpansionSolution) -> HermiteCoeffs:
    """Hermite coefficients of ``xi'' - 2u xi' + (eps - 1) xi - P xi`` for the summed xi."""
    with working_precision(sol.dps):
        c = sol.total_hermite.coeffs
        eps = _ZERO
        for e in sol.eps:
            eps = eps + e
        lhs = [(eps - 1 - 2 * k) * v for k, v in enumerate(c)]
        pert = _perturb_hermite(c, sol.couplings.g, sol.couplings.r, sol.spec.N)
        return HermiteCoeffs(_add(lhs, [-v for v in pert]))


def default_residual_grid(sol: ExpansionSolution, points: int = 200, log_weight: float = 10.0) -> np.ndarray:
    """Uniform grid on ``(0, X]`` with ``gamma X^(N+1) + beta X^2 = log_weight``."""
    x_max = truncation_point(float(sol.couplings.gamma), float(sol.couplings.beta), sol.spec.N, log_weight)
    return np.linspace(x_max / points, x_max, points)


def residual(sol: ExpansionSolution, grid: Sequence[float] | None = None) -> float:
    """Max-norm of the exact reduced-equation residual, relative to max|xi| on the grid.

    The residual is reported in x units, i.e. the u-form multiplied by
    ``m Omega_t / hbar``.
    """
    if grid is None:
        grid = default_residual_grid(sol)
    with working_precision(sol.dps):
        res = from_hermite(reduced_residual_poly(sol))
        xi = sol.total_poly
        us = sol.couplings.u_scale
        r_max = max(abs(poly_eval(res, us * to_mpfr(float(x)))) for x in grid)
        xi_max = max(abs(poly_eval(xi, us * to_mpfr(float(x)))) for x in grid)
        return float(r_max * us * us / xi_max)


def truncation_point(gamma: float, beta: float, N: int, level: float) -> float:
    """Positive root of ``gamma X^(N+1) + beta X^2 = level``."""
    if gamma <= 0:
        return math.sqrt(level / beta)
    hi = math.sqrt(level / beta)
    hi = min(hi, (level / gamma) ** (1.0 / (N + 1)))
    lo = 0.0
    # f is increasing on (0, inf); hi already satisfies f(hi) >= level.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gamma * mid ** (N + 1) + beta * mid * mid < level:
            lo = mid
        else:
            hi = mid
    return hi


__all__ = [
    "GAUGES",
    "MAX_ORDER",
    "ExpansionSolution",
    "HierarchyError",
    "OscillatorSpec",
    "ScaledCouplings",
    "apply_perturbation",
    "default_residual_grid",
    "direct_energy",
    "gamma_of",
    "hermite",
    "reduced_residual_poly",
    "residual",
    "scaled_couplings",
    "solve_hierarchy",
    "truncation_point",
    "wavefunction",
]

"""Principle of minimal sensitivity: choosing the frequency Omega.

The variational estimator is minimized over Omega (for the ground state
this is the variational principle).  The truncated direct series is made
stationary in Omega; when the series oscillates in Omega and several
stationary points exist, the one continuing the previous order's value is
taken.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .hierarchy import (
    HierarchyError,
    OscillatorSpec,
    direct_energy,
    solve_hierarchy,
)
from .observables import (
    EnergyEstimate,
    Estimator,
    QuadratureError,
    QuadratureSettings,
    energy_variational,
)

log = logging.getLogger(__name__)

# Relative step of the central-difference dE/dOmega.
DERIVATIVE_STEP = 1e-5
# Below this ratio of anharmonic to harmonic frequency the optimum may sit at
# the lower end of the bracket (the Omega -> 0 harmonic limit).
HARMONIC_RATIO = 1e-3


class PmsError(RuntimeError):
    """No admissible PMS point in the requested bracket."""


@dataclass(frozen=True)
class PmsResult:
    Omega_star: float
    energy: EnergyEstimate
    curve: tuple[tuple[float, float], ...]
    kind: str
    diagnostics: dict = field(default_factory=dict, compare=False)


def default_bracket(spec: OscillatorSpec) -> tuple[float, float]:
    scale = spec.frequency_scale
    return 0.05 * scale, 20.0 * scale


def resolve_bracket(spec: OscillatorSpec, bracket) -> tuple[float, float]:
    if bracket is None or bracket == "auto":
        return default_bracket(spec)
    lo, hi = (float(b) for b in bracket)
    if not 0 < lo < hi:
        raise PmsError(f"invalid Omega bracket ({lo}, {hi}); need 0 < lo < hi")
    return lo, hi


def _uniform_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if points < 16:
        raise ValueError(f"an Omega scan needs at least 16 points, got {points}")
    if not 0 < lo < hi:
        raise ValueError(f"invalid scan interval ({lo}, {hi})")
    return np.linspace(lo, hi, points)


def _energy_at(spec, n, order, Omega, estimator: Estimator, settings, gauge, dps) -> float:
    """Estimator value at one Omega, NaN if the solver or quadrature fails."""
    try:
        sol = solve_hierarchy(spec, n, Omega, order, dps=dps, gauge=gauge)
        if estimator == "direct":
            return float(direct_energy(sol))
        return energy_variational(sol, settings).value
    except (HierarchyError, QuadratureError, ZeroDivisionError, OverflowError) as exc:
        log.debug("estimator failed at Omega=%g: %s", Omega, exc)
        return math.nan


def scan_omega(
    spec: OscillatorSpec,
    n: int,
    order: int,
    estimator: Estimator,
    Omega_min: float,
    Omega_max: float,
    points: int = 64,
    settings: QuadratureSettings = QuadratureSettings(),
    gauge: str = "origin",
    dps: int | None = None,
) -> list[tuple[float, float]]:
    """Estimator on a uniform Omega grid; failed samples carry NaN."""
    grid = _uniform_grid(Omega_min, Omega_max, points)
    return [(float(w), _energy_at(spec, n, order, w, estimator, settings, gauge, dps)) for w in grid]


def scan_orders(
    spec: OscillatorSpec,
    n: int,
    orders: Sequence[int],
    estimator: Estimator,
    grid: Sequence[float],
    settings: QuadratureSettings = QuadratureSettings(),
    gauge: str = "origin",
    dps: int | None = None,
) -> np.ndarray:
    """Energies for several orders from one hierarchy solve per Omega.

    Returns an array of shape ``(len(grid), len(orders))``.
    """
    top = max(orders)
    out = np.full((len(grid), len(orders)), math.nan)
    for i, w in enumerate(grid):
        try:
            sol = solve_hierarchy(spec, n, w, top, dps=dps, gauge=gauge)
        except (HierarchyError, ZeroDivisionError, OverflowError):
            continue
        for j, k in enumerate(orders):
            part = sol.truncate(k)
            try:
                if estimator == "direct":
                    out[i, j] = float(direct_energy(part))
                else:
                    out[i, j] = energy_variational(part, settings).value
            except QuadratureError:
                pass
    return out


def _local_minima(values: np.ndarray) -> list[int]:
    idx = []
    for i in range(1, len(values) - 1):
        a, b, c = values[i - 1], values[i], values[i + 1]
        if np.isfinite([a, b, c]).all() and b < a and b <= c:
            idx.append(i)
    return idx


def _golden(f, a: float, b: float, c: float, fb: float, xtol: float) -> tuple[float, float, int]:
    try:
        res = minimize_scalar(f, bracket=(a, b, c), method="golden", options={"xtol": xtol})
    except ValueError:
        # Bracket not strict at float resolution; the grid point is the answer.
        return b, fb, 0
    if not np.isfinite(res.fun) or res.fun > fb or not a < res.x < c:
        return b, fb, int(res.nfev)
    return float(res.x), float(res.fun), int(res.nfev)


def _at_boundary(grid: np.ndarray, values: np.ndarray) -> int | None:
    i = int(np.nanargmin(values))
    if i == 0:
        return 0
    if i == len(grid) - 1:
        return len(grid) - 1
    return None


def _harmonic_dominated(spec: OscillatorSpec) -> bool:
    return spec.omega > 0 and spec.anharmonic_scale <= HARMONIC_RATIO * spec.omega


def _refine_variational(
    spec, n, order, grid, values, bracket, settings, gauge, dps, zoom_points, xtol, max_candidates
) -> PmsResult:
    f = lambda w: _energy_at(spec, n, order, w, "variational", settings, gauge, dps)
    if not np.isfinite(values).any():
        raise PmsError("variational energy failed at every Omega of the scan")
    edge = _at_boundary(grid, values)
    if edge is not None:
        if edge == 0 and _harmonic_dominated(spec):
            w, e = float(grid[0]), float(values[0])
            est = EnergyEstimate(e, "variational", w, order)
            return PmsResult(w, est, tuple(zip(grid.tolist(), values.tolist())), "minimum", {"boundary": "lower (harmonic limit)"})
        side = "lower" if edge == 0 else "upper"
        raise PmsError(
            f"variational minimum at the {side} edge of [{bracket[0]:.6g}, {bracket[1]:.6g}]; widen the Omega scan"
        )

    # Zoom on the neighbourhood of the best coarse sample: at high order the
    # curve oscillates in Omega on a scale finer than the coarse spacing.
    i = int(np.nanargmin(values))
    lo, hi = grid[max(i - 2, 0)], grid[min(i + 2, len(grid) - 1)]
    fine = np.linspace(lo, hi, zoom_points)
    fine_vals = np.array([f(w) for w in fine])
    merged = dict(zip(grid.tolist(), values.tolist()))
    merged.update(zip(fine.tolist(), fine_vals.tolist()))
    ws = np.array(sorted(merged))
    vs = np.array([merged[w] for w in ws])

    minima = sorted(_local_minima(vs), key=lambda k: vs[k])[:max_candidates]
    if not minima:
        raise PmsError("no interior variational minimum found; widen the Omega scan")
    best = None
    nfev = 0
    for k in minima:
        w, e, calls = _golden(f, ws[k - 1], ws[k], ws[k + 1], vs[k], xtol)
        nfev += calls
        if best is None or e < best[1]:
            best = (w, e)
    w_star, _ = best
    sol = solve_hierarchy(spec, n, w_star, order, dps=dps, gauge=gauge)
    est = energy_variational(sol, settings)
    diag = {"candidates": len(minima), "refine_evaluations": nfev}
    return PmsResult(w_star, est, tuple(zip(ws.tolist(), vs.tolist())), "minimum", diag)


def pms_variational(
    spec: OscillatorSpec,
    n: int,
    order: int,
    bracket=None,
    points: int = 64,
    zoom_points: int = 64,
    settings: QuadratureSettings = QuadratureSettings(),
    gauge: str = "origin",
    dps: int | None = None,
    xtol: float = 1e-8,
    max_candidates: int = 4,
) -> PmsResult:
    """Minimize the variational energy over Omega.

    A uniform scan over ``bracket`` is followed by a finer uniform scan
    around its best sample; the lowest few local minima are refined by
    golden-section search to relative precision ``xtol`` and the lowest
    wins.
    """
    return pms_variational_orders(
        spec, n, [order], bracket, points, zoom_points, settings, gauge, dps, xtol, max_candidates
    )[order]


def pms_variational_orders(
    spec: OscillatorSpec,
    n: int,
    orders: Sequence[int],
    bracket=None,
    points: int = 64,
    zoom_points: int = 64,
    settings: QuadratureSettings = QuadratureSettings(),
    gauge: str = "origin",
    dps: int | None = None,
    xtol: float = 1e-8,
    max_candidates: int = 4,
) -> dict[int, PmsResult]:
    """:func:`pms_variational` for several orders sharing one coarse scan."""
    bracket = resolve_bracket(spec, bracket)
    grid = _uniform_grid(*bracket, points)
    table = scan_orders(spec, n, orders, "variational", grid, settings, gauge, dps)
    return {
        k: _refine_variational(
            spec, n, k, grid, table[:, j], bracket, settings, gauge, dps, zoom_points, xtol, max_candidates
        )
        for j, k in enumerate(orders)
    }


def _direct_derivative(spec, n, order, w, gauge, dps) -> float:
    h = DERIVATIVE_STEP * w
    up = direct_energy(solve_hierarchy(spec, n, w + h, order, dps=dps, gauge=gauge))
    down = direct_energy(solve_hierarchy(spec, n, w - h, order, dps=dps, gauge=gauge))
    return float((up - down) / (2 * h))


def pms_direct(
    spec: OscillatorSpec,
    n: int,
    order: int,
    bracket=None,
    points: int = 64,
    gauge: str = "origin",
    dps: int | None = None,
) -> PmsResult:
    """Stationary point of the truncated energy series in Omega."""
    return pms_direct_orders(spec, n, order, bracket, points, gauge, dps)[order]


def pms_direct_orders(
    spec: OscillatorSpec,
    n: int,
    max_order: int,
    bracket=None,
    points: int = 64,
    gauge: str = "origin",
    dps: int | None = None,
) -> dict[int, PmsResult]:
    """Direct-series PMS for every order ``1..max_order``.

    Stationary points are located from sign changes of the central-difference
    derivative on a uniform grid and refined by Brent's method.  Among several,
    order 1 takes the lowest energy and each later order the one closest to
    the previous order's result.  Without any sign change the grid point of
    smallest ``|dE/dOmega|`` is returned (``kind="flattest_point"``).
    """
    if max_order < 1:
        raise ValueError("direct PMS needs order >= 1")
    lo, hi = resolve_bracket(spec, bracket)
    grid = _uniform_grid(lo, hi, points)
    orders = list(range(1, max_order + 1))
    h = DERIVATIVE_STEP * grid
    energies = scan_orders(spec, n, orders, "direct", grid, gauge=gauge, dps=dps)
    up = scan_orders(spec, n, orders, "direct", grid + h, gauge=gauge, dps=dps)
    down = scan_orders(spec, n, orders, "direct", grid - h, gauge=gauge, dps=dps)
    deriv = (up - down) / (2 * h[:, None])

    results: dict[int, PmsResult] = {}
    previous = None
    for j, k in enumerate(orders):
        e_k, d_k = energies[:, j], deriv[:, j]
        curve = tuple(zip(grid.tolist(), e_k.tolist()))
        candidates = []
        for i in range(len(grid) - 1):
            d0, d1 = d_k[i], d_k[i + 1]
            if np.isfinite([d0, d1]).all() and d0 * d1 < 0:
                t = d0 / (d0 - d1)
                guess = e_k[i] + t * (e_k[i + 1] - e_k[i])
                candidates.append((i, guess))
        diag = {"stationary_points": len(candidates)}
        if candidates:
            if previous is None:
                i, _ = min(candidates, key=lambda c: c[1])
            else:
                i, _ = min(candidates, key=lambda c: abs(c[1] - previous))
            w = brentq(
                lambda x: _direct_derivative(spec, n, k, x, gauge, dps), grid[i], grid[i + 1], xtol=1e-12, rtol=1e-10
            )
            kind = "stationary_point"
            if len(candidates) > 1:
                diag["selection"] = "lowest energy" if previous is None else "continuity with previous order"
        else:
            if not np.isfinite(d_k).any():
                raise PmsError(f"direct energy failed on the whole Omega grid at order {k}")
            w = float(grid[int(np.nanargmin(np.abs(d_k)))])
            kind = "flattest_point"
        value = float(direct_energy(solve_hierarchy(spec, n, w, k, dps=dps, gauge=gauge)))
        est = EnergyEstimate(value, "direct", float(w), k)
        results[k] = PmsResult(float(w), est, curve, kind, diag)
        previous = value
    return results


def pms(spec: OscillatorSpec, n: int, order: int, estimator: Estimator, bracket=None, **kwargs) -> PmsResult:
    if estimator == "variational":
        return pms_variational(spec, n, order, bracket, **kwargs)
    if estimator == "direct":
        return pms_direct(spec, n, order, bracket, **kwargs)
    raise ValueError(f"unknown estimator {estimator!r}")

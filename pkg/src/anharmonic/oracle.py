"""Independent Numerov shooting solver for the lowest even and odd states.

The half-line problem on ``[0, L]`` uses ``psi'(0) = 0`` (even) or
``psi(0) = 0`` (odd) and ``psi(L) = 0``.  The eigenvalue is first isolated
by node counting of the outward solution (Sturm oscillation), then refined
by bisection on the derivative jump of the outward/inward solutions matched
at the classical turning point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .hierarchy import ExpansionSolution, OscillatorSpec, direct_energy, solve_hierarchy

# x_max criteria: V(L) >= E + POTENTIAL_MARGIN and WKB decay exponent >= DECAY_EXPONENT.
POTENTIAL_MARGIN = 50.0
DECAY_EXPONENT = 40.0
_RESCALE = 1e150


class OracleError(RuntimeError):
    """Eigenvalue could not be bracketed or refined."""


@dataclass(frozen=True)
class OracleSolution:
    energy: float
    grid: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    nodes: int
    boundary: str
    state_n: int = 0
    L: float = 0.0
    steps: int = 0


def _fvals(spec: OscillatorSpec, x: np.ndarray, E: float) -> np.ndarray:
    return 2.0 * spec.mass / spec.hbar**2 * (spec.potential(x) - E)


def _outward(w: list, h2: float, odd: bool, stop: int) -> tuple[list, int]:
    """Numerov from x = 0 to index ``stop``; returns values and sign changes.

    ``w[i] = h^2 f_i / 12``.  The recurrence is run in summed form on
    ``z = (1 - w) y`` to limit roundoff growth on fine grids.  Values are
    rescaled on overflow, so only their shape is meaningful.
    """
    y = [0.0] * (stop + 1)
    if odd:
        y[0], y[1] = 0.0, 1e-10
        z = (1.0 - w[1]) * y[1]
        d = z
    else:
        # Mirror condition y_{-1} = y_1.
        y[0] = 1.0
        d = 6.0 * w[0]
        z = 1.0 - w[0] + d
        y[1] = z / (1.0 - w[1])
    nodes = 0
    for i in range(1, stop):
        yi = y[i]
        d += 12.0 * w[i] * yi
        z += d
        nxt = z / (1.0 - w[i + 1])
        if abs(nxt) > _RESCALE:
            for j in range(i + 1):
                y[j] /= _RESCALE
            yi = y[i]
            nxt /= _RESCALE
            z /= _RESCALE
            d /= _RESCALE
        if nxt * yi < 0.0:
            nodes += 1
        y[i + 1] = nxt
    return y, nodes


def _inward(w: list, start: int) -> list:
    n = len(w) - 1
    y = [0.0] * (n + 1)
    y[n], y[n - 1] = 0.0, 1e-30
    z = (1.0 - w[n - 1]) * y[n - 1]
    d = z
    for i in range(n - 1, start, -1):
        d += 12.0 * w[i] * y[i]
        z += d
        prv = z / (1.0 - w[i - 1])
        if abs(prv) > _RESCALE:
            for j in range(i, n + 1):
                y[j] /= _RESCALE
            prv /= _RESCALE
            z /= _RESCALE
            d /= _RESCALE
        y[i - 1] = prv
    return y


class _Shooter:
    def __init__(self, spec: OscillatorSpec, L: float, steps: int, odd: bool):
        self.spec = spec
        self.odd = odd
        self.x = np.linspace(0.0, L, steps + 1)
        self.h = L / steps
        self.V = spec.potential(self.x)

    def weights(self, E: float) -> list:
        f = 2.0 * self.spec.mass / self.spec.hbar**2 * (self.V - E)
        return (f * self.h**2 / 12.0).tolist()

    def count_nodes(self, E: float) -> int:
        _, nodes = _outward(self.weights(E), self.h**2, self.odd, len(self.x) - 1)
        return nodes

    def turning_index(self, E: float) -> int:
        inside = np.nonzero(self.V <= E)[0]
        i = int(inside[-1]) if len(inside) else 1
        return min(max(i, 2), len(self.x) - 3)

    def matched(self, E: float, m: int) -> tuple[float, np.ndarray]:
        """Derivative jump at index ``m`` and the glued solution."""
        w = self.weights(E)
        out, _ = _outward(w, self.h**2, self.odd, m + 1)
        inn = _inward(w, m - 1)
        if out[m] == 0.0 or inn[m] == 0.0:
            raise OracleError(f"matching point hit a node at E={E}")
        a = [v / out[m] for v in out]
        b = [v / inn[m] for v in inn]
        jump = (a[m - 1] * (1.0 - w[m - 1]) + b[m + 1] * (1.0 - w[m + 1]) - 2.0 * (1.0 + 5.0 * w[m])) / self.h
        psi = np.array(a[: m + 1] + b[m + 1 :])
        return jump, psi


def _turning_point(spec: OscillatorSpec, E: float) -> float:
    hi = 1.0
    while spec.potential(hi) < E:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if spec.potential(mid) < E:
            lo = mid
        else:
            hi = mid
    return hi


def default_length(spec: OscillatorSpec, E_guess: float) -> float:
    """Domain size so that the wave function has decayed far below 1e-12."""
    xt = _turning_point(spec, E_guess)
    L = _turning_point(spec, E_guess + POTENTIAL_MARGIN)
    kappa = lambda x: math.sqrt(max(2.0 * spec.mass * (float(spec.potential(x)) - E_guess), 0.0)) / spec.hbar
    while True:
        xs = np.linspace(xt, L, 2001)
        if np.trapezoid([kappa(v) for v in xs], xs) >= DECAY_EXPONENT:
            return L
        L *= 1.1


def energy_guess(spec: OscillatorSpec, n: int) -> float:
    """Order-2 direct LDE energy at the natural frequency scale."""
    return float(direct_energy(solve_hierarchy(spec, n, spec.frequency_scale, 2)))


def numerov_solve(
    spec: OscillatorSpec,
    n: int,
    L: float | None = None,
    steps: int = 20000,
    tol: float = 1e-13,
) -> OracleSolution:
    """Eigenpair of the ``n``-th state (n in {0, 1}) by Numerov shooting."""
    if n not in (0, 1):
        raise ValueError(f"only n = 0 and n = 1 are supported, got {n}")
    if steps < 4000:
        raise ValueError(f"steps must be at least 4000, got {steps}")
    E_guess = energy_guess(spec, n)
    if L is None:
        L = default_length(spec, E_guess)
    odd = bool(n % 2)
    k = n // 2
    sh = _Shooter(spec, L, steps, odd)
    V_L = float(sh.V[-1])

    E_lo, E_hi = float(sh.V.min()), max(1.5 * E_guess, E_guess + 1.0)
    while sh.count_nodes(E_hi) <= k:
        E_lo, E_hi = E_hi, 2.0 * E_hi
        if E_hi > V_L:
            raise OracleError(
                f"no eigenvalue below V(L)={V_L:.6g} for state {n}; increase L (={L:.6g}) or steps"
            )
    while E_hi - E_lo > 1e-6 * max(1.0, abs(E_hi)):
        mid = 0.5 * (E_lo + E_hi)
        if sh.count_nodes(mid) <= k:
            E_lo = mid
        else:
            E_hi = mid

    m = sh.turning_index(0.5 * (E_lo + E_hi))
    j_lo, _ = sh.matched(E_lo, m)
    j_hi, _ = sh.matched(E_hi, m)
    if j_lo * j_hi > 0:
        raise OracleError(f"derivative jump does not change sign on [{E_lo}, {E_hi}]")
    for _ in range(200):
        if E_hi - E_lo <= tol * max(1.0, abs(E_lo)):
            break
        mid = 0.5 * (E_lo + E_hi)
        j_mid, _ = sh.matched(mid, m)
        if j_mid * j_lo > 0:
            E_lo, j_lo = mid, j_mid
        else:
            E_hi = mid
    E = 0.5 * (E_lo + E_hi)
    _, psi = sh.matched(E, m)

    # Full-line normalization: the half-line integral is 1/2.
    norm = simpson(psi * psi, x=sh.x)
    psi = psi / math.sqrt(2.0 * norm)
    ref = psi[1] if odd else psi[0]
    if ref < 0:
        psi = -psi
    big = np.abs(psi) > 1e-8 * np.abs(psi).max()
    signs = np.sign(psi[1:][big[1:]])
    nodes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    return OracleSolution(
        energy=E,
        grid=sh.x,
        psi=psi,
        nodes=nodes,
        boundary="odd" if odd else "even",
        state_n=n,
        L=float(L),
        steps=steps,
    )


def _sizable(values: np.ndarray, threshold: float) -> np.ndarray:
    return np.abs(values) > threshold * np.abs(values).max()


def _unit_norm(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    return f / math.sqrt(simpson(f * f, x=x))


def compare_wavefunction(
    sol: ExpansionSolution | OracleSolution,
    oracle: OracleSolution,
    threshold: float = 1e-3,
) -> list[tuple[float, float]]:
    """Ratio ``psi_approx / psi_num`` on the oracle grid where ``psi_num`` is sizable."""
    x = oracle.grid
    if isinstance(sol, OracleSolution):
        approx = np.interp(x, sol.grid, sol.psi)
    else:
        approx, _ = sol.psi_and_derivative(x)
    num = _unit_norm(x, oracle.psi)
    approx = _unit_norm(x, approx)
    mask = _sizable(num, threshold) & _sizable(approx, threshold)
    first = int(np.argmax(mask))
    if np.sign(approx[first]) != np.sign(num[first]):
        approx = -approx
    keep = _sizable(num, threshold)
    return [(float(xi), float(a / b)) for xi, a, b in zip(x[keep], approx[keep], num[keep])]

"""Extended-precision polynomial algebra in the scaled coordinate ``u``.

Polynomials are stored densely, indexed by power.  Coefficients are
``gmpy2.mpfr`` values; the working precision is set by
:func:`working_precision` (32 significant decimal digits by default).

Two representations are used:

* :class:`Poly` -- monomial coefficients, ``sum_k c_k u**k``;
* :class:`HermiteCoeffs` -- physicists' Hermite coefficients,
  ``sum_k c_k H_k(u)`` with weight ``exp(-u**2)``.

The perturbative hierarchy lives in the Hermite basis because the
unperturbed operator ``d^2/du^2 - 2u d/du`` is diagonal there, so the
banded helpers :func:`hermite_mul_u` and :func:`hermite_diff` are provided
alongside the conversions.
"""

from __future__ import annotations

import contextlib
import functools
import math
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2
import numpy as np

DEFAULT_DPS = 32
# Extra decimal digits used inside basis conversions.
GUARD_DPS = 20

_ZERO = gmpy2.mpfr(0)
# Set while a working_precision block is active; otherwise public
# functions run at DEFAULT_DPS rather than gmpy2's 53-bit default.
_explicit = ContextVar("anharmonic_explicit_precision", default=False)


def dps_to_bits(dps: int) -> int:
    return int(math.ceil(dps * math.log2(10))) + 4


@contextlib.contextmanager
def working_precision(dps: int | None = None):
    """Context manager setting the mpfr precision to ``dps`` decimal digits."""
    if dps is None:
        dps = DEFAULT_DPS
    if dps < 15:
        raise ValueError(f"working precision must be at least 15 digits, got {dps}")
    token = _explicit.set(True)
    try:
        with gmpy2.context(gmpy2.get_context(), precision=dps_to_bits(dps)):
            yield
    finally:
        _explicit.reset(token)


def _default_precision(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if _explicit.get():
            return fn(*args, **kwargs)
        with working_precision(DEFAULT_DPS):
            return fn(*args, **kwargs)

    return wrapper


def _exact_precision(prec: int):
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def current_dps() -> int:
    return int(gmpy2.get_context().precision / math.log2(10))


def to_mpfr(x) -> gmpy2.mpfr:
    """Convert ints, floats, strings, Fractions or mpfr to mpfr at context precision."""
    if isinstance(x, (int, float, str)) or type(x).__name__ == "mpfr":
        return gmpy2.mpfr(x)
    try:
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
    except AttributeError:
        return gmpy2.mpfr(str(x))


@_default_precision
def _trim(coeffs: Iterable) -> tuple:
    c = [to_mpfr(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Dense monomial polynomial; ``coeffs[k]`` multiplies ``u**k``.

    The zero polynomial has empty ``coeffs`` and degree ``-1``.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    @_default_precision
    def __add__(self, other: Poly) -> Poly:
        return Poly(_add(self.coeffs, other.coeffs))

    @_default_precision
    def __sub__(self, other: Poly) -> Poly:
        return Poly(_add(self.coeffs, [-c for c in other.coeffs]))

    @_default_precision
    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs])

    @_default_precision
    def __mul__(self, other) -> Poly:
        if isinstance(other, Poly):
            return poly_mul(self, other)
        s = to_mpfr(other)
        return Poly([s * c for c in self.coeffs])

    __rmul__ = __mul__

    def __call__(self, u):
        return poly_eval(self, u)

    def to_numpy(self) -> np.ndarray:
        """Ascending float64 coefficients (``[0.0]`` for the zero polynomial)."""
        if not self.coeffs:
            return np.zeros(1)
        return np.array([float(c) for c in self.coeffs])


def _add(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = out[i] + v
    return out


@_default_precision
def poly_mul(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly()
    out = [_ZERO] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            out[i + j] = out[i + j] + a * b
    return Poly(out)


@_default_precision
def poly_diff(p: Poly) -> Poly:
    return Poly([k * p.coeffs[k] for k in range(1, len(p.coeffs))])


@_default_precision
def poly_shift_mul(p: Poly, k: int) -> Poly:
    """Multiply by ``u**k``."""
    if k < 0:
        raise ValueError("shift must be nonnegative")
    if p.is_zero():
        return p
    return Poly([_ZERO] * k + list(p.coeffs))


@_default_precision
def poly_eval(p: Poly, u):
    """Horner evaluation in mpfr at the context precision."""
    u = to_mpfr(u)
    acc = _ZERO
    for c in reversed(p.coeffs):
        acc = acc * u + c
    return acc


@lru_cache(maxsize=None)
def _hermite_int(n: int) -> tuple[int, ...]:
    """Integer monomial coefficients of H_n via H_{k+1} = 2u H_k - 2k H_{k-1}."""
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 2)
    prev, cur = _hermite_int(n - 2), _hermite_int(n - 1)
    k = n - 1
    out = [0] + [2 * c for c in cur]
    for i, c in enumerate(prev):
        out[i] -= 2 * k * c
    return tuple(out)


@_default_precision
def hermite(n: int) -> Poly:
    """Physicists' Hermite polynomial H_n as a :class:`Poly`."""
    if n < 0:
        raise ValueError("Hermite index must be nonnegative")
    return Poly(_hermite_int(n))


@lru_cache(maxsize=None)
def _monomial_in_hermite(k: int) -> tuple[tuple[int, int], ...]:
    # u^k = k!/2^k * sum_j H_{k-2j} / (j! (k-2j)!); the numerators are integers.
    return tuple(
        (k - 2 * j, math.factorial(k) // (math.factorial(j) * math.factorial(k - 2 * j)))
        for j in range(k // 2 + 1)
    )


@dataclass(frozen=True)
class HermiteCoeffs:
    """Dense Hermite-series coefficients; ``coeffs[k]`` multiplies ``H_k(u)``."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def as_dict(self) -> dict[int, gmpy2.mpfr]:
        return {k: c for k, c in enumerate(self.coeffs) if c != 0}

    @_default_precision
    def __add__(self, other: HermiteCoeffs) -> HermiteCoeffs:
        return HermiteCoeffs(_add(self.coeffs, other.coeffs))

    @_default_precision
    def __mul__(self, s) -> HermiteCoeffs:
        s = to_mpfr(s)
        return HermiteCoeffs([s * c for c in self.coeffs])

    __rmul__ = __mul__


def _guarded_dps(size: int) -> int:
    # Cancellation in the conversions grows roughly one digit per degree.
    return current_dps() + GUARD_DPS + size


@_default_precision
def to_hermite(p: Poly) -> HermiteCoeffs:
    """Expand a monomial polynomial in the Hermite basis.

    The result keeps the guard digits: going back to monomials cancels
    terms as large as ``k!/(k/2)!``, so rounding here would lose them.
    """
    with working_precision(_guarded_dps(len(p.coeffs))):
        c = [_ZERO] * len(p.coeffs)
        for k, pk in enumerate(p.coeffs):
            if pk == 0:
                continue
            scale = pk / gmpy2.mpfr(2) ** k
            for idx, num in _monomial_in_hermite(k):
                c[idx] = c[idx] + scale * num
        return HermiteCoeffs(c)


@_default_precision
def from_hermite(h: HermiteCoeffs) -> Poly:
    """Expand a Hermite series back to monomials."""
    out_prec = gmpy2.get_context().precision
    with working_precision(_guarded_dps(len(h.coeffs))):
        p = [_ZERO] * len(h.coeffs)
        for k, ck in enumerate(h.coeffs):
            if ck == 0:
                continue
            for i, hi in enumerate(_hermite_int(k)):
                if hi:
                    p[i] = p[i] + ck * hi
    with _exact_precision(out_prec):
        return Poly([+v for v in p])


@_default_precision
def hermite_mul_u(c: Sequence) -> list:
    """Coefficients of ``u * f`` given Hermite coefficients of ``f``.

    Uses ``u H_k = H_{k+1}/2 + k H_{k-1}``.
    """
    if not c:
        return []
    out = [_ZERO] * (len(c) + 1)
    for k, ck in enumerate(c):
        if ck == 0:
            continue
        out[k + 1] = out[k + 1] + ck / 2
        if k:
            out[k - 1] = out[k - 1] + k * ck
    return out


@_default_precision
def hermite_diff(c: Sequence) -> list:
    """Coefficients of ``f'`` using ``H_k' = 2k H_{k-1}``."""
    return [2 * k * c[k] for k in range(1, len(c))]


@_default_precision
def hermite_eval(h: HermiteCoeffs, u):
    """Evaluate a Hermite series by the three-term recurrence (mpfr)."""
    u = to_mpfr(u)
    if not h.coeffs:
        return _ZERO
    h_prev, h_cur = _ZERO, gmpy2.mpfr(1)
    acc = h.coeffs[0]
    for k in range(1, len(h.coeffs)):
        h_prev, h_cur = h_cur, 2 * u * h_cur - 2 * (k - 1) * h_prev
        acc = acc + h.coeffs[k] * h_cur
    return acc

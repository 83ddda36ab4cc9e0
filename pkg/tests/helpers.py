"""Cached expensive computations shared across test modules."""

from functools import lru_cache

from anharmonic.hierarchy import OscillatorSpec
from anharmonic.oracle import numerov_solve
from anharmonic.pms import pms_direct_orders, pms_variational_orders
from anharmonic.reference import case_spec

ORDERS = tuple(range(1, 16))
QUARTIC_B2 = OscillatorSpec(mass=0.5, omega=2.0, mu=8.0, N=2)


@lru_cache(maxsize=None)
def oracle(case: str, N: int, n: int):
    return numerov_solve(case_spec(case, N), n)


@lru_cache(maxsize=None)
def oracle_for(spec: OscillatorSpec, n: int, steps: int = 20000):
    return numerov_solve(spec, n, steps=steps)


@lru_cache(maxsize=None)
def variational(case: str, N: int, n: int) -> dict:
    """PMS results keyed by order; ground states get every order 1..15."""
    orders = ORDERS if n == 0 else (15,)
    return pms_variational_orders(case_spec(case, N), n, list(orders))


@lru_cache(maxsize=None)
def direct(case: str, N: int, n: int) -> dict:
    return pms_direct_orders(case_spec(case, N), n, 15)

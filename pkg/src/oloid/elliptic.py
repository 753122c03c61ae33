"""Complete elliptic integrals by the arithmetic-geometric mean, and the
closed-form mass properties of the oloid built on them.

All functions use the *parameter* convention: ``K(m)`` integrates
``1/sqrt(1 - m sin^2 theta)`` over ``[0, pi/2]`` (``m = k**2`` for modulus ``k``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, MassProperties, Method, OloidSpec

#: AGM stops once |a - b| <= AGM_RTOL * a (four units of relative rounding).
AGM_RTOL = 4 * np.finfo(float).eps
_MAX_ITER = 64


def _agm_sequence(a: float, b: float):
    """Yield successive (a, b, c) with c the half-difference of the previous pair."""
    c = None
    yield a, b, c
    for _ in range(_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * max(a, b):
            return
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        yield a, b, c
    raise ArithmeticError("AGM iteration failed to converge")  # pragma: no cover


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def agm_iterations(a: float, b: float) -> int:
    """Number of AGM updates performed before termination."""
    _check_positive("a", a)
    _check_positive("b", b)
    return sum(1 for _ in _agm_sequence(float(a), float(b))) - 1


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers.

    >>> agm(2.0, 2.0)
    2.0
    """
    _check_positive("a", a)
    _check_positive("b", b)
    lo, hi = min(a, b), max(a, b)
    for a_n, b_n, _ in _agm_sequence(float(a), float(b)):
        pass
    return min(max(a_n, lo), hi)


def ellint_K(parameter: float) -> float:
    """Complete elliptic integral of the first kind, ``pi / (2 agm(1, sqrt(1-m)))``."""
    m = float(parameter)
    if not (0.0 <= m < 1.0):
        raise DomainError(f"K(m) requires 0 <= m < 1, got {parameter!r}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def ellint_E(parameter: float) -> float:
    """Complete elliptic integral of the second kind.

    Uses ``E = K * (1 - sum_n 2**(n-1) c_n**2)`` with ``c_0**2 = m`` and
    ``c_n`` the AGM half-differences. ``E(1) = 1`` is returned exactly.
    """
    m = float(parameter)
    if not (0.0 <= m <= 1.0):
        raise DomainError(f"E(m) requires 0 <= m <= 1, got {parameter!r}")
    if m == 1.0:
        return 1.0
    total = 0.5 * m
    scale = 0.5
    a_n = 1.0
    for a_n, _b, c in _agm_sequence(1.0, math.sqrt(1.0 - m)):
        if c is not None:
            total += scale * c * c
        scale *= 2.0
    return (math.pi / (2.0 * a_n)) * (1.0 - total)


@dataclass(frozen=True)
class EllipticPair:
    parameter: float
    K: float
    E: float

    @classmethod
    def at(cls, parameter: float) -> "EllipticPair":
        return cls(float(parameter), ellint_K(parameter), ellint_E(parameter))


def unit_constants() -> dict[str, float]:
    """Volume, area and principal moments of the unit-radius, unit-density oloid."""
    pair = EllipticPair.at(0.75)
    K, E = pair.K, pair.E
    return {
        "volume": 2.0 / 3.0 * K + 4.0 / 3.0 * E,
        "area": 4.0 * math.pi,
        "Ixx": 32.0 / 45.0 * E - 2.0 / 45.0 * K,
        "Iyy": 71.0 / 45.0 * E - 19.0 / 90.0 * K,
    }


def closed_form_properties(spec: OloidSpec | None = None) -> MassProperties:
    spec = spec or OloidSpec()
    c = unit_constants()
    r, rho = spec.radius, spec.density
    r5 = r**5
    inertia = rho * r5 * np.diag([c["Ixx"], c["Iyy"], c["Iyy"]])
    return MassProperties(
        area=c["area"] * r * r,
        volume=c["volume"] * r**3,
        center_of_mass=np.zeros(3),
        inertia=inertia,
        method=Method.CLOSED_FORM,
        density=rho,
    )

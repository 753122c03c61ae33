"""Mass properties from surface-flux quadrature.

Volume integrals are turned into outward fluxes through the parametric
surface (divergence theorem), then integrated with Gauss-Legendre in ``m``
(the integrands are polynomial in ``m``) and double-exponential (tanh-sinh)
quadrature in ``t``, which copes with the inverse-square-root behaviour at
``|t| = 2pi/3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    DomainError,
    EvaluationError,
    MassProperties,
    Method,
    OloidSpec,
    inertia_from_components,
)
from .surface import T_MAX, Sheet, position, root_term, surface_normal

# Beyond |s| = 6 the node distance to the endpoint is below 1e-270.
_S_MAX = 6.0
_MIN_LEVELS = 3


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    if int(n) != n or n < 1:
        raise DomainError(f"need at least one node, got {n!r}")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass
class DEResult:
    value: np.ndarray | float
    levels: int
    converged: bool
    error_estimate: np.ndarray | float
    evaluations: int

    def __float__(self):
        return float(self.value)


def _de_nodes(half: float, s: np.ndarray):
    """Endpoint distances and weights of tanh-sinh nodes at ``s``."""
    u = 0.5 * math.pi * np.sinh(s)
    cu = np.cosh(u)
    dist = half * np.exp(-np.abs(u)) / cu
    weight = half * 0.5 * math.pi * np.cosh(s) / (cu * cu)
    return dist, weight


def de_integrate(
    f: Callable,
    a: float,
    b: float,
    levels: int = 10,
    tol: float = 1e-12,
    *,
    endpoint_distance: bool = False,
) -> DEResult:
    """Tanh-sinh quadrature of ``f`` over ``(a, b)``.

    ``f`` is called with a 1-D array of nodes and must return values of the
    same length (or an array whose last axis runs over nodes, for several
    integrands at once). With ``endpoint_distance=True`` it is called as
    ``f(x, d)`` where ``d`` is the exact distance from ``x`` to the nearer
    endpoint, which lets integrands with endpoint singularities avoid the
    cancellation in ``b - x``.

    Refinement halves the step each level until successive estimates agree
    to ``tol`` relative to the integral of ``|f|``, or ``levels`` extra
    halvings have been used. The endpoints themselves are never sampled.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError("need finite a < b")
    half, mid = 0.5 * (b - a), 0.5 * (a + b)

    def evaluate(s):
        dist, weight = _de_nodes(half, s)
        x = np.where(s < 0, a + dist, np.where(s > 0, b - dist, mid))
        keep = dist > 0
        if not endpoint_distance:
            keep &= (x > a) & (x < b)
        x, dist, weight = x[keep], dist[keep], weight[keep]
        y = np.asarray(f(x, dist) if endpoint_distance else f(x), dtype=float)
        if not np.all(np.isfinite(y)):
            raise EvaluationError("integrand is not finite at an interior node")
        return (y * weight).sum(axis=-1), (np.abs(y) * weight).sum(axis=-1), x.size

    k = np.arange(-int(_S_MAX), int(_S_MAX) + 1, dtype=float)
    total, total_abs, nfev = evaluate(k)
    h = 1.0
    estimate, estimate_abs = total * h, total_abs * h
    delta = np.full_like(np.asarray(estimate), np.inf)
    level = 0
    converged = False
    for level in range(1, int(levels) + 1):
        h *= 0.5
        n_odd = int(_S_MAX / h)
        s = h * np.arange(-n_odd + (1 - n_odd % 2), n_odd + 1, 2, dtype=float)
        part, part_abs, n = evaluate(s)
        nfev += n
        total = total + part
        total_abs = total_abs + part_abs
        new, new_abs = total * h, total_abs * h
        delta = np.abs(new - estimate)
        estimate, estimate_abs = new, new_abs
        if level >= _MIN_LEVELS and np.all(delta <= tol * estimate_abs):
            converged = True
            break
    if np.ndim(estimate) == 0:
        estimate, delta = float(estimate), float(delta)
    return DEResult(estimate, level, converged, delta, nfev)


@dataclass(frozen=True)
class QuadratureConfig:
    m_nodes: int = 5
    t_levels: int = 10
    t_tolerance: float = 1e-12

    def __post_init__(self):
        if self.m_nodes < 3:
            raise DomainError("m_nodes must be >= 3 (the m-dependence has degree 4)")
        if self.t_levels < 3:
            raise DomainError("t_levels must be >= 3")
        if not self.t_tolerance >= 4 * np.finfo(float).eps:
            raise DomainError("t_tolerance below rounding scale")


@dataclass(frozen=True)
class FluxField:
    """Vector field ``F`` whose divergence is the wanted volume integrand."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def _zero(p):
    return np.zeros(p.shape[:-1])


def _field(name, fx=None, fy=None, fz=None):
    def evaluator(p):
        return np.stack([(g or _zero)(p) for g in (fx, fy, fz)], axis=-1)
    return FluxField(evaluator, name)


_X = lambda p: p[..., 0]  # noqa: E731
_Y = lambda p: p[..., 1]  # noqa: E731
_Z = lambda p: p[..., 2]  # noqa: E731

#: Fixed gauge choices; any field with the same divergence gives the same flux.
FIELDS: dict[str, FluxField] = {
    "volume": _field("volume", fx=_X),
    "x": _field("x", fx=lambda p: 0.5 * _X(p) ** 2),
    "y": _field("y", fy=lambda p: 0.5 * _Y(p) ** 2),
    "z": _field("z", fz=lambda p: 0.5 * _Z(p) ** 2),
    "Ixx": _field("Ixx", fx=lambda p: _X(p) * (_Y(p) ** 2 + _Z(p) ** 2)),
    "Iyy": _field("Iyy", fy=lambda p: _Y(p) * (_X(p) ** 2 + _Z(p) ** 2)),
    "Izz": _field("Izz", fz=lambda p: _Z(p) * (_X(p) ** 2 + _Y(p) ** 2)),
    # products: flux gives +int(x_i x_j) dV; the tensor entry is its negative
    "xy": _field("xy", fx=lambda p: 0.5 * _X(p) ** 2 * _Y(p)),
    "xz": _field("xz", fx=lambda p: 0.5 * _X(p) ** 2 * _Z(p)),
    "yz": _field("yz", fy=lambda p: 0.5 * _Y(p) ** 2 * _Z(p)),
}


def surface_integral(integrand, spec: OloidSpec, cfg: QuadratureConfig) -> DEResult:
    """Integrate ``integrand(P, n)`` over both sheets of the surface.

    ``integrand`` receives positions and outward area elements, both of shape
    ``(n_m, n_t, 3)``, and returns ``(k, n_m, n_t)`` or ``(n_m, n_t)`` values.
    The two sheets are summed explicitly, so z-odd integrands cancel.
    """
    nodes, weights = gauss_legendre(cfg.m_nodes)

    def g(t, gap):
        m = nodes[:, None]
        acc = 0.0
        for sheet in (Sheet.UPPER, Sheet.LOWER):
            p = position(m, t[None, :], sheet, spec, gap=gap[None, :])
            n = surface_normal(m, t[None, :], sheet, spec, gap=gap[None, :])
            acc = acc + np.tensordot(np.asarray(integrand(p, n)), weights, axes=([-2], [0]))
        return acc

    return de_integrate(g, -T_MAX, T_MAX, cfg.t_levels, cfg.t_tolerance, endpoint_distance=True)


def flux_integrals(fields, spec: OloidSpec | None = None,
                   cfg: QuadratureConfig | None = None) -> DEResult:
    """Outward fluxes of several fields at once; ``value`` has one entry per field."""
    spec = spec or OloidSpec()
    cfg = cfg or QuadratureConfig()
    fields = list(fields)

    def integrand(p, n):
        return np.stack([np.einsum("...i,...i->...", fl.evaluator(p), n) for fl in fields])

    return surface_integral(integrand, spec, cfg)


def flux_integral(field: FluxField, spec: OloidSpec | None = None,
                  cfg: QuadratureConfig | None = None) -> float:
    """Outward flux of ``field`` through the oloid surface (= volume integral of div F)."""
    return float(flux_integrals([field], spec, cfg).value[0])


def surface_area(spec: OloidSpec | None = None, cfg: QuadratureConfig | None = None) -> float:
    spec = spec or OloidSpec()
    cfg = cfg or QuadratureConfig()
    res = surface_integral(lambda p, n: np.linalg.norm(n, axis=-1), spec, cfg)
    return float(res.value)


def quadrature_mass_properties(spec: OloidSpec | None = None,
                               cfg: QuadratureConfig | None = None) -> MassProperties:
    spec = spec or OloidSpec()
    cfg = cfg or QuadratureConfig()
    names = list(FIELDS)
    res = flux_integrals([FIELDS[k] for k in names], spec, cfg)
    v = dict(zip(names, res.value))
    volume = v["volume"]
    com = np.array([v["x"], v["y"], v["z"]]) / volume
    rho = spec.density
    inertia = rho * inertia_from_components({
        "Ixx": v["Ixx"], "Iyy": v["Iyy"], "Izz": v["Izz"],
        "Ixy": -v["xy"], "Ixz": -v["xz"], "Iyz": -v["yz"],
    })
    return MassProperties(
        area=surface_area(spec, cfg),
        volume=volume,
        center_of_mass=com,
        inertia=inertia,
        method=Method.QUADRATURE,
        density=rho,
        metadata={"m_nodes": cfg.m_nodes, "t_levels_used": res.levels,
                  "converged": res.converged, "evaluations": res.evaluations},
    )


def _reduced_args(t, gap):
    t = np.asarray(t, dtype=float)
    if gap is None:
        gap = T_MAX - np.abs(t)
    if np.any(~np.isfinite(t)) or np.any(np.asarray(gap) <= 0.0):
        raise DomainError("reduced integrands need |t| < 2pi/3")
    return t, root_term(gap)


def reduced_integrand_Ixx(t, gap=None):
    """I_xx integrand after exact integration over ``m`` (even in ``t``)."""
    t, q = _reduced_args(t, gap)
    c = np.cos(t)
    poly = (-2510 * c + 547 * np.cos(2 * t) + 1129 * np.cos(3 * t) + 648 * np.cos(4 * t)
            + 181 * np.cos(5 * t) + 21 * np.cos(6 * t) - 1744)
    return -(c**2) * poly / (15360 * np.cos(0.5 * t) ** 8 * np.sqrt(q))


def reduced_integrand_Iyy(t, gap=None):
    """I_yy integrand after exact integration over ``m`` (even in ``t``)."""
    t, q = _reduced_args(t, gap)
    poly = (542 * np.cos(t) + 322 * np.cos(2 * t) + 122 * np.cos(3 * t)
            + 21 * np.cos(4 * t) + 361)
    return poly * np.tan(0.5 * t) ** 2 / (240 * np.sqrt(q))


def reduced_moments(levels: int = 10, tol: float = 1e-12) -> dict[str, float]:
    """Unit-radius I_xx and I_yy from the one-dimensional reduced integrands."""
    out = {}
    for key, fn in (("Ixx", reduced_integrand_Ixx), ("Iyy", reduced_integrand_Iyy)):
        out[key] = float(de_integrate(fn, -T_MAX, T_MAX, levels, tol, endpoint_distance=True))
    return out

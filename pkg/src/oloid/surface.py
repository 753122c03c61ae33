"""Parametric surface of the oloid.

The hull boundary is covered by two sheets ``P(m, t)`` with ``0 <= m <= 1``
(position along a ruling, from circle 1 to circle 2) and
``-2pi/3 <= t <= 2pi/3``; the sheets differ in the sign of ``z``. All
functions broadcast over array arguments.

Near ``|t| = 2pi/3`` the factor ``2 cos t + 1`` loses relative precision when
formed from ``t``. Every function therefore takes an optional ``gap``, the
distance ``2pi/3 - |t|`` supplied exactly by the caller (quadrature nodes know
it); when omitted it is computed from ``t``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, OloidSpec, SingularityError

T_MAX = 2.0 * math.pi / 3.0
_SQRT3 = math.sqrt(3.0)
_T_SLACK = 4 * np.finfo(float).eps * T_MAX


class Sheet(enum.IntEnum):
    UPPER = 1
    LOWER = -1

    @classmethod
    def coerce(cls, value) -> "Sheet":
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(value)


def _prepare(m, t, gap, sheet):
    m = np.asarray(m, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(m)) or np.any((m < 0.0) | (m > 1.0)):
        raise DomainError("m must lie in [0, 1]")
    if np.any(~np.isfinite(t)) or np.any(np.abs(t) > T_MAX + _T_SLACK):
        raise DomainError("t must lie in [-2pi/3, 2pi/3]")
    if gap is None:
        gap = np.maximum(T_MAX - np.abs(t), 0.0)
    else:
        gap = np.asarray(gap, dtype=float)
        if np.any(gap < 0.0):
            raise DomainError("gap must be non-negative")
    return m, t, gap, Sheet.coerce(sheet)


def root_term(gap):
    """``2 cos t + 1`` written in terms of ``gap = 2pi/3 - |t|``.

    Uses ``2 cos(2pi/3 - g) + 1 = 2 sin(g/2)**2 + sqrt(3) sin g``, which keeps
    full relative accuracy as ``g -> 0``.
    """
    gap = np.asarray(gap, dtype=float)
    return 2.0 * np.sin(0.5 * gap) ** 2 + _SQRT3 * np.sin(gap)


def position(m, t, sheet=Sheet.UPPER, spec: OloidSpec | None = None, *, gap=None) -> np.ndarray:
    """Point ``P(m, t)`` on the given sheet; result has shape ``(..., 3)``."""
    m, t, gap, sheet = _prepare(m, t, gap, sheet)
    r = spec.radius if spec is not None else 1.0
    c, s = np.cos(t), np.sin(t)
    q = root_term(gap)
    x = -0.5 + m / (c + 1.0) + (m - 1.0) * c
    y = (1.0 - m) * s
    z = sheet * m * np.sqrt(q) / (c + 1.0)
    return r * np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def _require_interior(gap):
    if np.any(gap <= 0.0):
        raise SingularityError("derivatives diverge at |t| = 2pi/3")


def tangents(m, t, sheet=Sheet.UPPER, spec: OloidSpec | None = None, *, gap=None):
    """Partial derivatives ``(dP/dm, dP/dt)``, each of shape ``(..., 3)``."""
    m, t, gap, sheet = _prepare(m, t, gap, sheet)
    _require_interior(gap)
    r = spec.radius if spec is not None else 1.0
    c, s = np.cos(t), np.sin(t)
    sq = np.sqrt(root_term(gap))
    cp1 = c + 1.0
    dm = (c + 1.0 / cp1, -s, sheet * sq / cp1)
    dt = (
        s * (m * (1.0 / cp1**2 - 1.0) + 1.0),
        (1.0 - m) * c,
        sheet * m * s * c / (cp1**2 * sq),
    )
    return (r * np.stack(np.broadcast_arrays(*dm), axis=-1),
            r * np.stack(np.broadcast_arrays(*dt), axis=-1))


def surface_normal(m, t, sheet=Sheet.UPPER, spec: OloidSpec | None = None, *, gap=None) -> np.ndarray:
    """Outward, unnormalised area element ``dP/dm x dP/dt`` on the upper sheet.

    On the lower sheet the mirror image ``(cx, cy, -cz)`` is returned, which is
    the outward orientation there (plain z-negation of the parametrisation
    would flip the cross product inward).
    """
    m, t, gap, sheet = _prepare(m, t, gap, sheet)
    _require_interior(gap)
    r = spec.radius if spec is not None else 1.0
    c, s = np.cos(t), np.sin(t)
    sq = np.sqrt(root_term(gap))
    cp1 = c + 1.0
    ruling = (2.0 - 3.0 * m) * c + 1.0
    nx = -c * ruling / (cp1 * sq)
    ny = s * ruling / (cp1 * sq)
    nz = sheet * ruling / cp1
    return r * r * np.stack(np.broadcast_arrays(nx, ny, nz), axis=-1)


@dataclass(frozen=True)
class SurfacePoint:
    m: float
    t: float
    sheet: Sheet
    position: np.ndarray
    dPdm: np.ndarray
    dPdt: np.ndarray
    normal: np.ndarray


def surface_point(m: float, t: float, sheet=Sheet.UPPER, spec: OloidSpec | None = None) -> SurfacePoint:
    sheet = Sheet.coerce(sheet)
    dm, dt = tangents(m, t, sheet, spec)
    return SurfacePoint(float(m), float(t), sheet, position(m, t, sheet, spec),
                        dm, dt, surface_normal(m, t, sheet, spec))

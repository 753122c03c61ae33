"""Shared value types and exceptions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class OloidError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OloidError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """A derivative was requested on the singular hull edge |t| = 2*pi/3."""


class EvaluationError(OloidError, ArithmeticError):
    """An integrand returned a non-finite value at an interior node."""


class TessellationError(OloidError):
    """Seam welding failed its verification check."""


class ContractError(OloidError, ValueError):
    """Input violates a structural precondition (e.g. a non-watertight mesh)."""


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"
    MESH = "mesh"


@dataclass(frozen=True)
class OloidSpec:
    """Oloid built from two circles of ``radius`` with uniform ``density``."""

    radius: float = 1.0
    density: float = 1.0

    def __post_init__(self):
        for name in ("radius", "density"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer))
                    and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")


@dataclass
class MassProperties:
    """Mass properties of a body with uniform density.

    ``inertia`` is taken about the coordinate origin (which is the centre of
    mass for the oloid in its canonical placement). ``std_error`` is only
    populated by the Monte Carlo estimator and maps quantity names
    (``"volume"``, ``"Ixx"``, ``"x"`` ...) to one-sigma errors.
    """

    area: float | None
    volume: float
    center_of_mass: np.ndarray
    inertia: np.ndarray
    method: Method
    std_error: dict[str, float] | None = None
    density: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.center_of_mass = np.asarray(self.center_of_mass, dtype=float).reshape(3)
        self.inertia = np.asarray(self.inertia, dtype=float).reshape(3, 3)
        self.method = Method(self.method)

    @property
    def mass(self) -> float:
        return self.density * self.volume

    @property
    def principal_moments(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.inertia)

    def is_physical(self, rtol: float = 1e-12) -> bool:
        """Symmetric tensor with positive diagonal obeying the triangle inequality."""
        I = self.inertia
        if not np.allclose(I, I.T, rtol=rtol, atol=rtol * np.abs(I).max()):
            return False
        d = np.diag(I)
        if np.any(d <= 0):
            return False
        total = d.sum()
        return bool(np.all(d <= (total - d) * (1 + rtol)))

    def as_dict(self) -> dict:
        out = {
            "method": self.method.value,
            "area": None if self.area is None else float(self.area),
            "volume": float(self.volume),
            "mass": float(self.mass),
            "center_of_mass": [float(v) for v in self.center_of_mass],
            "inertia": [[float(v) for v in row] for row in self.inertia],
        }
        if self.std_error is not None:
            out["std_error"] = {k: float(v) for k, v in self.std_error.items()}
        return out


INERTIA_KEYS = {
    "Ixx": (0, 0), "Iyy": (1, 1), "Izz": (2, 2),
    "Ixy": (0, 1), "Ixz": (0, 2), "Iyz": (1, 2),
}


def inertia_from_components(c: dict[str, float]) -> np.ndarray:
    I = np.zeros((3, 3))
    for key, (i, j) in INERTIA_KEYS.items():
        I[i, j] = I[j, i] = c[key]
    return I

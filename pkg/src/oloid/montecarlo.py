"""Point membership and Monte Carlo mass properties.

Two independent membership tests are provided:

* :func:`contains` minimises the support gap ``h(n) - n.p`` over unit
  directions. For a convex body the minimum is the signed distance of ``p``
  to the boundary (positive inside), so it doubles as a margin.
* :func:`inside_by_rulings` writes ``p = (1-lam) a + lam b`` with ``a`` in
  disk 1 and ``b`` in disk 2 and maximises a concave slack over ``lam``. It is
  exact up to rounding and cheap, so the sampler uses it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DomainError, MassProperties, Method, OloidSpec, inertia_from_components

BOX_HALF_EXTENTS = np.array([1.5, 1.0, 1.0])
_BLOCK = 1 << 16
_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


class Classification(enum.IntEnum):
    OUTSIDE = -1
    BOUNDARY = 0
    INSIDE = 1


@dataclass
class MembershipResult:
    classification: Classification | np.ndarray
    margin: float | np.ndarray


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 20250101
    direction_grid: int = 4
    refine_iters: int = 30

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.direction_grid < 1 or self.refine_iters < 0:
            raise DomainError("direction_grid >= 1 and refine_iters >= 0 required")


def support_function(n, spec: OloidSpec | None = None):
    """``max(n.p)`` over the oloid, for direction(s) ``n`` of shape ``(..., 3)``."""
    n = np.asarray(n, dtype=float)
    if np.any(~np.any(n != 0.0, axis=-1)):
        raise DomainError("support function needs a non-zero direction")
    r = spec.radius if spec is not None else 1.0
    nx, ny, nz = n[..., 0], n[..., 1], n[..., 2]
    h1 = -0.5 * r * nx + r * np.hypot(nx, ny)
    h2 = 0.5 * r * nx + r * np.hypot(nx, nz)
    return np.maximum(h1, h2)


@lru_cache(maxsize=8)
def icosphere(level: int) -> np.ndarray:
    """Unit vertices of an icosahedron subdivided ``level`` times."""
    g = 0.5 * (1.0 + math.sqrt(5.0))
    verts = [(-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0),
             (0, -1, g), (0, 1, g), (0, -1, -g), (0, 1, -g),
             (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1)]
    verts = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                v = verts[i] + verts[j]
                verts.append(v / np.linalg.norm(v))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    out = np.array(verts)
    out.setflags(write=False)
    return out


def _tangent_basis(n):
    helper = np.where(np.abs(n[..., :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    return u, np.cross(n, u)


def _gap(n, p, spec):
    return support_function(n, spec) - np.einsum("...i,...i->...", n, p)


def support_gap(points, spec: OloidSpec | None = None, cfg: McConfig | None = None,
                candidates: int = 3) -> np.ndarray:
    """Minimum of ``h(n) - n.p`` over unit ``n``, for points of shape ``(N, 3)``.

    Candidates, each an exact value of the gap at some unit direction so the
    minimum is an upper bound that is attained once any candidate is optimal:

    * an icosphere scan refined by compass search on the sphere;
    * the ridge where both circles attain the support, i.e. the normals of
      the ruled surface, scanned in ``t`` and refined by golden section;
    * the directions from each disk's nearest point towards ``p``.
    """
    cfg = cfg or McConfig()
    spec = spec or OloidSpec()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    grid = icosphere(cfg.direction_grid)
    h_grid = support_function(grid, spec)
    out = np.empty(len(pts))
    # chunk to keep the (points x directions) table small
    chunk = max(1, 2_000_000 // len(grid))
    for lo in range(0, len(pts), chunk):
        p = pts[lo:lo + chunk]
        phi = h_grid[None, :] - p @ grid.T
        k = min(candidates, len(grid))
        best = np.argpartition(phi, k - 1, axis=1)[:, :k]
        n = grid[best]                                  # (P, k, 3)
        val = np.take_along_axis(phi, best, axis=1)     # (P, k)
        val = _refine(n, val, p, spec, cfg.refine_iters, cfg.direction_grid).min(axis=1)
        val = np.minimum(val, _ridge_gap(p, spec))
        out[lo:lo + chunk] = np.minimum(val, _disk_gap(p, spec))
    return out


def _ridge_value(t, sign, p, r):
    # outward unit normal of the ruling at t is (-cos t, sin t, +-sqrt(2cos t+1)) / (2cos(t/2))
    c, s = np.cos(t), np.sin(t)
    q = np.maximum(2.0 * c + 1.0, 0.0)
    num = r * (1.0 + 0.5 * c) + c * p[:, :1] - s * p[:, 1:2] - sign * np.sqrt(q) * p[:, 2:]
    return num / np.sqrt(2.0 + 2.0 * c)


def _ridge_gap(p, spec, samples: int = 256, iters: int = 60):
    r = spec.radius
    t_max = 2.0 * math.pi / 3.0
    ts = np.linspace(-t_max, t_max, samples + 1)
    best = np.full(len(p), np.inf)
    for sign in (1.0, -1.0):
        vals = _ridge_value(ts[None, :], sign, p, r)
        j = vals.argmin(axis=1)
        lo = ts[np.maximum(j - 1, 0)]
        hi = ts[np.minimum(j + 1, samples)]
        f = lambda t: _ridge_value(t[:, None], sign, p, r)[:, 0]  # noqa: E731
        a, b = lo, hi
        for _ in range(iters):
            c1, c2 = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
            left = f(c1) <= f(c2)
            a, b = np.where(left, a, c1), np.where(left, c2, b)
        best = np.minimum(best, np.minimum(f(0.5 * (a + b)), vals.min(axis=1)))
    return best


def _disk_gap(p, spec):
    r = spec.radius
    best = np.full(len(p), np.inf)
    for center, plane_axis in ((-0.5, 2), (0.5, 1)):
        rel = p - np.array([center * r, 0.0, 0.0])
        inplane = rel.copy()
        inplane[:, plane_axis] = 0.0
        rad = np.linalg.norm(inplane, axis=1)
        nearest = inplane * np.minimum(1.0, r / np.maximum(rad, 1e-300))[:, None]
        d = rel - nearest
        norm = np.linalg.norm(d, axis=1)
        ok = norm > 0
        n = np.where(ok[:, None], d / np.where(ok, norm, 1.0)[:, None], 0.0)
        n[~ok] = [1.0, 0.0, 0.0]
        best = np.minimum(best, np.where(ok, _gap(n, p, spec), np.inf))
    return best


def _refine(n, val, p, spec, iters, level):
    step = np.full(val.shape, 1.2 / 2.0**level)
    angles = 2.0 * math.pi * np.arange(8) / 8.0
    rot = 0.0
    pp = p[:, None, None, :]
    for _ in range(iters):
        u, v = _tangent_basis(n)
        a = angles + rot
        dirs = (np.cos(a)[:, None] * u[..., None, :] + np.sin(a)[:, None] * v[..., None, :])
        trial = n[..., None, :] + step[..., None, None] * dirs
        trial /= np.linalg.norm(trial, axis=-1, keepdims=True)
        tv = _gap(trial, pp, spec)
        j = tv.argmin(axis=-1)
        best = np.take_along_axis(tv, j[..., None], axis=-1)[..., 0]
        better = best < val
        n = np.where(better[..., None], np.take_along_axis(trial, j[..., None, None], axis=-2)[..., 0, :], n)
        val = np.where(better, best, val)
        step = np.where(better, step, 0.5 * step)
        rot += 2.399963229728653  # golden angle
    return val


def classify(margin, tol: float):
    margin = np.asarray(margin)
    return np.where(margin > tol, Classification.INSIDE,
                    np.where(margin < -tol, Classification.OUTSIDE, Classification.BOUNDARY))


def contains(p, spec: OloidSpec | None = None, cfg: McConfig | None = None,
             tol: float | None = None) -> MembershipResult:
    """Classify point(s) by the sign of the support gap.

    ``tol`` defaults to ``1e-9 * radius``. A single point gives scalar fields;
    an ``(N, 3)`` array gives arrays.
    """
    spec = spec or OloidSpec()
    if tol is None:
        tol = 1e-9 * spec.radius
    arr = np.asarray(p, dtype=float)
    margin = support_gap(arr.reshape(-1, 3), spec, cfg)
    cls = classify(margin, tol)
    if arr.ndim == 1:
        return MembershipResult(Classification(int(cls[0])), float(margin[0]))
    return MembershipResult(cls, margin)


def ruling_slack(points, spec: OloidSpec | None = None, iters: int = 64) -> np.ndarray:
    """Largest slack ``w(lam) - |x - lam + 1/2|`` over admissible ``lam``.

    Non-negative exactly for points of the hull; ``-inf`` when no ``lam`` is
    admissible (``|y| + |z| > r``). Scaled back to length units.
    """
    r = spec.radius if spec is not None else 1.0
    pts = np.atleast_2d(np.asarray(points, dtype=float)) / r
    px, ay, az = pts[:, 0], np.abs(pts[:, 1]), np.abs(pts[:, 2])
    lo, hi = az.copy(), 1.0 - ay
    feasible = lo <= hi
    lo, hi = np.where(feasible, lo, 0.0), np.where(feasible, hi, 0.0)

    def slack(lam):
        w = (np.sqrt(np.maximum((1.0 - lam) ** 2 - ay**2, 0.0))
             + np.sqrt(np.maximum(lam**2 - az**2, 0.0)))
        return w - np.abs(px - lam + 0.5)

    # golden-section search for the maximum of a concave function
    a, b = lo, hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = slack(c), slack(d)
    for _ in range(iters):
        left = fc >= fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c, d, fc, fd = (np.where(left, b - _GOLDEN * (b - a), d), np.where(left, c, a + _GOLDEN * (b - a)),
                        np.where(left, np.nan, fd), np.where(left, fc, np.nan))
        new = np.where(left, c, d)
        fnew = slack(new)
        fc, fd = np.where(left, fnew, fc), np.where(left, fd, fnew)
    best = np.maximum(np.maximum(fc, fd), np.maximum(slack(lo), slack(hi)))
    return np.where(feasible, best * r, -np.inf)


def inside_by_rulings(points, spec: OloidSpec | None = None) -> np.ndarray:
    return ruling_slack(points, spec) >= 0.0


def _block_candidates(seed: int, block: int, r: float) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, block])
    u = np.random.Generator(bitgen).random((_BLOCK, 3))
    return (2.0 * u - 1.0) * (BOX_HALF_EXTENTS * r)


def _accepted_in_block(seed, block, spec):
    cand = _block_candidates(seed, block, spec.radius)
    return np.flatnonzero(inside_by_rulings(cand, spec)), cand


def sample_inside(count: int, spec: OloidSpec | None = None, cfg: McConfig | None = None,
                  workers: int = 1):
    """Uniform points inside the oloid by rejection from its bounding box.

    Candidates come in fixed blocks, block ``k`` drawn from a Philox stream
    keyed by the seed with counter ``k``, so the output depends only on the
    seed (never on ``workers``). Returns ``(points, attempts)`` where
    ``attempts`` counts candidates up to and including the last accepted one.
    """
    spec = spec or OloidSpec()
    cfg = cfg or McConfig()
    if count < 1:
        raise DomainError("count must be >= 1")
    chunks, have, block, last = [], 0, 0, 0
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        while have < count:
            # batching only affects speed; each block's content is fixed by its index
            batch = max(workers, int((count - have) / (0.25 * _BLOCK)) + 1)
            todo = range(block, block + batch)
            for b, (idx, cand) in zip(todo, pool.map(lambda k: _accepted_in_block(cfg.seed, k, spec), todo)):
                take = idx[: count - have]
                if len(take):
                    chunks.append(cand[take])
                    have += len(take)
                    last = b * _BLOCK + int(take[-1])
                if have >= count:
                    break
            block += batch
    return np.concatenate(chunks), int(last) + 1


def mc_mass_properties(spec: OloidSpec | None = None, cfg: McConfig | None = None,
                       workers: int = 1) -> MassProperties:
    spec = spec or OloidSpec()
    cfg = cfg or McConfig()
    pts, attempts = sample_inside(cfg.samples, spec, cfg, workers)
    box = float(np.prod(2.0 * BOX_HALF_EXTENTS * spec.radius))
    x, y, z = pts.T
    integrands = {
        "volume": np.ones(len(pts)),
        "Ixx": y * y + z * z, "Iyy": x * x + z * z, "Izz": x * x + y * y,
        "Ixy": -x * y, "Ixz": -x * z, "Iyz": -y * z,
    }
    est, se = {}, {}
    for key, f in integrands.items():
        # mean and variance over all attempts (rejected candidates contribute 0)
        mean = f.sum() / attempts
        var = (f * f).sum() / attempts - mean * mean
        est[key] = box * mean
        se[key] = box * math.sqrt(max(var, 0.0) / attempts)
    com = pts.mean(axis=0)
    for axis, name in enumerate("xyz"):
        se[name] = float(pts[:, axis].std() / math.sqrt(len(pts)))
    rho = spec.density
    inertia = rho * inertia_from_components(est)
    se_scaled = {k: (rho * v if k.startswith("I") else v) for k, v in se.items()}
    return MassProperties(
        area=None,
        volume=est["volume"],
        center_of_mass=com,
        inertia=inertia,
        method=Method.MONTE_CARLO,
        std_error=se_scaled,
        density=rho,
        metadata={"samples": len(pts), "attempts": attempts, "seed": cfg.seed,
                  "acceptance_ratio": len(pts) / attempts},
    )

"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``,
and repeated in the terminal summary) before asserting. Run directly with
``python tests/test_acceptance.py`` for just those lines.
"""

import math
import time

import numpy as np
import pytest

from oloid import OloidSpec
from oloid.elliptic import closed_form_properties
from oloid.mesh import MeshConfig, mesh_mass_properties, tessellate
from oloid.montecarlo import Classification, McConfig, contains, mc_mass_properties
from oloid.quadrature import QuadratureConfig, quadrature_mass_properties, reduced_moments
from oloid.surface import T_MAX, Sheet, position

from conftest import IXX, IYY, VOLUME

LINES: list[str] = []


def verdict(number: int, title: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    LINES.append(line)
    print(line)
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(scope="module")
def quad():
    t0 = time.perf_counter()
    mp = quadrature_mass_properties()
    return mp, time.perf_counter() - t0


@pytest.fixture(scope="module")
def closed():
    return closed_form_properties(OloidSpec())


def test_criterion_1_closed_form(closed):
    reps = 2000
    t0 = time.perf_counter()
    for _ in range(reps):
        closed_form_properties(OloidSpec())
    per_call = (time.perf_counter() - t0) / reps
    errs = [rel(closed.volume, VOLUME), rel(closed.inertia[0, 0], IXX),
            rel(closed.inertia[1, 1], IYY), rel(closed.inertia[2, 2], IYY)]
    ok = max(errs) <= 1e-13 and closed.area == 4 * math.pi and per_call < 1e-3
    assert verdict(1, "closed-form constants", ok,
                   f"max rel err {max(errs):.1e} <= 1e-13, A == 4pi, {per_call * 1e6:.0f} us/call")


def test_criterion_2_quadrature_oracle(quad, closed):
    mp, seconds = quad
    errs = [rel(mp.volume, closed.volume), rel(mp.area, closed.area)]
    errs += [rel(mp.inertia[i, i], closed.inertia[i, i]) for i in range(3)]
    off = np.abs(mp.inertia[~np.eye(3, dtype=bool)]).max()
    com = np.abs(mp.center_of_mass).max()
    ok = max(errs) <= 1e-10 and off <= 1e-10 and com <= 1e-10 and seconds < 5
    assert verdict(2, "quadrature matches closed forms", ok,
                   f"rel {max(errs):.1e}, off-diag {off:.1e}, com {com:.1e}, {seconds:.2f} s")


def test_criterion_3_reduced_integrands(quad):
    mp, _ = quad
    red = reduced_moments()
    e = max(rel(red["Ixx"], mp.inertia[0, 0]), rel(red["Iyy"], mp.inertia[1, 1]))
    assert verdict(3, "reduced 1-D route equals 2-D flux route", e <= 1e-10, f"rel {e:.1e} <= 1e-10")


def test_criterion_4_m_exactness():
    a = quadrature_mass_properties(cfg=QuadratureConfig(m_nodes=3))
    b = quadrature_mass_properties(cfg=QuadratureConfig(m_nodes=8))
    errs = [rel(a.volume, b.volume), rel(a.area, b.area)]
    errs += [rel(a.inertia[i, i], b.inertia[i, i]) for i in range(3)]
    assert verdict(4, "3-node vs 8-node m-rule", max(errs) <= 1e-12, f"rel {max(errs):.1e} <= 1e-12")


def test_criterion_5_monte_carlo(closed):
    t0 = time.perf_counter()
    mc = mc_mass_properties(cfg=McConfig(samples=1_000_000))
    seconds = time.perf_counter() - t0
    d = max(abs(mc.inertia[0, 0] - IXX), abs(mc.inertia[1, 1] - IYY))
    sig = max(abs(mc.inertia[i, i] - closed.inertia[i, i]) / mc.std_error[k]
              for i, k in enumerate(("Ixx", "Iyy", "Izz")))
    p = VOLUME / 12
    z = abs(mc.metadata["acceptance_ratio"] - p) / math.sqrt(p * (1 - p) / mc.metadata["attempts"])
    ok = d < 0.01 and sig <= 4 and z <= 3 and seconds < 30
    assert verdict(5, "Monte Carlo, 1e6 samples", ok,
                   f"abs {d:.1e} < 0.01, {sig:.2f} se <= 4, ratio {z:.2f} sigma <= 3, {seconds:.1f} s")


def test_criterion_6_mesh(fine_mesh, closed):
    mp = mesh_mass_properties(fine_mesh)
    defect = fine_mesh.convexity_defect()
    vols = [mesh_mass_properties(tessellate(OloidSpec(), MeshConfig(nm, nt))).volume
            for nm, nt in ((64, 128), (128, 256))] + [mp.volume]
    monotone = vols[0] < vols[1] < vols[2] < closed.volume
    e = max(rel(mp.volume, closed.volume), rel(mp.inertia[0, 0], closed.inertia[0, 0]))
    tight = fine_mesh.is_watertight() and fine_mesh.euler_characteristic() == 2
    ok = tight and defect <= 1e-6 and e <= 1e-3 and monotone
    assert verdict(6, "mesh oracle at 256x512", ok,
                   f"watertight {tight}, convexity {defect:.1e} <= 1e-6, rel {e:.1e} <= 1e-3, "
                   f"monotone from below {monotone}")


def test_criterion_7_symmetry(quad, fine_mesh):
    q, _ = quad
    m = mesh_mass_properties(fine_mesh)
    offdiag = ~np.eye(3, dtype=bool)
    q_off = np.abs(q.inertia[offdiag]).max()
    m_off = np.abs(m.inertia[offdiag]).max()
    q_yz = rel(q.inertia[1, 1], q.inertia[2, 2])
    rng = np.random.default_rng(2024)
    pts = rng.uniform(-1, 1, size=(1000, 3)) * [1.5, 1, 1]
    base = contains(pts).classification
    images = (pts * [1, -1, 1], pts * [1, 1, -1], np.stack([-pts[:, 0], pts[:, 2], pts[:, 1]], axis=1))
    same = all(np.array_equal(contains(p).classification, base) for p in images)
    ok = q_off <= 1e-10 and m_off <= 1e-9 and q_yz <= 1e-10 and same
    assert verdict(7, "symmetry suite", ok,
                   f"quad off {q_off:.1e}, mesh off {m_off:.1e}, Iyy/Izz {q_yz:.1e}, "
                   f"membership invariant {same}")


def _scaled(mp, r):
    return np.array([mp.volume / r**3, *(np.diag(mp.inertia) / r**5),
                     *([] if mp.area is None else [mp.area / r**2])])


def test_criterion_8_scaling():
    methods = {
        "closed_form": (lambda s: closed_form_properties(s), 1e-13),
        "quadrature": (lambda s: quadrature_mass_properties(s), 1e-12),
        "monte_carlo": (lambda s: mc_mass_properties(s, McConfig(samples=100_000, seed=77)), 1e-12),
        "mesh": (lambda s: mesh_mass_properties(tessellate(s, MeshConfig(32, 64)), s.density), 1e-12),
    }
    worst = {}
    for name, (fn, _) in methods.items():
        base = _scaled(fn(OloidSpec(1.0)), 1.0)
        worst[name] = max(np.abs(_scaled(fn(OloidSpec(r)), r) / base - 1).max() for r in (0.5, 2.0, 3.0))
    ok = all(worst[k] <= methods[k][1] for k in methods)
    assert verdict(8, "scaling for r in {1/2, 2, 3}", ok,
                   ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_9_boundary_stress():
    rng = np.random.default_rng(99)
    n = 10_000
    m = rng.random(n)
    t = (2 * rng.random(n) - 1) * T_MAX
    pts = position(m, t, Sheet.UPPER)
    lower = rng.random(n) < 0.5
    pts[lower, 2] *= -1.0
    inner = contains(0.999 * pts, tol=1e-6).classification == Classification.INSIDE
    outer = contains(1.001 * pts, tol=1e-6).classification == Classification.OUTSIDE
    ok = bool(inner.all() and outer.all())
    assert verdict(9, "membership boundary stress", ok,
                   f"{inner.sum()}/{n} inside at 0.999, {outer.sum()}/{n} outside at 1.001")


def pytest_terminal_summary_lines():
    return list(LINES)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))

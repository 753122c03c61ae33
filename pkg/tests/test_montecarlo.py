import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oloid import DomainError, OloidSpec
from oloid.elliptic import closed_form_properties
from oloid.montecarlo import (
    Classification,
    McConfig,
    contains,
    icosphere,
    inside_by_rulings,
    mc_mass_properties,
    ruling_slack,
    sample_inside,
    support_function,
    support_gap,
)
from oloid.surface import T_MAX, Sheet, position

from conftest import IXX, IYY, VOLUME

unit_vec = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: sum(x * x for x in v) > 1e-4)


def _surface_samples(rng, n):
    m = rng.random(n)
    t = (2 * rng.random(n) - 1) * T_MAX
    sheet = np.where(rng.random(n) < 0.5, 1, -1)
    up = position(m, t, Sheet.UPPER)
    return up * np.stack([np.ones(n), np.ones(n), sheet], axis=1)


@pytest.fixture(scope="module")
def mc_small():
    return mc_mass_properties(cfg=McConfig(samples=50_000, seed=7))


# -- support function --------------------------------------------------------

@pytest.mark.parametrize("n,h", [((1, 0, 0), 1.5), ((0, 1, 0), 1.0), ((0, 0, 1), 1.0), ((-1, 0, 0), 1.5)])
def test_support_examples(n, h):
    assert support_function(n) == pytest.approx(h, rel=1e-15)


@given(unit_vec, st.floats(0.01, 100.0))
def test_support_homogeneous(n, lam):
    n = np.array(n)
    assert support_function(lam * n) == pytest.approx(lam * support_function(n), rel=1e-14)


def test_support_matches_surface_sampling():
    dirs = icosphere(2)
    t = np.linspace(-T_MAX, T_MAX, 40_001)
    m = np.linspace(0, 1, 3)  # ruled surface: extremes sit on the circles
    pts = np.concatenate([position(mi, t, s).reshape(-1, 3) for mi in m for s in Sheet])
    brute = (dirs @ pts.T).max(axis=1)
    h = support_function(dirs)
    assert np.all(h >= brute - 1e-14)
    np.testing.assert_allclose(h, brute, atol=1e-6)


def test_support_zero_direction():
    with pytest.raises(DomainError):
        support_function([0.0, 0.0, 0.0])


def test_support_radius_scaling():
    n = np.array([0.3, -0.5, 0.8])
    assert support_function(n, OloidSpec(2.5)) == pytest.approx(2.5 * support_function(n), rel=1e-15)


def test_icosphere_size():
    d = icosphere(4)
    assert len(d) == 2562
    np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0, rtol=1e-15)


# -- membership --------------------------------------------------------------

def test_origin_margin():
    # brute force over 2e6 random directions puts the minimum gap at 1/sqrt(2)
    res = contains([0.0, 0.0, 0.0])
    assert res.classification is Classification.INSIDE
    assert res.margin == pytest.approx(1 / math.sqrt(2), rel=1e-9)


def test_origin_margin_brute_force():
    rng = np.random.default_rng(3)
    n = rng.normal(size=(200_000, 3))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    brute = support_function(n).min()
    assert brute >= 1 / math.sqrt(2) - 1e-12
    assert brute == pytest.approx(1 / math.sqrt(2), abs=1e-4)


def test_beyond_apex_is_outside():
    assert contains([1.5 * 1.01, 0.0, 0.0]).classification is Classification.OUTSIDE
    assert contains([1.5, 0.0, 0.0]).classification is Classification.BOUNDARY


def test_scaled_surface_point():
    p = position(0.37, 0.9, Sheet.UPPER)
    assert contains(0.999 * p).classification is Classification.INSIDE
    assert contains(1.001 * p).classification is Classification.OUTSIDE


def test_boundary_stress(rng):
    pts = _surface_samples(rng, 10_000)
    inner = contains(0.999 * pts, tol=1e-6)
    outer = contains(1.001 * pts, tol=1e-6)
    assert np.all(inner.classification == Classification.INSIDE)
    assert np.all(outer.classification == Classification.OUTSIDE)


def test_surface_is_boundary(rng):
    res = contains(_surface_samples(rng, 2000), tol=1e-6)
    assert np.all(res.classification == Classification.BOUNDARY)


def test_membership_symmetries(rng):
    pts = rng.uniform(-1, 1, size=(1000, 3)) * [1.5, 1, 1]
    base = contains(pts, tol=1e-6).classification
    for image in (pts * [1, -1, 1], pts * [1, 1, -1], np.stack([-pts[:, 0], pts[:, 2], pts[:, 1]], axis=1)):
        np.testing.assert_array_equal(contains(image, tol=1e-6).classification, base)


def test_gap_agrees_with_rulings(rng):
    pts = rng.uniform(-1, 1, size=(5000, 3)) * [1.5, 1, 1]
    gap = support_gap(pts)
    clear = np.abs(gap) > 1e-6
    np.testing.assert_array_equal((gap > 0)[clear], inside_by_rulings(pts)[clear])


def test_ruling_slack_on_surface(rng):
    pts = _surface_samples(rng, 2000)
    assert np.abs(ruling_slack(pts)).max() < 1e-9
    assert np.all(ruling_slack(np.array([[0.0, 0.9, 0.9]])) == -np.inf)


def test_contains_radius_scaling():
    spec = OloidSpec(3.0)
    p = np.array([0.2, 0.3, -0.1])
    assert contains(3 * p, spec).margin == pytest.approx(3 * contains(p).margin, rel=1e-9)


def test_config_validation():
    for kwargs in ({"samples": 0}, {"seed": -1}, {"seed": 2**64}, {"direction_grid": 0}, {"refine_iters": -1}):
        with pytest.raises(DomainError):
            McConfig(**kwargs)


# -- sampling ----------------------------------------------------------------

def test_sample_determinism_across_workers():
    cfg = McConfig(seed=99)
    a, na = sample_inside(70_000, cfg=cfg, workers=1)
    b, nb = sample_inside(70_000, cfg=cfg, workers=4)
    assert na == nb
    np.testing.assert_array_equal(a, b)
    c, _ = sample_inside(10, cfg=cfg, workers=3)
    np.testing.assert_array_equal(c, a[:10])


def test_samples_are_inside():
    pts, attempts = sample_inside(2000, cfg=McConfig(seed=5))
    assert len(pts) == 2000 and attempts >= 2000
    res = contains(pts, tol=1e-9)
    assert np.all(res.classification == Classification.INSIDE)


def test_seeds_differ():
    a, _ = sample_inside(5, cfg=McConfig(seed=1))
    b, _ = sample_inside(5, cfg=McConfig(seed=2))
    assert not np.array_equal(a, b)


def test_sample_count_validated():
    with pytest.raises(DomainError):
        sample_inside(0)


def test_small_run_statistics(mc_small):
    cf = closed_form_properties(OloidSpec())
    assert mc_small.area is None
    assert mc_small.metadata["samples"] == 50_000
    for key, idx in (("Ixx", 0), ("Iyy", 1), ("Izz", 2)):
        assert abs(mc_small.inertia[idx, idx] - cf.inertia[idx, idx]) <= 4 * mc_small.std_error[key]
    assert abs(mc_small.volume - VOLUME) <= 4 * mc_small.std_error["volume"]
    p = VOLUME / 12
    sigma = math.sqrt(p * (1 - p) / mc_small.metadata["attempts"])
    assert abs(mc_small.metadata["acceptance_ratio"] - p) <= 3 * sigma


def test_density_applies_to_mc():
    cfg = McConfig(samples=5000, seed=11)
    a = mc_mass_properties(cfg=cfg)
    b = mc_mass_properties(OloidSpec(1.0, 2.0), cfg)
    assert b.volume == a.volume
    np.testing.assert_allclose(b.inertia, 2 * a.inertia, rtol=1e-15)


@pytest.mark.slow
def test_million_samples_two_decimals():
    mp = mc_mass_properties(cfg=McConfig(samples=1_000_000))
    assert abs(mp.inertia[0, 0] - IXX) < 0.01
    assert abs(mp.inertia[1, 1] - IYY) < 0.01


@pytest.mark.slow
def test_volume_estimator_unbiased():
    vols = np.array([mc_mass_properties(cfg=McConfig(samples=100_000, seed=1000 + k)).volume
                     for k in range(32)])
    sigma = vols.std(ddof=1)
    assert abs(vols.mean() - VOLUME) <= 4 * sigma / math.sqrt(32)

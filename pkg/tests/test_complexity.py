import math

import numpy as np
import pytest
import scipy.special

from sketchlab.complexity import (
    AnalyticProfile,
    ComplexityEstimate,
    EmpiricalProfile,
    dudley_closed_form,
    dudley_integral,
    gamma2_upper,
    gaussian_width_mc,
    greedy_net,
    unit_ball_profile,
)
from sketchlab.core import euclidean
from sketchlab.sets import ManifoldSet, ManifoldSpec, SparseSet


def circle_points(count, seed=0):
    return ManifoldSet(ManifoldSpec("circle", 2, radius=1.0)).sample(count, seed=seed)


def test_greedy_net_radius_covers_everything():
    rng = np.random.default_rng(0)
    P = rng.standard_normal((300, 5))
    for u in (0.5, 1.5, 4.0):
        net = greedy_net(P, u)
        dists = np.linalg.norm(P[:, None, :] - net[None, :, :], axis=2).min(axis=1)
        assert dists.max() <= u


def test_greedy_net_trivial_cases():
    P = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert greedy_net(P, 2.5).shape[0] == 1
    assert greedy_net(P, 0.5).shape[0] == 2
    with pytest.raises(ValueError):
        greedy_net(P, 0.0)


def test_greedy_net_circle_size():
    # covering the unit circle at radius 0.1 takes at least
    # 2*pi / (4*arcsin(0.05)) ~ 31.4 centers; greedy stays below 70
    net = greedy_net(circle_points(1000), 0.1)
    assert 32 <= net.shape[0] <= 70


def test_greedy_net_custom_metric_matches_euclidean():
    P = np.random.default_rng(1).standard_normal((40, 3))
    assert np.array_equal(greedy_net(P, 0.8), greedy_net(P, 0.8, metric=euclidean))


def test_dudley_unit_ball_4():
    val = dudley_integral(unit_ball_profile(4), 1.0)
    assert 2.0 <= val <= 2.0 * math.sqrt(math.log(3.0 * math.e))
    assert val <= dudley_closed_form(unit_ball_profile(4), 1.0)


def test_dudley_closed_form_dominates_numeric():
    for K in (1, 2, 5, 16):
        for c in (1.5, 3.0, 10.0):
            for N0 in (1.0, 7.0):
                p = AnalyticProfile(K, c, N0)
                assert dudley_integral(p, 1.0) <= dudley_closed_form(p, 1.0) + 1e-12


def test_dudley_singleton_profile_is_zero():
    assert dudley_integral(EmpiricalProfile((0.5,), (1.0,)), 2.0) == 0.0


def test_dudley_monotone_in_K_and_diameter():
    vals_K = [dudley_integral(AnalyticProfile(K, 3.0), 1.0) for K in (1, 2, 4, 8)]
    assert all(a < b for a, b in zip(vals_K, vals_K[1:]))
    vals_D = [dudley_integral(AnalyticProfile(3, 3.0), d) for d in (0.5, 1.0, 2.0, 4.0)]
    assert all(a < b for a, b in zip(vals_D, vals_D[1:]))


def test_dudley_empirical_step_sum():
    # a net of size N at radius r certifies N(u) <= N for u >= r, so sizes
    # apply from their radius: N = 4 on [0, 2), N = 2 on [2, inf)
    prof = EmpiricalProfile((1.0, 2.0), (4.0, 2.0))
    expect = 2.0 * math.sqrt(math.log(4.0)) + math.sqrt(math.log(2.0))
    assert dudley_integral(prof, 3.0) == pytest.approx(expect, rel=1e-12)
    assert dudley_integral(prof, 1.5) == pytest.approx(
        1.5 * math.sqrt(math.log(4.0)), rel=1e-12
    )


def test_dudley_empirical_circle_close_to_analytic():
    pts = circle_points(1000)
    radii = np.geomspace(0.02, 2.0, 24)
    sizes = tuple(float(greedy_net(pts, u).shape[0]) for u in radii)
    emp = dudley_integral(EmpiricalProfile(tuple(radii), sizes), 2.0)
    ana = dudley_integral(AnalyticProfile(1.0, math.pi, 1.0), 2.0)
    assert 0.5 * ana <= emp <= 2.0 * ana


def test_profile_validation():
    with pytest.raises(ValueError):
        AnalyticProfile(0.0, 3.0)
    with pytest.raises(ValueError):
        AnalyticProfile(2.0, math.inf)
    with pytest.raises(ValueError):
        EmpiricalProfile((1.0, 0.5), (4.0, 2.0))
    with pytest.raises(ValueError):
        EmpiricalProfile((0.5, 1.0), (2.0, 4.0))
    with pytest.raises(ValueError):
        EmpiricalProfile((0.5,), (0.5,))
    with pytest.raises(ValueError):
        dudley_integral(unit_ball_profile(2), -1.0)


def test_width_two_point_set():
    e1 = np.zeros(6)
    e1[0] = 1.0
    est, se = gaussian_width_mc(np.array([e1, -e1]), g_trials=10000, seed=3)
    assert est == pytest.approx(math.sqrt(2.0 / math.pi), abs=0.02)
    assert se < 0.01


def test_width_dense_sphere_r4():
    rng = np.random.default_rng(1)
    S = rng.standard_normal((16384, 4))
    S /= np.linalg.norm(S, axis=1, keepdims=True)
    est, se = gaussian_width_mc(S, g_trials=3000, seed=4)
    chi4_mean = math.sqrt(2.0) * scipy.special.gamma(2.5) / scipy.special.gamma(2.0)
    assert est == pytest.approx(chi4_mean, abs=0.03)


def test_width_origin_and_validation():
    assert gaussian_width_mc(np.zeros((1, 3)), g_trials=200, seed=0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        gaussian_width_mc(np.zeros((1, 3)), g_trials=50, seed=0)


def test_width_deterministic_in_seed():
    P = np.random.default_rng(2).standard_normal((50, 4))
    assert gaussian_width_mc(P, 300, seed=7) == gaussian_width_mc(P, 300, seed=7)


def test_gamma2_upper_examples():
    assert gamma2_upper(diameter=1.0, cardinality=math.e) == pytest.approx(1.0, rel=1e-12)
    prof = unit_ball_profile(4)
    assert gamma2_upper(profile=prof, diameter=1.0) == dudley_integral(prof, 1.0)
    assert gamma2_upper(diameter=2.0, cardinality=100) <= 4.292
    # with both inputs the smaller wins
    both = gamma2_upper(profile=prof, diameter=1.0, cardinality=2)
    assert both == min(dudley_integral(prof, 1.0), math.sqrt(math.log(2.0)))
    with pytest.raises(ValueError):
        gamma2_upper(diameter=1.0)
    with pytest.raises(ValueError):
        gamma2_upper(diameter=1.0, cardinality=0.5)


def test_width_dudley_consistency_catalogue():
    # one-sided: sampled width - 3 stderr <= 3 * dudley surrogate
    for K in (1, 2, 4, 8, 16):
        rng = np.random.default_rng(K)
        S = rng.standard_normal((4000, K))
        S /= np.linalg.norm(S, axis=1, keepdims=True)
        est, se = gaussian_width_mc(S, 400, seed=K)
        assert est - 3 * se <= 3 * dudley_integral(unit_ball_profile(K), 1.0)

    circle = circle_points(2000)
    est, se = gaussian_width_mc(circle, 400, seed=33)
    assert est - 3 * se <= 3 * dudley_integral(AnalyticProfile(1.0, math.pi), 2.0)

    cloud = np.random.default_rng(9).standard_normal((100, 20))
    dists = np.linalg.norm(cloud[:, None] - cloud[None, :], axis=2)
    est, se = gaussian_width_mc(cloud, 400, seed=34)
    radii = np.geomspace(0.05, 1.0, 12) * dists.max()
    sizes = tuple(float(greedy_net(cloud, u).shape[0]) for u in radii)
    emp = EmpiricalProfile(tuple(radii), sizes)
    assert est - 3 * se <= 3 * dudley_integral(emp, dists.max())


def test_complexity_estimate_validation():
    ComplexityEstimate(1.0, 0.5, 0.01, 2.0)
    with pytest.raises(ValueError):
        ComplexityEstimate(-1.0, 0.5, 0.01, 2.0)


def test_sparse_sphere_width_scales_like_root_log():
    # width of unit s-sparse vectors grows like sqrt(s log(en/s)): check the
    # MC estimate sits below the analytic envelope
    s_set = SparseSet(64, 4)
    X = s_set.sample(3000, seed=5)
    est, se = gaussian_width_mc(X, 300, seed=6)
    envelope = 3.0 * math.sqrt(4 * math.log(math.e * 64 / 4))
    assert est - 3 * se <= envelope
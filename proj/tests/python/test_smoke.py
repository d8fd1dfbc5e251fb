import math

import numpy as np
import pytest

import inhomstat as ist


@pytest.fixture
def window():
    return ist.RectWindow(0.0, 0.0, 100.0, 50.0)


def test_translation_weight_matches_closed_form():
    w = ist.RectWindow(0.0, 0.0, 10.0, 10.0)
    assert ist.translation_weight(w, (4, 5), (6, 5)) == pytest.approx(1.25)
    assert ist.translation_weight(w, (1, 1), (9, 9)) == pytest.approx(25.0)


def test_torus_shift_round_trip(window):
    pts = ist.sample_homogeneous_poisson(window, 0.01, seed=3)
    there = ist.torus_shift(pts, (37.5, 12.25), window)
    back = ist.torus_shift(there, (-37.5, -12.25), window)
    assert back.shape == pts.shape
    assert np.allclose(back, pts, atol=1e-9)


def test_kernel_intensity_keeps_mass(window):
    pts = ist.sample_homogeneous_poisson(window, 0.02, seed=5)
    s = ist.kernel_intensity(pts, window, h=6.0, nx=64, ny=32)
    assert s.values.shape == (32, 64)
    assert s.total_mass() == pytest.approx(len(pts), rel=1e-3)


def test_bandwidth_choice_is_a_candidate(window):
    pts = ist.sample_homogeneous_poisson(window, 0.04, seed=9)
    cands = ist.default_bandwidth_candidates(window, 64, 32, 10)
    assert ist.cvl_bandwidth(pts, window, cands) in cands


def test_k_inhom_near_poisson_reference(window):
    lam = ist.IntensitySurface.constant(window, 32, 16, 0.05)
    r = list(np.linspace(0.0, 8.0, 33))
    means = np.zeros(len(r))
    for seed in range(40):
        pts = ist.sample_homogeneous_poisson(window, 0.05, seed=seed)
        means += ist.k_inhom(pts, window, lam, r).value
    means /= 40
    k = ist.k_inhom(pts, window, lam, r)
    assert k.kind == "K"
    assert means[-1] == pytest.approx(math.pi * 64.0, rel=0.05)


def test_goodness_of_fit_returns_valid_p(window):
    lam = ist.IntensitySurface.constant(window, 32, 16, 0.03)
    pts = ist.sample_inhom_poisson(lam, seed=11)
    opts = ist.McOptions(nsim=19, r_max=10.0, r_points=64, sided="greater", seed=4)
    out = ist.goodness_of_fit_test(pts, window, lam, "K", opts)
    assert 0.0 < out.result.p_value <= 1.0
    assert len(out.simulated) == 19
    again = ist.goodness_of_fit_test(pts, window, lam, "K", opts)
    assert again.result.simulated_t == out.result.simulated_t


def test_lotwick_silverman_runs(window):
    a = ist.sample_homogeneous_poisson(window, 0.02, seed=1)
    b = ist.sample_homogeneous_poisson(window, 0.02, seed=2)
    la = ist.kernel_intensity(a, window, 8.0, 32, 16)
    lb = ist.kernel_intensity(b, window, 8.0, 32, 16)
    opts = ist.McOptions(nsim=19, r_max=10.0, r_points=64)
    out = ist.lotwick_silverman_test(a, b, window, la, lb, "Jcross", opts)
    assert 0.0 < out.result.p_value <= 1.0


def test_rank_p_value():
    assert ist.rank_p_value(1.0, [1.5, 0.5, 1.5]) == pytest.approx(0.75)
    assert ist.rank_p_value(9.0, [1.0, 2.0, 3.0]) == pytest.approx(0.25)


def test_errors_raise(window):
    with pytest.raises(ist.Error):
        ist.erode(ist.RectWindow(0, 0, 10, 10), 5.0)
    with pytest.raises(ist.Error):
        ist.kernel_intensity(np.zeros((0, 2)), window, 5.0, 8, 8)

import math

import numpy as np
import pytest

from hsidenoise import noisegen as ng
from hsidenoise.noisegen import NoiseSpec


def test_gaussian_zero_variance_and_moments():
    cube = np.random.default_rng(0).uniform(size=(4, 4, 2))
    np.testing.assert_array_equal(ng.add_gaussian(cube, 0.0, seed=1), cube)
    noise = ng.add_gaussian(np.zeros((1000, 100, 10)), 0.1, seed=2)
    assert abs(noise.var() - 0.1) < 0.001
    assert abs(noise.mean()) < 3 * math.sqrt(0.1 / noise.size)


def test_gaussian_as_sigma():
    noise = ng.add_gaussian(np.zeros((500, 200, 2)), 0.1, seed=3, as_sigma=True)
    assert abs(noise.var() - 0.01) < 0.0003


def test_gaussian_deterministic_and_input_untouched():
    cube = np.zeros((5, 5, 3))
    a = ng.add_gaussian(cube, 0.1, seed=4)
    b = ng.add_gaussian(cube, 0.1, seed=4)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(cube, 0.0)
    assert not np.array_equal(a, ng.add_gaussian(cube, 0.1, seed=5))


def test_snr_fixed_target():
    cube = np.ones((1000, 500, 2))
    noisy, snrs = ng.add_gaussian_snr(cube, (20, 20), seed=6)
    assert snrs == [20.0, 20.0]
    assert abs((noisy - cube).var() - 0.01) < 0.0002


def test_snr_zero_band_and_range():
    cube = np.random.default_rng(7).uniform(size=(8, 8, 6))
    cube[:, :, 2] = 0
    noisy, snrs = ng.add_gaussian_snr(cube, (15, 25), seed=8)
    assert snrs[2] is None
    np.testing.assert_array_equal(noisy[:, :, 2], 0.0)
    assert all(15 <= s <= 25 for s in snrs if s is not None)
    with pytest.raises(ValueError):
        ng.add_gaussian_snr(cube, (25, 15), seed=8)


def test_deadlines():
    cube = np.ones((7, 20, 5))
    np.testing.assert_array_equal(ng.add_deadlines(cube, (1, 5), (0, 0), seed=1), cube)
    out, info = ng.add_deadlines(cube, (2, 3), (1, 1), (1, 1), seed=9, return_info=True)
    assert sorted(info) == [2, 3]
    for band1, lines in info.items():
        (start, width), = lines
        assert width == 1
        zeros = out[:, :, band1 - 1] == 0
        assert zeros.sum() == 7 and zeros[:, start].all()
    for b in (0, 3, 4):
        np.testing.assert_array_equal(out[:, :, b], cube[:, :, b])


def test_deadline_widths_and_counts():
    out, info = ng.add_deadlines(np.ones((3, 50, 4)), None, (3, 10), (1, 3), seed=10, return_info=True)
    for lines in info.values():
        assert 3 <= len(lines) <= 10
        assert all(1 <= w <= 3 for _, w in lines)


def test_stripes():
    cube = np.random.default_rng(11).uniform(size=(6, 30, 4))
    np.testing.assert_array_equal(ng.add_stripes(cube, None, value_range=(0, 0), seed=1), cube)
    out, info = ng.add_stripes(cube, (3, 3), (1, 1), seed=12, return_info=True)
    (col, val), = info[3]
    np.testing.assert_allclose(out[:, col, 2], cube[:, col, 2] + val, atol=1e-15)
    assert np.count_nonzero(out != cube) == 6
    out, info = ng.add_stripes(cube, None, (20, 40), seed=13, return_info=True)
    for stripes in info.values():
        cols = [c for c, _ in stripes]
        assert len(set(cols)) == len(cols) and 20 <= len(cols) <= 30
        assert all(-0.25 <= v <= 0.25 for _, v in stripes)


def test_stripe_count_clamped():
    out, info = ng.add_stripes(np.zeros((2, 5, 1)), None, (20, 40), seed=14, return_info=True)
    assert len(info[1]) == 5


@pytest.mark.parametrize("density", [0.0, 0.2, 1.0])
def test_impulse_counts(density):
    cube = np.full((20, 15, 3), 0.5)
    out, counts = ng.add_impulse(cube, density, seed=15, return_info=True)
    k = math.floor(density * 300)
    assert counts == [k] * 3
    for b in range(3):
        changed = out[:, :, b] != 0.5
        assert changed.sum() == k
        assert set(np.unique(out[:, :, b][changed])) <= {0.0, 1.0}


def test_impulse_balance():
    out = ng.add_impulse(np.full((1000, 1000, 1), 0.5), 0.5, seed=16)
    ones = (out == 1).sum()
    n = 500_000
    assert abs(ones - n / 2) < 4 * math.sqrt(n / 4)


def test_band_mapping():
    assert ng.map_band_range((81, 120), 224) == (81, 120)
    assert ng.map_band_range((81, 120), 32) == (12, 17)
    assert ng.map_band_range((161, 190), 32) == (23, 27)
    lo, hi = ng.map_band_range((1, 1), 3)
    assert 1 <= lo <= hi <= 3


def test_case_one_moments():
    noisy = ng.make_case(np.zeros((500, 200, 10)), NoiseSpec(1, seed=17))
    assert abs(noisy.var() - 0.1) < 0.001


def test_case_two_differs_only_in_deadline_bands():
    clean = np.random.default_rng(18).uniform(size=(10, 16, 32))
    c1 = ng.make_case(clean, NoiseSpec(1, seed=19))
    c2, report = ng.simulate(clean, NoiseSpec(2, seed=19))
    lo, hi = report["deadline_bands"]
    diff = np.any(c1 != c2, axis=(0, 1))
    assert not diff[: lo - 1].any() and not diff[hi:].any()
    assert diff[lo - 1:hi].any()


def test_case_three_variance_and_four_composition():
    clean = np.zeros((40, 40, 32))
    c3, rep3 = ng.simulate(clean, NoiseSpec(3, seed=20))
    assert rep3["gaussian_variance"] == 0.14
    lo, hi = rep3["stripe_bands"]
    outside = np.delete(c3, np.arange(lo - 1, hi), axis=2)
    assert abs(outside.var() - 0.14) < 0.01
    c2 = ng.make_case(clean, NoiseSpec(2, seed=20))
    c4 = ng.make_case(clean, NoiseSpec(4, seed=20))
    diff = np.any(c2 != c4, axis=(0, 1))
    assert np.flatnonzero(diff).min() >= lo - 1 and np.flatnonzero(diff).max() <= hi - 1


@pytest.mark.parametrize("case", [5, 6])
def test_impulse_cases(case):
    clean = np.full((20, 20, 8), 0.5)
    noisy, rep = ng.simulate(clean, NoiseSpec(case, seed=21))
    lo, hi = (15, 25) if case == 5 else (45, 55)
    assert all(lo <= s <= hi for s in rep["snr_db"])
    assert all(0.0196 <= d <= 0.0784 for d in rep["impulse_density"])
    for b in range(8):
        extreme = np.isin(noisy[:, :, b], (0.0, 1.0)).sum()
        assert extreme >= 80


def test_determinism_all_cases():
    clean = np.random.default_rng(22).uniform(size=(8, 9, 16))
    for case in range(1, 7):
        a = ng.make_case(clean, NoiseSpec(case, seed=23))
        b = ng.make_case(clean, NoiseSpec(case, seed=23))
        np.testing.assert_array_equal(a, b)


def test_clip_flag():
    noisy = ng.make_case(np.full((10, 10, 2), 0.5), NoiseSpec(1, seed=24, clip=True))
    assert noisy.min() >= 0 and noisy.max() <= 1


def test_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(7)
    with pytest.raises(ValueError):
        NoiseSpec(1, salt_pepper_density=1.5)
    with pytest.raises(ValueError):
        NoiseSpec(1, stripe_count=(5, 2))

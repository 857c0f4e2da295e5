import math
import warnings

import numpy as np
import pytest

from hsidenoise import metrics as mt


def test_psnr_examples():
    a = np.random.default_rng(0).uniform(size=(8, 8))
    assert mt.psnr_band(a, a) == mt.PERFECT_PSNR
    assert mt.psnr_band(a, a + 0.1) == pytest.approx(20.0)
    e = np.full_like(a, 0.1)
    assert mt.psnr_band(a, a + e) - mt.psnr_band(a, a + math.sqrt(2) * e) == pytest.approx(3.0103, abs=1e-4)


def test_ssim_identical_and_contrast_flip():
    a = np.random.default_rng(1).uniform(size=(20, 20))
    assert mt.ssim_band(a, a) == 1.0
    assert mt.ssim_band(a, 2 * a.mean() - a) < 0


@pytest.mark.parametrize("c,d", [(0.2, 0.1), (0.5, -0.3), (0.0, 0.7)])
def test_ssim_constant_closed_form(c, d):
    C1 = 0.01 ** 2
    expected = (2 * c * (c + d) + C1) / (c ** 2 + (c + d) ** 2 + C1)
    assert mt.ssim_band(np.full((16, 16), c), np.full((16, 16), c + d)) == pytest.approx(expected, abs=1e-12)


def test_ssim_small_band_truncates_window():
    rng = np.random.default_rng(2)
    a = rng.uniform(size=(5, 7))
    b = a + 0.05 * rng.normal(size=a.shape)
    v = mt.ssim_band(a, b)
    assert -1 <= v < 1
    assert mt.ssim_map(a, b).shape == (1, 1)


def test_ssim_matches_skimage():
    skm = pytest.importorskip("skimage.metrics")
    rng = np.random.default_rng(3)
    a = rng.uniform(size=(40, 33))
    b = np.clip(a + 0.1 * rng.normal(size=a.shape), 0, 1)
    ref = skm.structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                                    use_sample_covariance=False, data_range=1.0)
    assert mt.ssim_band(a, b) == pytest.approx(ref, abs=1e-10)


def test_ergas_examples():
    rng = np.random.default_rng(4)
    ref = rng.uniform(0.1, 1, size=(6, 6, 3))
    assert mt.ergas(ref, ref) == 0.0
    one = np.full((4, 4, 1), 0.5)
    test = one + np.where(np.indices((4, 4, 1)).sum(axis=0) % 2 == 0, 0.5, -0.5)
    assert mt.ergas(one, test) == pytest.approx(100.0)


def test_ergas_monotone_and_scale_invariant():
    rng = np.random.default_rng(5)
    ref = rng.uniform(0.1, 1, size=(10, 10, 4))
    noise = rng.normal(size=ref.shape)
    values = [mt.ergas(ref, ref + s * noise) for s in (0.01, 0.05, 0.2)]
    assert values[0] < values[1] < values[2]
    test = ref + 0.05 * noise
    assert mt.ergas(3.7 * ref, 3.7 * test) == pytest.approx(mt.ergas(ref, test))


def test_ergas_skips_zero_mean_band():
    ref = np.ones((3, 3, 2))
    ref[:, :, 1] = 0
    with pytest.warns(RuntimeWarning, match="1 zero-mean"):
        v = mt.ergas(ref, ref + 0.1)
    assert v == pytest.approx(10.0)


def test_spectral_signature():
    np.testing.assert_array_equal(mt.spectral_signature(np.full((3, 3, 4), 2.0), 1, 1), 2.0)
    delta = np.zeros((3, 3, 4))
    delta[1, 2, 3] = 1
    np.testing.assert_array_equal(mt.spectral_signature(delta, 1, 2), [0, 0, 0, 1])
    np.testing.assert_array_equal(mt.spectral_signature(delta, 0, 0), 0)
    cube = np.random.default_rng(6).normal(size=(4, 5, 6))
    np.testing.assert_array_equal(mt.spectral_signature(cube, 3, 4), cube[3, 4])
    with pytest.raises(IndexError):
        mt.spectral_signature(cube, 4, 0)


def test_evaluate_report():
    rng = np.random.default_rng(7)
    ref = rng.uniform(0.1, 1, size=(16, 16, 3))
    rep = mt.evaluate(ref, ref + 0.1)
    assert len(rep.per_band_psnr) == len(rep.per_band_ssim) == 3
    assert rep.mpsnr == pytest.approx(20.0)
    assert rep.mpsnr == pytest.approx(np.mean(rep.per_band_psnr))
    assert rep.mssim == pytest.approx(np.mean(rep.per_band_ssim))
    table = rep.table()
    assert table.splitlines()[0] == "band\tpsnr_db\tssim"
    assert "MPSNR\t20.000000" in table
    perfect = mt.evaluate(ref, ref)
    assert perfect.mpsnr == math.inf and perfect.mssim == 1.0 and perfect.ergas == 0.0


def test_evaluate_quiet():
    ref = np.zeros((4, 4, 1))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mt.evaluate(ref, ref + 0.1, quiet=True)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        mt.evaluate(np.zeros((2, 2, 2)), np.zeros((2, 2, 3)))

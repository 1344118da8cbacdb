import numpy as np
import pytest

from core.errors import ShapeMismatchError
from core.models import DegradationConfig
from degradation.degrade import (
    add_awgn,
    blur_down,
    blur_down_adjoint,
    convolve2d,
    convolve2d_adjoint,
    degrade,
    downsample_s,
)
from degradation.degrade_facade import Degrader
from degradation.kernels import dirac, gaussian_isotropic


def brute_force_degrade(x, k, s):
    """복제 경계 진짜 컨볼루션 후 왼쪽 위 다운샘플을 네 겹 루프로 직접 계산합니다."""
    c, h, w = x.shape
    side = k.shape[0]
    p = side // 2
    out = np.zeros((c, h // s, w // s))
    for ch in range(c):
        for i in range(h // s):
            for j in range(w // s):
                acc = 0.0
                for a in range(side):
                    for b in range(side):
                        r = min(max(s * i - a + p, 0), h - 1)
                        q = min(max(s * j - b + p, 0), w - 1)
                        acc += k[a, b] * x[ch, r, q]
                out[ch, i, j] = acc
    return out


def random_kernel(rng, side):
    k = rng.random((side, side))
    return k / k.sum()


def test_degrade_matches_brute_force_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        s = int(rng.choice([1, 2, 3, 4]))
        side = int(rng.choice([5, 11, 21]))
        lo, hi = -(-8 // s), 16 // s
        h, w = s * int(rng.integers(lo, hi + 1)), s * int(rng.integers(lo, hi + 1))
        x = rng.random((int(rng.choice([1, 3])), h, w))
        k = random_kernel(rng, side)
        got = degrade(x, k, DegradationConfig(scale=s))
        np.testing.assert_allclose(got, brute_force_degrade(x, k, s), rtol=0, atol=1e-12)


def test_dirac_is_identity_at_scale_one(rng):
    x = rng.random((3, 13, 9))
    np.testing.assert_array_equal(degrade(x, dirac(5), DegradationConfig(scale=1)), x)


@pytest.mark.parametrize("s", [2, 3, 4])
def test_dirac_is_stride_subsample(rng, s):
    x = rng.random((1, 12, 24))
    np.testing.assert_array_equal(degrade(x, dirac(11), DegradationConfig(scale=s)), x[:, ::s, ::s])


def test_degrade_is_linear_in_image(rng):
    k = gaussian_isotropic(1.7)
    x1, x2 = rng.random((2, 1, 16, 16))
    lhs = blur_down(0.3 * x1 - 2.0 * x2, k, 2)
    rhs = 0.3 * blur_down(x1, k, 2) - 2.0 * blur_down(x2, k, 2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_degrade_output_dims(rng):
    y = degrade(rng.random((3, 24, 36)), gaussian_isotropic(2.0), DegradationConfig(scale=4))
    assert y.shape == (3, 6, 9)


def test_downsample_requires_divisible_dims():
    with pytest.raises(ShapeMismatchError, match="modcrop"):
        downsample_s(np.zeros((1, 10, 12)), 4)


def test_awgn_moments():
    noisy = add_awgn(np.zeros((1, 256, 256)), 10.0, seed=3)
    assert abs(noisy.mean()) < 3e-3
    assert noisy.std() == pytest.approx(10.0 / 255.0, rel=0.02)


def test_awgn_reproducible_and_zero_sigma_is_copy(rng):
    x = rng.random((1, 8, 8))
    np.testing.assert_array_equal(add_awgn(x, 5.0, seed=11), add_awgn(x, 5.0, seed=11))
    clean = add_awgn(x, 0.0, seed=11)
    np.testing.assert_array_equal(clean, x)
    assert clean is not x


def test_noise_level_as_variance():
    assert DegradationConfig(noise_sigma=100.0, noise_is_variance=True).sigma255 == pytest.approx(10.0)
    assert DegradationConfig(noise_sigma=100.0).sigma255 == 100.0


@pytest.mark.parametrize("side", [3, 5, 11])
def test_convolution_adjoint_inner_product(rng, side):
    k = random_kernel(rng, side)
    u = rng.standard_normal((1, 9, 14))
    v = rng.standard_normal((1, 9, 14))
    lhs = np.sum(convolve2d(u, k) * v)
    rhs = np.sum(u * convolve2d_adjoint(v, k))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_blur_down_adjoint_inner_product(rng):
    k = gaussian_isotropic(1.2, 11)
    u = rng.standard_normal((2, 12, 12))
    v = rng.standard_normal((2, 4, 4))
    lhs = np.sum(blur_down(u, k, 3) * v)
    rhs = np.sum(u * blur_down_adjoint(v, k, 3))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_degrader_modcrops_and_leaves_input_untouched(rng):
    hr = rng.random((1, 26, 27))
    before = hr.copy()
    pair = Degrader({"scale": 4}).synthesize(hr, gaussian_isotropic(2.5))
    assert pair["hr"].shape == (1, 24, 24)
    assert pair["lr"].shape == (1, 6, 6)
    np.testing.assert_array_equal(hr, before)

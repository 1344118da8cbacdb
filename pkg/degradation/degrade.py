from typing import Optional

import numpy as np
from scipy import ndimage

from core.errors import ShapeMismatchError
from core.image import ensure_image
from core.models import DegradationConfig
from degradation.kernels import RngLike, check_kernel, make_rng


def _replicate_index(n: int, pad: int) -> np.ndarray:
    return np.clip(np.arange(-pad, n + pad), 0, n - 1)


def convolve2d(img: np.ndarray, k: np.ndarray) -> np.ndarray:
    """
    각 채널을 커널 k로 (상관이 아닌) 진짜 컨볼루션합니다.
    경계는 (side-1)/2 픽셀 가장자리 복제 패딩이며 출력 크기는 입력과 같습니다.
    """
    arr = ensure_image(img)
    kernel = check_kernel(k)
    return ndimage.convolve(arr, kernel[None, :, :], mode="nearest")


def convolve2d_adjoint(img: np.ndarray, k: np.ndarray) -> np.ndarray:
    """
    convolve2d의 수반(adjoint) 연산자.

    복제 패딩 P 다음의 valid 컨볼루션 C_k를 전치하면 Pᵀ·(full 상관)이 됩니다.
    패딩 영역으로 흘러간 값은 가장자리 픽셀로 다시 모입니다.
    """
    arr = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(k, dtype=np.float64)
    c, h, w = arr.shape
    p = kernel.shape[0] // 2

    canvas = np.pad(arr, ((0, 0), (2 * p, 2 * p), (2 * p, 2 * p)))
    corr = ndimage.correlate(canvas, kernel[None, :, :], mode="constant")
    full = corr[:, p : p + h + 2 * p, p : p + w + 2 * p]

    rows = np.zeros((c, h, w + 2 * p))
    np.add.at(rows, (slice(None), _replicate_index(h, p)), full)
    out = np.zeros((c, h, w))
    np.add.at(out, (slice(None), slice(None), _replicate_index(w, p)), rows)
    return out


def downsample_s(img: np.ndarray, s: int) -> np.ndarray:
    """s×s 패치마다 왼쪽 위 픽셀만 남기는 s배 다운샘플러."""
    arr = ensure_image(img)
    if s < 1:
        raise ValueError(f"배율은 1 이상이어야 합니다: {s}")
    _, h, w = arr.shape
    if h % s or w % s:
        raise ShapeMismatchError(f"이미지 크기 {h}x{w}가 배율 {s}로 나누어지지 않습니다. 먼저 modcrop을 적용하세요.")
    return arr[:, ::s, ::s].copy()


def upsample_zeros(img: np.ndarray, s: int) -> np.ndarray:
    """downsample_s의 수반: 왼쪽 위 위치에 값을 두고 나머지는 0으로 채웁니다."""
    arr = np.asarray(img, dtype=np.float64)
    c, h, w = arr.shape
    out = np.zeros((c, h * s, w * s))
    out[:, ::s, ::s] = arr
    return out


def add_awgn(img: np.ndarray, sigma255: float, seed: RngLike = None) -> np.ndarray:
    """
    i.i.d. N(0, (sigma255/255)²) 가우시안 노이즈를 더합니다. 클램핑은 하지 않습니다.

    Args:
        img: 입력 이미지
        sigma255: 0-255 코드 단위의 표준편차
        seed: RNG 시드 또는 numpy Generator
    """
    arr = ensure_image(img)
    if sigma255 < 0:
        raise ValueError(f"노이즈 표준편차는 음수일 수 없습니다: {sigma255}")
    if sigma255 == 0:
        return arr.copy()
    rng = make_rng(seed)
    return arr + rng.normal(0.0, sigma255 / 255.0, size=arr.shape)


def degrade(x: np.ndarray, k: np.ndarray, cfg: Optional[DegradationConfig] = None) -> np.ndarray:
    """y = (x ⊗ k)↓s + n 순서 그대로 열화 이미지를 합성합니다."""
    cfg = cfg or DegradationConfig(scale=1)
    blurred = convolve2d(x, k)
    lr = downsample_s(blurred, cfg.scale)
    return add_awgn(lr, cfg.sigma255, cfg.seed)


def blur_down(x: np.ndarray, k: np.ndarray, s: int) -> np.ndarray:
    """노이즈 없는 선형 연산자 D_k = ↓s ∘ (⊗k)."""
    return downsample_s(convolve2d(x, k), s)


def blur_down_adjoint(y: np.ndarray, k: np.ndarray, s: int) -> np.ndarray:
    """D_kᵀ = (⊗k)ᵀ ∘ ↑s."""
    return convolve2d_adjoint(upsample_zeros(y, s), k)


def l1_residual(x: np.ndarray, k: np.ndarray, y: np.ndarray, s: int) -> float:
    """L1 데이터 잔차 mean |D_k x − y|."""
    return float(np.mean(np.abs(blur_down(x, k, s) - y)))

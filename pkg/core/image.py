import math
from fractions import Fraction
from typing import Union

import numpy as np

from core.errors import ImageFormatError, ShapeMismatchError

# BT.601 (full range RGB -> limited range Y) 계수
Y_COEFFS = np.array([65.481, 128.553, 24.966])
Y_OFFSET = 16.0

BICUBIC_A = -0.5

Scale = Union[int, float, Fraction]


def ensure_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """
    입력 배열이 (C, H, W) 형태의 유효한 이미지인지 확인하고 float64 배열로 반환합니다.
    2차원 배열은 단일 채널 이미지로 간주합니다.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3:
        raise ImageFormatError(f"{name}: (C, H, W) 형태여야 합니다. 현재 shape={arr.shape}")
    c, h, w = arr.shape
    if c not in (1, 3):
        raise ImageFormatError(f"{name}: 채널 수는 1 또는 3이어야 합니다. 현재 {c}")
    if h < 1 or w < 1:
        raise ImageFormatError(f"{name}: 높이와 너비는 1 이상이어야 합니다. 현재 {h}x{w}")
    return arr


def same_dims(a: np.ndarray, b: np.ndarray, what: str = "images"):
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{what}의 크기가 다릅니다: {a.shape} vs {b.shape}")


def rgb_to_y(img: np.ndarray) -> np.ndarray:
    """
    RGB 이미지를 BT.601 limited-range Y 채널로 변환합니다.

    Args:
        img: [0, 1] 범위의 3채널 (3, H, W) 이미지

    Returns:
        (1, H, W) Y 채널 이미지. 흰색은 235/255, 검정은 16/255에 대응합니다.
    """
    arr = ensure_image(img)
    if arr.shape[0] != 3:
        raise ShapeMismatchError(f"rgb_to_y는 3채널 이미지가 필요합니다. 현재 {arr.shape[0]}채널")
    y = (Y_OFFSET + np.tensordot(Y_COEFFS, arr, axes=(0, 0))) / 255.0
    return y[None, :, :]


def to_y(img: np.ndarray) -> np.ndarray:
    """3채널이면 Y로 변환하고, 1채널이면 그대로 반환합니다."""
    arr = ensure_image(img)
    return rgb_to_y(arr) if arr.shape[0] == 3 else arr


def cubic_weight(x: np.ndarray, a: float = BICUBIC_A) -> np.ndarray:
    """Keys 큐빅 컨볼루션 커널."""
    ax = np.abs(x)
    ax2 = ax * ax
    ax3 = ax2 * ax
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _resize_matrix(in_len: int, out_len: int, scale: Fraction) -> np.ndarray:
    # 출력 픽셀 중심 u는 입력 좌표 (u + 0.5) / scale - 0.5에 대응합니다.
    centers = (np.arange(out_len) + 0.5) / float(scale) - 0.5
    base = np.floor(centers).astype(int)
    offsets = np.arange(-1, 3)
    taps = base[:, None] + offsets[None, :]
    weights = cubic_weight(centers[:, None] - taps)
    weights /= weights.sum(axis=1, keepdims=True)
    taps = np.clip(taps, 0, in_len - 1)

    matrix = np.zeros((out_len, in_len))
    rows = np.repeat(np.arange(out_len), offsets.size)
    np.add.at(matrix, (rows, taps.ravel()), weights.ravel())
    return matrix


def bicubic_resize(img: np.ndarray, scale: Scale) -> np.ndarray:
    """
    분리형 큐빅 컨볼루션(a=-0.5)으로 이미지를 리샘플링합니다.
    경계는 가장자리 픽셀을 복제(clamp-to-edge)합니다.

    Args:
        img: (C, H, W) 이미지
        scale: 양의 유리수 배율. 출력 크기는 round(dim * scale)

    Returns:
        리샘플링된 (C, round(H*s), round(W*s)) 이미지
    """
    arr = ensure_image(img)
    scale = Fraction(scale).limit_denominator(10**6)
    if scale <= 0:
        raise ValueError(f"배율은 0보다 커야 합니다: {scale}")
    _, h, w = arr.shape
    out_h = _round_half_up(h * scale)
    out_w = _round_half_up(w * scale)
    if out_h < 1 or out_w < 1:
        raise ShapeMismatchError(f"출력 크기가 0이 됩니다: {h}x{w} * {scale}")

    mat_h = _resize_matrix(h, out_h, scale)
    mat_w = _resize_matrix(w, out_w, scale)
    return np.einsum("oh,chw,pw->cop", mat_h, arr, mat_w)


def modcrop(img: np.ndarray, s: int) -> np.ndarray:
    """높이와 너비가 s의 배수가 되도록 아래/오른쪽을 잘라냅니다."""
    arr = ensure_image(img)
    if s < 1:
        raise ValueError(f"배율은 1 이상이어야 합니다: {s}")
    _, h, w = arr.shape
    if h < s or w < s:
        raise ShapeMismatchError(f"이미지({h}x{w})가 배율 {s}보다 작습니다.")
    return arr[:, : h - h % s, : w - w % s].copy()

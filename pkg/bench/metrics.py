import numpy as np
from scipy import signal

from core.errors import BasisError, ShapeMismatchError
from core.image import ensure_image, same_dims, to_y
from degradation.kernels import gaussian_isotropic
from kernel_space.pca import PcaBasis, ReducedKernel, project

SSIM_SIGMA = 1.5
SSIM_WINDOW = 11
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2


def _y_pair(a: np.ndarray, b: np.ndarray):
    a = ensure_image(a, "a")
    b = ensure_image(b, "b")
    same_dims(a, b, "metric inputs")
    return to_y(a)[0], to_y(b)[0]


def psnr_y(a: np.ndarray, b: np.ndarray, border: int = 0) -> float:
    """
    Y 채널 PSNR (dB). 값 범위 [0,1] 기준 10·log10(1/MSE).
    두 이미지가 같으면 float('inf')를 반환합니다.
    """
    if border < 0:
        raise ValueError(f"border는 0 이상이어야 합니다: {border}")
    ya, yb = _y_pair(a, b)
    h, w = ya.shape
    if 2 * border >= h or 2 * border >= w:
        raise ShapeMismatchError(f"border={border}가 이미지 크기 {h}x{w}보다 큽니다.")
    if border:
        ya = ya[border:-border, border:-border]
        yb = yb[border:-border, border:-border]
    mse = float(np.mean((ya - yb) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def ssim_y(a: np.ndarray, b: np.ndarray, border: int = 0) -> float:
    """단일 스케일 SSIM. 11x11 가우시안 창(σ=1.5), 창이 완전히 들어가는 위치만 평균합니다."""
    ya, yb = _y_pair(a, b)
    if border:
        ya = ya[border:-border, border:-border]
        yb = yb[border:-border, border:-border]
    if min(ya.shape) < SSIM_WINDOW:
        raise ShapeMismatchError(f"SSIM에는 최소 {SSIM_WINDOW}x{SSIM_WINDOW} 크기가 필요합니다: {ya.shape}")

    window = gaussian_isotropic(SSIM_SIGMA, SSIM_WINDOW)
    filt = lambda x: signal.correlate(x, window, mode="valid", method="direct")

    mu_a, mu_b = filt(ya), filt(yb)
    var_a = filt(ya * ya) - mu_a ** 2
    var_b = filt(yb * yb) - mu_b ** 2
    cov = filt(ya * yb) - mu_a * mu_b

    ssim_map = ((2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)) / \
               ((mu_a ** 2 + mu_b ** 2 + SSIM_C1) * (var_a + var_b + SSIM_C2))
    return float(np.mean(ssim_map))


def kernel_l1_reduced(est: ReducedKernel, gt: np.ndarray, basis: PcaBasis) -> float:
    """축소 공간에서의 커널 오차: mean |est - project(gt)|"""
    gt = np.asarray(gt, dtype=np.float64)
    if gt.shape != (basis.side, basis.side):
        raise BasisError(f"정답 커널 크기 {gt.shape}가 기저 side={basis.side}와 맞지 않습니다.")
    coeffs = est.coeffs if isinstance(est, ReducedKernel) else np.asarray(est, dtype=np.float64)
    if coeffs.shape != (basis.m,):
        raise ShapeMismatchError(f"추정 계수 길이 {coeffs.shape[0]}가 기저 m={basis.m}과 다릅니다.")
    return float(np.mean(np.abs(coeffs - project(basis, gt).coeffs)))

from typing import Optional, Tuple

import numpy as np
from loguru import logger
from numpy.lib.stride_tricks import sliding_window_view
from scipy import linalg

from core.errors import BasisError, DegenerateSystemError, ShapeMismatchError
from core.image import ensure_image
from core.models import LsEstimatorConfig
from degradation.degrade import blur_down, l1_residual
from kernel_space.pca import PcaBasis, ReducedKernel, reconstruct
from .irls import backtrack, irls_weights
from .simplex import project_simplex

# 한 번에 설계 행렬로 펼칠 LR 행 수
ROW_BLOCK = 32


def _check_pair(lr: np.ndarray, sr: np.ndarray, side: int, scale: int) -> Tuple[np.ndarray, np.ndarray]:
    lr = ensure_image(lr, "lr")
    sr = ensure_image(sr, "sr")
    c, h, w = lr.shape
    if sr.shape != (c, h * scale, w * scale):
        raise ShapeMismatchError(f"SR 크기 {sr.shape}가 LR {lr.shape} x {scale}와 맞지 않습니다.")
    if lr.size < side * side:
        raise ShapeMismatchError(f"LR 픽셀 수({lr.size})가 커널 미지수 개수({side * side})보다 적습니다.")
    return lr, sr


def kernel_normal_equations(lr: np.ndarray, sr: np.ndarray, side: int, scale: int,
                            weights: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    커널에 대한 선형 시스템 A·vec(k) = vec(lr)의 정규 방정식 (AᵀA, Aᵀy)를 만듭니다.
    weights(LR과 같은 shape)가 주어지면 가중 정규 방정식 (AᵀWA, AᵀWy)를 만듭니다.

    A의 j번째 열은 단위 커널 e_j로 sr을 열화한 결과입니다. 열화 모델이 k에 대해 선형이므로
    LR 픽셀 (i, j)의 행은 복제 패딩된 sr에서 (s·i, s·j) 위치의 뒤집힌 패치가 됩니다.
    """
    lr, sr = _check_pair(lr, sr, side, scale)
    if np.ptp(sr) == 0:
        raise DegenerateSystemError("SR 이미지가 상수이므로 모든 커널 열이 같아 커널을 식별할 수 없습니다.")

    p = side // 2
    n = side * side
    padded = np.pad(sr, ((0, 0), (p, p), (p, p)), mode="edge")
    windows = sliding_window_view(padded, (side, side), axis=(1, 2))
    strided = windows[:, ::scale, ::scale, ::-1, ::-1]

    ata = np.zeros((n, n))
    aty = np.zeros(n)
    c, h, _ = lr.shape
    for ch in range(c):
        for start in range(0, h, ROW_BLOCK):
            block = strided[ch, start : start + ROW_BLOCK].reshape(-1, n)
            target = lr[ch, start : start + ROW_BLOCK].ravel()
            if weights is None:
                ata += block.T @ block
                aty += block.T @ target
            else:
                w = weights[ch, start : start + ROW_BLOCK].ravel()
                ata += block.T @ (block * w[:, None])
                aty += block.T @ (w * target)
    return ata, aty


def _check_rank(matrix: np.ndarray, ridge: float, what: str):
    rank = np.linalg.matrix_rank(matrix, hermitian=True)
    if rank <= 1 < matrix.shape[0] or (rank < matrix.shape[0] and ridge == 0):
        raise DegenerateSystemError(
            f"{what} 시스템의 랭크({rank})가 미지수 개수({matrix.shape[0]})보다 작아 풀 수 없습니다."
        )


def estimate_kernel_ls(lr: np.ndarray, sr: np.ndarray, side: int, cfg: Optional[LsEstimatorConfig] = None,
                       scale: int = 1) -> np.ndarray:
    """
    전체 커널 탭에 대한 ridge 최소제곱으로 블러 커널을 추정합니다.

    Args:
        lr: 관측된 LR 이미지
        sr: 현재 복원된 SR 이미지 (LR x scale 크기)
        side: 커널 크기 (홀수)
        cfg: ridge 가중치와 단체 투영 여부
        scale: 배율 s

    Returns:
        (side, side) 커널. simplex_project가 켜져 있으면 비음수이고 합이 1입니다.
    """
    cfg = cfg or LsEstimatorConfig()
    ata, aty = kernel_normal_equations(lr, sr, side, scale)
    _check_rank(ata, cfg.ridge, "커널")
    k = linalg.solve(ata + cfg.ridge * np.eye(ata.shape[0]), aty, assume_a="sym")
    if cfg.simplex_project:
        k = project_simplex(k)
    return k.reshape(side, side)


def estimate_kernel_reduced(lr: np.ndarray, sr: np.ndarray, basis: PcaBasis,
                            cfg: Optional[LsEstimatorConfig] = None, scale: int = 1,
                            weights: Optional[np.ndarray] = None,
                            center: Optional[np.ndarray] = None) -> ReducedKernel:
    """
    미지수를 PCA 계수로 제한한 m차원 최소제곱 문제를 풉니다.
    k = mean + componentsᵀ·c 를 대입하면 (C·AᵀA·Cᵀ + ridge·I)·c = C·(Aᵀy − AᵀA·mean) + ridge·c₀ 이 됩니다.

    Args:
        weights: LR 픽셀별 최소제곱 가중치 (없으면 1)
        center: ridge 항이 당기는 계수 c₀ (없으면 0)
    """
    cfg = cfg or LsEstimatorConfig()
    ata, aty = kernel_normal_equations(lr, sr, basis.side, scale, weights)
    comp = basis.components
    reduced = comp @ ata @ comp.T
    _check_rank(reduced, cfg.ridge, "축소 커널")
    rhs = comp @ (aty - ata @ basis.mean)
    if center is not None:
        rhs = rhs + cfg.ridge * np.asarray(center, dtype=np.float64)
    coeffs = linalg.solve(reduced + cfg.ridge * np.eye(basis.m), rhs, assume_a="sym")
    logger.debug(f"축소 커널 추정: |c|={np.linalg.norm(coeffs):.4e}")
    return ReducedKernel(coeffs)


def refine_kernel_l1(lr: np.ndarray, sr: np.ndarray, basis: PcaBasis, init: ReducedKernel,
                     cfg: Optional[LsEstimatorConfig] = None, scale: int = 1) -> ReducedKernel:
    """
    이전 축소 커널 c₀에서 출발해 L1 데이터 잔차 mean |D_k sr − lr|를 줄이는 한 번의 하강 단계를 수행합니다.
    c₀의 잔차로 만든 IRLS 가중 최소제곱 해를 방향으로 삼고, 재구성 커널의 L1 잔차가
    c₀보다 크지 않은 가장 큰 보폭을 고릅니다.
    """
    cfg = cfg or LsEstimatorConfig()
    lr = ensure_image(lr, "lr")
    sr = ensure_image(sr, "sr")
    start = np.array(init.coeffs, dtype=np.float64)
    weights = irls_weights(blur_down(sr, reconstruct(basis, start), scale) - lr)
    target = estimate_kernel_reduced(lr, sr, basis, cfg, scale, weights=weights, center=start)

    def loss(coeffs: np.ndarray) -> float:
        try:
            return l1_residual(sr, reconstruct(basis, coeffs), lr, scale)
        except BasisError:
            return float("inf")

    coeffs, step = backtrack(start, target.coeffs - start, loss)
    logger.debug(f"L1 커널 하강: step={step}")
    return ReducedKernel(coeffs)

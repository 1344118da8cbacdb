from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.sparse.linalg import LinearOperator, cg

from core.errors import ShapeMismatchError
from core.image import bicubic_resize, ensure_image
from core.models import CgRestorerConfig
from degradation.degrade import blur_down, blur_down_adjoint, l1_residual
from degradation.kernels import check_kernel
from .irls import backtrack, irls_weights


def grad(x: np.ndarray) -> np.ndarray:
    """복제 경계의 전진 차분 ∇x. 결과 shape은 (2, H, W)이며 마지막 행/열의 차분은 0입니다."""
    gy = np.zeros_like(x)
    gx = np.zeros_like(x)
    gy[:-1, :] = x[1:, :] - x[:-1, :]
    gx[:, :-1] = x[:, 1:] - x[:, :-1]
    return np.stack([gy, gx])


def grad_adjoint(g: np.ndarray) -> np.ndarray:
    """∇ᵀ (음의 발산)."""
    gy, gx = g
    out = np.zeros_like(gy)
    out[1:, :] += gy[:-1, :]
    out[:-1, :] -= gy[:-1, :]
    out[:, 1:] += gx[:, :-1]
    out[:, :-1] -= gx[:, :-1]
    return out


def objective(x: np.ndarray, y: np.ndarray, k: np.ndarray, lam: float, scale: int) -> float:
    """‖y − D_k x‖₂² + λ‖∇x‖₂² (채널 합)."""
    x = ensure_image(x)
    data = blur_down(x, k, scale) - y
    prior = sum(float(np.sum(grad(x[c]) ** 2)) for c in range(x.shape[0]))
    return float(np.sum(data ** 2)) + lam * prior


@dataclass
class CgResult:
    """CG 복원 결과와 수렴 정보"""
    image: np.ndarray
    converged: bool
    iterations: List[int] = field(default_factory=list)
    objective_history: List[float] = field(default_factory=list)
    step: float = 1.0


def _normal_operator(kernel: np.ndarray, lam: float, scale: int, hr_shape: Tuple[int, int],
                     weights: Optional[np.ndarray] = None) -> LinearOperator:
    """D_kᵀ W D_k + λ∇ᵀ∇ (W가 없으면 단위 가중치)를 행렬 없이 적용하는 연산자."""
    n = hr_shape[0] * hr_shape[1]

    def matvec(v: np.ndarray) -> np.ndarray:
        img = v.reshape(1, *hr_shape)
        low = blur_down(img, kernel, scale)
        if weights is not None:
            low = weights * low
        out = blur_down_adjoint(low, kernel, scale)[0]
        if lam:
            out = out + lam * grad_adjoint(grad(img[0]))
        return out.ravel()

    return LinearOperator((n, n), matvec=matvec, dtype=np.float64)


def restore_cg_detailed(lr: np.ndarray, k: np.ndarray, cfg: Optional[CgRestorerConfig] = None,
                        scale: int = 1, track_objective: bool = False) -> CgResult:
    """
    정규 방정식 (D_kᵀD_k + λ∇ᵀ∇)x = D_kᵀy 를 채널별로 행렬 없이 CG로 풉니다.
    초기값은 bicubic_resize(lr, s)입니다.

    Args:
        track_objective: True이면 매 CG 반복마다 목적 함수 값을 기록합니다 (테스트/진단용).
    """
    cfg = cfg or CgRestorerConfig()
    lr = ensure_image(lr, "lr")
    kernel = check_kernel(k)
    c, h, w = lr.shape
    hr_shape = (h * scale, w * scale)

    x0 = bicubic_resize(lr, scale)
    restored = np.empty_like(x0)
    iterations: List[int] = []
    history: List[float] = []
    converged = True
    op = _normal_operator(kernel, cfg.lam, scale, hr_shape)

    for ch in range(c):
        y = lr[ch : ch + 1]
        rhs = blur_down_adjoint(y, kernel, scale).ravel()
        count = [0]

        def _callback(xk: np.ndarray):
            count[0] += 1
            if track_objective:
                history.append(objective(xk.reshape(1, *hr_shape), y, kernel, cfg.lam, scale))

        if track_objective:
            history.append(objective(x0[ch : ch + 1], y, kernel, cfg.lam, scale))
        solution, info = cg(op, rhs, x0=x0[ch].ravel(), rtol=cfg.tol, atol=0.0,
                            maxiter=cfg.max_iters, callback=_callback)
        if info > 0:
            converged = False
            logger.warning(f"CG가 {cfg.max_iters}회 안에 수렴하지 않았습니다 (채널 {ch}). 마지막 반복값을 사용합니다.")
        elif info < 0:
            raise ValueError(f"CG 입력이 잘못되었습니다 (info={info}).")
        restored[ch] = solution.reshape(hr_shape)
        iterations.append(count[0])

    return CgResult(image=restored, converged=converged, iterations=iterations, objective_history=history)


def restore_cg(lr: np.ndarray, k: np.ndarray, cfg: Optional[CgRestorerConfig] = None, scale: int = 1) -> np.ndarray:
    """Tikhonov-on-gradient 정칙화 최소제곱 복원 결과 이미지만 반환합니다."""
    return restore_cg_detailed(lr, k, cfg, scale).image


def refine_restore_l1(lr: np.ndarray, k: np.ndarray, init: np.ndarray, cfg: Optional[CgRestorerConfig] = None,
                      scale: int = 1) -> CgResult:
    """
    이전 복원 x₀에서 출발해 L1 데이터 잔차 mean |D_k x − y|를 줄이는 한 번의 하강 단계를 수행합니다.

    x₀의 잔차로 IRLS 가중치 W를 만든 뒤 갱신량 δ에 대해
    min_δ ‖W^½(D_k(x₀ + δ) − y)‖² + λ‖∇δ‖² 를 δ = 0에서 시작하는 CG로 풀고,
    x₀ + t·δ 에서 L1 잔차가 x₀보다 크지 않은 가장 큰 t(1, 1/2, ...)를 고릅니다.

    Returns:
        image는 L1 잔차가 x₀ 이하인 복원, step은 선택된 t입니다.
    """
    cfg = cfg or CgRestorerConfig()
    lr = ensure_image(lr, "lr")
    start = ensure_image(init, "init")
    kernel = check_kernel(k)
    c, h, w = lr.shape
    hr_shape = (h * scale, w * scale)
    if start.shape != (c, *hr_shape):
        raise ShapeMismatchError(f"초기 복원 크기 {start.shape}가 LR {lr.shape} x {scale}와 맞지 않습니다.")

    residual = blur_down(start, kernel, scale) - lr
    weights = irls_weights(residual)
    direction = np.empty_like(start)
    iterations: List[int] = []
    converged = True

    for ch in range(c):
        w_ch = weights[ch : ch + 1]
        op = _normal_operator(kernel, cfg.lam, scale, hr_shape, w_ch)
        rhs = -blur_down_adjoint(w_ch * residual[ch : ch + 1], kernel, scale).ravel()
        count = [0]

        def _callback(_xk: np.ndarray):
            count[0] += 1

        solution, info = cg(op, rhs, x0=np.zeros(op.shape[0]), rtol=cfg.tol, atol=0.0,
                            maxiter=cfg.max_iters, callback=_callback)
        if info < 0:
            raise ValueError(f"CG 입력이 잘못되었습니다 (info={info}).")
        converged = converged and info == 0
        direction[ch] = solution.reshape(hr_shape)
        iterations.append(count[0])

    image, step = backtrack(start, direction, lambda x: l1_residual(x, kernel, lr, scale))
    logger.debug(f"L1 복원 하강: step={step}, CG 반복={iterations}")
    return CgResult(image=image, converged=converged, iterations=iterations, step=step)


def adjoint_check(k: np.ndarray, scale: int, dims, trials: int = 20, seed: int = 0,
                  forward=blur_down, adjoint=blur_down_adjoint) -> float:
    """
    무작위 u, v에 대해 |⟨D_k u, v⟩ − ⟨u, D_kᵀ v⟩| / (‖u‖‖v‖)의 최댓값을 반환합니다.

    Args:
        dims: HR 이미지 크기 (H, W) 또는 (C, H, W). H, W는 scale의 배수여야 합니다.
        forward, adjoint: 검사할 연산자 쌍 (기본값은 열화 연산자와 그 수반)
    """
    dims = tuple(dims)
    if len(dims) == 2:
        dims = (1,) + dims
    rng = np.random.default_rng(seed)
    lr_dims = (dims[0], dims[1] // scale, dims[2] // scale)
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(dims)
        v = rng.standard_normal(lr_dims)
        lhs = float(np.sum(forward(u, k, scale) * v))
        rhs = float(np.sum(u * adjoint(v, k, scale)))
        worst = max(worst, abs(lhs - rhs) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return worst

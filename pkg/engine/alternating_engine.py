import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Protocol, Union

import numpy as np
from loguru import logger

from core.errors import AlternationError, ShapeMismatchError
from core.image import bicubic_resize, ensure_image
from degradation.degrade import l1_residual
from degradation.kernels import dirac
from kernel_space.pca import PcaBasis, ReducedKernel, project, reconstruct

DEFAULT_ITERATIONS = 4


class EstimatorContract(Protocol):
    """커널 부분 문제: (lr, sr, basis, s) -> ReducedKernel. 재진입 가능하고 부작용이 없어야 합니다."""

    def __call__(self, lr: np.ndarray, sr: np.ndarray, basis: PcaBasis, scale: int) -> ReducedKernel: ...


class RestorerContract(Protocol):
    """이미지 부분 문제: (lr, r, basis, s) -> Image (LR x s 크기)."""

    def __call__(self, lr: np.ndarray, r: ReducedKernel, basis: PcaBasis, scale: int) -> np.ndarray: ...


@dataclass
class IterationRecord:
    kernel: ReducedKernel
    image: np.ndarray
    residual: float


@dataclass
class AlternationTrace:
    """반복마다 (축소 커널, 복원 이미지, L1 데이터 잔차)를 기록합니다."""
    records: List[IterationRecord] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_image(self) -> np.ndarray:
        return self.records[-1].image

    @property
    def final_kernel(self) -> ReducedKernel:
        return self.records[-1].kernel

    @property
    def residuals(self) -> List[float]:
        return [rec.residual for rec in self.records]

    def prefix(self, n: int) -> "AlternationTrace":
        return AlternationTrace(self.records[:n])

    def write_csv(self, path: Union[str, Path]):
        """열: iter, residual_l1, kernel_coeffs..."""
        m = self.records[0].kernel.m if self.records else 0
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["iter", "residual_l1"] + [f"c{j}" for j in range(m)])
            for i, rec in enumerate(self.records, start=1):
                writer.writerow([i, repr(rec.residual)] + [repr(float(c)) for c in rec.kernel.coeffs])


def data_residual(x: np.ndarray, k: np.ndarray, y: np.ndarray, scale: int) -> float:
    """재구성 항: mean |(x ⊗ k)↓s − y| (노이즈 없는 열화와 관측 LR의 평균 절대 오차)."""
    x = ensure_image(x, "x")
    y = ensure_image(y, "y")
    c, h, w = y.shape
    if x.shape != (c, h * scale, w * scale):
        raise ShapeMismatchError(f"x 크기 {x.shape}가 y {y.shape} x {scale}와 맞지 않습니다.")
    return l1_residual(x, k, y, scale)


def _call(stage: str, iteration: int, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as e:
        logger.error(f"{iteration}번째 반복 {stage} 실패: {e}")
        raise AlternationError(iteration, stage, e) from e


def _warm(solver, state) -> Dict[str, Any]:
    if state is None or not getattr(solver, "warm_start", False):
        return {}
    return {"init": state}


def run_alternation(
    lr: np.ndarray,
    basis: PcaBasis,
    est: EstimatorContract,
    res: RestorerContract,
    scale: int,
    iterations: int = DEFAULT_ITERATIONS,
    estimator_first: bool = False,
) -> AlternationTrace:
    """
    Dirac 커널로 초기화한 뒤 Restorer와 Estimator를 번갈아 실행합니다.

    warm_start 속성이 True인 구현에는 직전 상태(Estimator는 현재 축소 커널, Restorer는 직전 복원)를
    init 키워드로 넘깁니다. 고전 솔버는 이 점에서 L1 잔차를 키우지 않는 하강 단계를 밟으므로
    기록되는 잔차가 반복마다 증가하지 않습니다.

    Args:
        lr: 관측 LR 이미지 (변경되지 않습니다)
        basis: 커널 PCA 기저
        est, res: Estimator/Restorer 계약을 만족하는 호출 가능 객체
        scale: 배율 s
        iterations: 반복 횟수 T (≥ 1)
        estimator_first: True이면 bicubic 초기 SR에서 Estimator를 먼저 실행합니다.

    Returns:
        길이 T의 AlternationTrace
    """
    if iterations < 1:
        raise ValueError(f"반복 횟수는 1 이상이어야 합니다: {iterations}")
    lr = ensure_image(lr, "lr").copy()
    if min(lr.shape[1:]) < basis.side:
        raise ShapeMismatchError(f"LR 크기 {lr.shape[1:]}가 커널 크기 {basis.side}보다 작습니다.")
    lr.flags.writeable = False

    kernel = project(basis, dirac(basis.side))
    image = bicubic_resize(lr, scale) if estimator_first else None
    restored = None
    trace = AlternationTrace()

    for i in range(1, iterations + 1):
        if estimator_first:
            kernel = _call("Estimator", i, est, lr, image, basis, scale, **_warm(est, kernel))
            image = _call("Restorer", i, res, lr, kernel, basis, scale, **_warm(res, restored))
        else:
            image = _call("Restorer", i, res, lr, kernel, basis, scale, **_warm(res, restored))
            kernel = _call("Estimator", i, est, lr, image, basis, scale, **_warm(est, kernel))
        restored = image

        residual = _call("Residual", i, lambda: data_residual(image, reconstruct(basis, kernel), lr, scale))
        trace.records.append(IterationRecord(
            kernel=ReducedKernel(np.array(kernel.coeffs, dtype=np.float64)),
            image=np.array(image, dtype=np.float64),
            residual=residual,
        ))
        logger.debug(f"반복 {i}/{iterations}: L1 잔차={residual:.6e}")

    return trace

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from core.image import bicubic_resize, ensure_image
from core.models import CgRestorerConfig, LsEstimatorConfig
from kernel_space.pca import PcaBasis, ReducedKernel, project, reconstruct
from solvers.classical import ClassicalEstimator, ClassicalRestorer
from .alternating_engine import AlternationTrace, IterationRecord, data_residual, run_alternation

SOLVERS = ("classical", "neural", "identity-bicubic")
MODES = ("alternating", "two-step", "gt-kernel")


class MeanKernelEstimator:
    """SR과 무관하게 평균 커널(0 계수)을 반환하는 기준선 Estimator."""

    def __call__(self, lr: np.ndarray, sr: np.ndarray, basis: PcaBasis, scale: int) -> ReducedKernel:
        return ReducedKernel(np.zeros(basis.m))


class BicubicRestorer:
    """커널을 무시하고 bicubic 확대만 수행하는 기준선 Restorer."""

    def __call__(self, lr: np.ndarray, r: ReducedKernel, basis: PcaBasis, scale: int) -> np.ndarray:
        return bicubic_resize(lr, scale)


@dataclass
class SolveResult:
    image: np.ndarray
    reduced_kernel: ReducedKernel
    kernel: np.ndarray
    trace: AlternationTrace


class SolverFacade:
    """
    Estimator/Restorer 구현(고전/신경망/bicubic 기준선)을 선택하고
    교대 루프, 2단계 기준선, 정답 커널 모드를 하나의 인터페이스로 제공하는 퍼사드 클래스.
    """

    def __init__(self, solver: str, basis: PcaBasis, config: Optional[Dict[str, Any]] = None, model=None):
        """
        Args:
            solver: 'classical', 'neural', 'identity-bicubic' 중 하나
            basis: 커널 PCA 기저
            config: get_config()["classical"] 형태의 딕셔너리 (고전 솔버용)
            model: 'neural' 솔버에 사용할 학습된 DAN
        """
        if solver not in SOLVERS:
            raise ValueError(f"알 수 없는 솔버입니다: {solver!r} (가능: {', '.join(SOLVERS)})")
        self.solver = solver
        self.basis = basis
        config = config or {}

        if solver == "classical":
            ls_cfg = LsEstimatorConfig(ridge=config.get("ridge", 1e-6),
                                       simplex_project=config.get("simplex_project", True))
            cg_cfg = CgRestorerConfig(lam=config.get("lambda", 1e-4), max_iters=config.get("cg_iters", 200),
                                      tol=config.get("cg_tol", 1e-8))
            self.estimator = ClassicalEstimator(ls_cfg)
            self.restorer = ClassicalRestorer(cg_cfg)
        elif solver == "neural":
            if model is None:
                raise ValueError("'neural' 솔버에는 학습된 체크포인트(--ckpt)가 필요합니다.")
            from neural.contracts import NeuralEstimator, NeuralRestorer
            if model.config.pca_dim != basis.m:
                raise ValueError(f"체크포인트의 pca_dim={model.config.pca_dim}이 기저 m={basis.m}과 다릅니다.")
            self.estimator = NeuralEstimator(model)
            self.restorer = NeuralRestorer(model)
        else:
            self.estimator = MeanKernelEstimator()
            self.restorer = BicubicRestorer()

        logger.info(f"SolverFacade 초기화 완료: solver={solver}, basis side={basis.side}, m={basis.m}")

    def _single(self, lr: np.ndarray, coeffs: ReducedKernel, image: np.ndarray, scale: int) -> AlternationTrace:
        residual = data_residual(image, reconstruct(self.basis, coeffs), lr, scale)
        return AlternationTrace([IterationRecord(coeffs, np.array(image, dtype=np.float64), residual)])

    def solve(self, lr: np.ndarray, scale: int, iterations: int = 4, mode: str = "alternating",
              estimator_first: bool = False, gt_kernel: Optional[np.ndarray] = None) -> SolveResult:
        """
        Args:
            lr: 관측 LR 이미지
            scale: 배율 s
            iterations: 교대 반복 횟수 T
            mode: 'alternating' | 'two-step' | 'gt-kernel'
            estimator_first: 교대 순서를 Estimator 먼저로 바꿉니다.
            gt_kernel: 'gt-kernel' 모드에서 Restorer에 한 번 전달할 정답 커널
        """
        lr = ensure_image(lr, "lr")
        if mode == "alternating":
            trace = run_alternation(lr, self.basis, self.estimator, self.restorer, scale, iterations,
                                    estimator_first=estimator_first)
        elif mode == "two-step":
            coeffs = self.estimator(lr, bicubic_resize(lr, scale), self.basis, scale)
            trace = self._single(lr, coeffs, self.restorer(lr, coeffs, self.basis, scale), scale)
        elif mode == "gt-kernel":
            if gt_kernel is None:
                raise ValueError("'gt-kernel' 모드에는 정답 커널이 필요합니다.")
            coeffs = project(self.basis, gt_kernel)
            trace = self._single(lr, coeffs, self.restorer(lr, coeffs, self.basis, scale), scale)
        else:
            raise ValueError(f"알 수 없는 모드입니다: {mode!r} (가능: {', '.join(MODES)})")

        return SolveResult(
            image=trace.final_image,
            reduced_kernel=trace.final_kernel,
            kernel=reconstruct(self.basis, trace.final_kernel),
            trace=trace,
        )

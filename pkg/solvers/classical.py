from typing import Optional

import numpy as np
from loguru import logger

from core.models import CgRestorerConfig, LsEstimatorConfig
from kernel_space.pca import PcaBasis, ReducedKernel, reconstruct
from .cg_restorer import refine_restore_l1, restore_cg_detailed
from .ls_estimator import estimate_kernel_reduced, refine_kernel_l1


class ClassicalEstimator:
    """
    축소 공간 최소제곱 커널 추정기를 Estimator 계약 (lr, sr, basis, s) -> ReducedKernel로 감쌉니다.
    init(직전 축소 커널)이 주어지면 그 점에서 L1 데이터 잔차를 줄이는 하강 단계를 수행합니다.
    """
    warm_start = True

    def __init__(self, config: Optional[LsEstimatorConfig] = None):
        self.config = config or LsEstimatorConfig()

    def __call__(self, lr: np.ndarray, sr: np.ndarray, basis: PcaBasis, scale: int,
                 init: Optional[ReducedKernel] = None) -> ReducedKernel:
        if init is None:
            return estimate_kernel_reduced(lr, sr, basis, self.config, scale)
        return refine_kernel_l1(lr, sr, basis, init, self.config, scale)


class ClassicalRestorer:
    """
    CG 복원기를 Restorer 계약 (lr, r, basis, s) -> Image로 감쌉니다.
    init(직전 복원 이미지)이 없으면 정칙화 최소제곱 해를, 있으면 그 점에서의 L1 하강 단계를 반환합니다.
    """
    warm_start = True

    def __init__(self, config: Optional[CgRestorerConfig] = None):
        self.config = config or CgRestorerConfig()

    def __call__(self, lr: np.ndarray, r: ReducedKernel, basis: PcaBasis, scale: int,
                 init: Optional[np.ndarray] = None) -> np.ndarray:
        kernel = reconstruct(basis, r)
        if init is None:
            result = restore_cg_detailed(lr, kernel, self.config, scale)
        else:
            result = refine_restore_l1(lr, kernel, init, self.config, scale)
        if not result.converged:
            logger.warning(f"CG 복원이 수렴하지 않았습니다 (반복 {result.iterations}).")
        return result.image

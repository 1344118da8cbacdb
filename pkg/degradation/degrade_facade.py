from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from core.image import modcrop
from core.models import DegradationConfig
from .degrade import degrade
from .kernels import dirac, gaussian_anisotropic, gaussian_isotropic


class Degrader:
    """열화 모델(블러 → s배 다운샘플 → AWGN)을 설정 하나로 묶어 제공하는 퍼사드 클래스."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Args:
            config: get_config()["degradation"] 형태의 딕셔너리
        """
        self.config = DegradationConfig(**(config or {}))
        logger.info(
            f"Degrader 초기화 완료: scale={self.config.scale}, "
            f"noise={self.config.noise_sigma} ({'분산' if self.config.noise_is_variance else '표준편차'})"
        )

    def synthesize(self, hr: np.ndarray, kernel: np.ndarray, seed: Optional[int] = None) -> Dict[str, np.ndarray]:
        """
        HR 이미지를 배율에 맞게 자른 뒤 LR 이미지를 합성합니다.

        Returns:
            {"hr": modcrop된 HR, "lr": 열화된 LR}
        """
        cfg = self.config if seed is None else self.config.model_copy(update={"seed": seed})
        hr = modcrop(hr, cfg.scale)
        lr = degrade(hr, kernel, cfg)
        logger.debug(f"LR 합성: HR {hr.shape} -> LR {lr.shape}")
        return {"hr": hr, "lr": lr}

    @staticmethod
    def make_kernel(setting: int, side: int, width: Optional[float] = None, sig1: Optional[float] = None,
                    sig2: Optional[float] = None, theta: float = 0.0, noise_frac: float = 0.0,
                    seed: Optional[int] = None) -> np.ndarray:
        """CLI gen-kernel용 커널 생성기. setting 0은 Dirac 커널입니다."""
        if setting == 0:
            return dirac(side)
        if setting == 1:
            if width is None:
                raise ValueError("설정 1 커널에는 --width가 필요합니다.")
            return gaussian_isotropic(width, side)
        if setting == 2:
            if sig1 is None:
                raise ValueError("설정 2 커널에는 --sig1이 필요합니다.")
            return gaussian_anisotropic(sig1, sig2 if sig2 is not None else sig1, theta, noise_frac, seed, side)
        raise ValueError(f"알 수 없는 커널 설정입니다: {setting}")

import numpy as np
import torch

from kernel_space.pca import PcaBasis, ReducedKernel
from .networks import DAN


def _to_tensor(img: np.ndarray, like: torch.Tensor) -> torch.Tensor:
    return torch.as_tensor(np.ascontiguousarray(img), dtype=like.dtype)[None]


class NeuralEstimator:
    """학습된 Estimator를 numpy 기반 Estimator 계약으로 감쌉니다."""

    def __init__(self, model: DAN):
        self.model = model.eval()

    def __call__(self, lr: np.ndarray, sr: np.ndarray, basis: PcaBasis, scale: int) -> ReducedKernel:
        ref = self.model.kernel_init
        with torch.no_grad():
            coeffs = self.model.estimator(_to_tensor(lr, ref), _to_tensor(sr, ref))
        return ReducedKernel(coeffs[0].double().numpy())


class NeuralRestorer:
    """학습된 Restorer를 numpy 기반 Restorer 계약으로 감쌉니다."""

    def __init__(self, model: DAN):
        self.model = model.eval()

    def __call__(self, lr: np.ndarray, r: ReducedKernel, basis: PcaBasis, scale: int) -> np.ndarray:
        ref = self.model.kernel_init
        coeffs = torch.as_tensor(r.coeffs, dtype=ref.dtype)[None]
        with torch.no_grad():
            sr = self.model.restorer(_to_tensor(lr, ref), coeffs)
        return sr[0].double().numpy()

from typing import Callable, Tuple

import numpy as np

# 가중치 하한: 평균 |잔차|에 대한 비율
IRLS_EPS_REL = 1e-3
IRLS_EPS_MIN = 1e-12
BACKTRACK_STEPS = 12


def irls_weights(residual: np.ndarray) -> np.ndarray:
    """
    |r| ≤ r²/(2|r₀|) + |r₀|/2 로 L1 항을 위에서 누르는 가중 제곱 문제의 가중치 1/max(|r₀|, ε)를 만듭니다.
    """
    mag = np.abs(residual)
    eps = max(IRLS_EPS_REL * float(mag.mean()), IRLS_EPS_MIN)
    return 1.0 / np.maximum(mag, eps)


def backtrack(start: np.ndarray, direction: np.ndarray, loss: Callable[[np.ndarray], float],
              steps: int = BACKTRACK_STEPS) -> Tuple[np.ndarray, float]:
    """
    t = 1, 1/2, 1/4, ... 순서로 start + t·direction을 시도해 loss가 start보다 크지 않은 첫 점을 반환합니다.
    모두 실패하면 start의 복사본과 t = 0을 반환하므로 loss는 절대 증가하지 않습니다.
    """
    base = loss(start)
    t = 1.0
    for _ in range(steps):
        candidate = start + t * direction
        if loss(candidate) <= base:
            return candidate, t
        t *= 0.5
    return start.copy(), 0.0

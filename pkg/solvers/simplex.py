import numpy as np


def project_simplex(v: np.ndarray) -> np.ndarray:
    """
    벡터를 확률 단체 {w ≥ 0, Σw = 1}로 유클리드 투영합니다 (정렬 후 임계값 방식).
    입력과 같은 shape의 배열을 반환합니다.
    """
    flat = np.asarray(v, dtype=np.float64).ravel()
    u = np.sort(flat)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, flat.size + 1)
    rho = np.nonzero(u - (css - 1.0) / idx > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1)
    w = np.maximum(flat - theta, 0.0)
    # 부동소수점 오차로 합이 1에서 미세하게 벗어나는 것을 보정
    w /= w.sum()
    return w.reshape(np.shape(v))

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger

from core.errors import BasisError
from degradation.kernels import check_kernel, make_rng, sample_training_kernel

MAGIC = b"PCAB"
ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class PcaBasis:
    """커널을 m차원 축소 공간으로 보내는 PCA 기저 (평균 + 직교 정규 성분 행렬)."""
    side: int
    m: int
    mean: np.ndarray
    components: np.ndarray
    variances: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        d = self.side * self.side
        if self.mean.shape != (d,):
            raise BasisError(f"평균 벡터 길이가 {d}가 아닙니다: {self.mean.shape}")
        if self.components.shape != (self.m, d):
            raise BasisError(f"성분 행렬 크기가 ({self.m}, {d})가 아닙니다: {self.components.shape}")
        if self.m > d:
            raise BasisError(f"축소 차원 m={self.m}은 side²={d}보다 클 수 없습니다.")

    def explained_variance_ratio(self) -> Optional[float]:
        """적합에 쓰인 표본의 전체 분산 중 상위 m개 성분이 설명하는 비율."""
        if self.variances is None:
            return None
        total = float(self.variances.sum())
        if total == 0.0:
            return 1.0
        return float(self.variances[: self.m].sum() / total)


@dataclass(frozen=True)
class ReducedKernel:
    """PCA 계수로 표현된 축소 커널."""
    coeffs: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.coeffs)):
            raise BasisError("축소 커널 계수에 유한하지 않은 값이 있습니다.")

    @property
    def m(self) -> int:
        return int(self.coeffs.shape[0])


def _stack_kernels(kernels: Sequence[np.ndarray]) -> np.ndarray:
    sides = {np.asarray(k).shape for k in kernels}
    if len(sides) != 1:
        raise BasisError(f"모든 커널의 크기가 같아야 합니다: {sorted(sides)}")
    return np.stack([np.asarray(k, dtype=np.float64).ravel() for k in kernels])


def fit_pca(kernels: Sequence[np.ndarray], m: int) -> PcaBasis:
    """
    벡터화한 커널 표본에 PCA를 적합합니다.

    성분은 중심화된 표본 행렬의 오른쪽 특이벡터를 특이값 내림차순으로 정렬한 것이며,
    각 행에서 절댓값이 가장 큰 원소가 양수가 되도록 부호를 맞춥니다.
    """
    if m < 1:
        raise BasisError(f"축소 차원 m은 1 이상이어야 합니다: {m}")
    if len(kernels) < m:
        raise BasisError(f"표본 수({len(kernels)})가 축소 차원 m={m}보다 적습니다.")
    samples = _stack_kernels(kernels)
    side = int(round(np.sqrt(samples.shape[1])))
    if m > samples.shape[1]:
        raise BasisError(f"축소 차원 m={m}은 side²={samples.shape[1]}보다 클 수 없습니다.")

    mean = samples.mean(axis=0)
    centered = samples - mean
    _, sing, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:m].copy()

    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(m), pivots])
    signs[signs == 0] = 1.0
    components *= signs[:, None]

    variances = np.zeros(samples.shape[1])
    variances[: sing.size] = sing ** 2
    basis = PcaBasis(side=side, m=m, mean=mean, components=components, variances=variances)
    logger.info(f"PCA 적합 완료: 표본 {samples.shape[0]}개, side={side}, m={m}, "
                f"설명 분산 비율={basis.explained_variance_ratio():.6f}")
    return basis


def project(basis: PcaBasis, k: np.ndarray) -> ReducedKernel:
    """coeffs = components · (vec(k) - mean)"""
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (basis.side, basis.side):
        raise BasisError(f"커널 크기 {k.shape}가 기저 크기 {basis.side}와 다릅니다.")
    return ReducedKernel(basis.components @ (k.ravel() - basis.mean))


def reconstruct_linear(basis: PcaBasis, coeffs: np.ndarray) -> np.ndarray:
    """클램핑/정규화 없이 mean + componentsᵀ·coeffs를 (side, side)로 반환합니다."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (basis.m,):
        raise BasisError(f"계수 길이 {coeffs.shape}가 기저 차원 m={basis.m}과 다릅니다.")
    return (basis.mean + basis.components.T @ coeffs).reshape(basis.side, basis.side)


def reconstruct(basis: PcaBasis, r: Union[ReducedKernel, np.ndarray]) -> np.ndarray:
    """축소 커널을 블러 커널로 되돌립니다. 음수는 0으로 자르고 합 1로 다시 정규화합니다."""
    coeffs = r.coeffs if isinstance(r, ReducedKernel) else r
    v = np.clip(reconstruct_linear(basis, coeffs), 0.0, None)
    total = v.sum()
    if total <= 0:
        raise BasisError("재구성된 커널이 모두 0입니다 (퇴화된 계수).")
    return check_kernel(v / total)


def build_basis(setting: int, scale: int, m: int = 10, n: int = 10000, seed: int = 0,
                side: Optional[int] = None) -> PcaBasis:
    """sample_training_kernel로 n개의 커널을 뽑아 기저를 적합합니다."""
    rng = make_rng(seed)
    logger.info(f"PCA 적합용 커널 {n}개 샘플링 (setting={setting}, scale={scale}, seed={seed})")
    kernels = [sample_training_kernel(setting, scale, rng, side) for _ in range(n)]
    return fit_pca(kernels, m)


def save_basis(basis: PcaBasis, path: Union[str, Path]):
    """'PCAB' 매직, int32 side/m, little-endian float64 평균과 성분을 기록합니다."""
    payload = MAGIC + struct.pack("<ii", basis.side, basis.m)
    payload += basis.mean.astype("<f8").tobytes()
    payload += basis.components.astype("<f8").tobytes()
    Path(path).write_bytes(payload)
    logger.info(f"PCA 기저 저장: {path} (side={basis.side}, m={basis.m})")


def load_basis(path: Union[str, Path]) -> PcaBasis:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"기저 파일을 찾을 수 없습니다: {path}")
    data = path.read_bytes()
    if data[:4] != MAGIC:
        raise BasisError(f"PCAB 기저 파일이 아닙니다: {path}")
    side, m = struct.unpack("<ii", data[4:12])
    d = side * side
    expected = 12 + 8 * (d + m * d)
    if len(data) != expected:
        raise BasisError(f"기저 파일 길이가 {expected}바이트가 아닙니다 ({len(data)}): {path}")
    values = np.frombuffer(data[12:], dtype="<f8").astype(np.float64)
    return PcaBasis(side=side, m=m, mean=values[:d].copy(), components=values[d:].reshape(m, d).copy())

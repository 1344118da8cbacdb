from pathlib import Path
from typing import Union

import cv2
import numpy as np
from loguru import logger

from core.errors import ImageFormatError, KernelError
from core.image import ensure_image

PathLike = Union[str, Path]

TEXT_SUFFIXES = {".txt", ".mat"}


def _is_text(path: Path) -> bool:
    return path.suffix.lower() in TEXT_SUFFIXES


def load_image(path: PathLike) -> np.ndarray:
    """
    래스터 파일을 읽어 [0, 1] 범위의 (C, H, W) float64 이미지로 반환합니다.

    8비트는 255로, 16비트는 65535로 나눕니다. 텍스트 행렬 형식(.txt)은
    값을 변환 없이 그대로 읽습니다.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"입력 이미지를 찾을 수 없습니다: {path}")
    if _is_text(path):
        return load_text_matrix(path)

    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageFormatError(f"이미지를 읽을 수 없습니다: {path}")

    if raw.dtype == np.uint8:
        max_code = 255.0
    elif raw.dtype == np.uint16:
        max_code = 65535.0
    else:
        raise ImageFormatError(f"지원하지 않는 비트 깊이입니다 ({raw.dtype}): {path}")

    if raw.ndim == 2:
        arr = raw[None, :, :]
    elif raw.ndim == 3 and raw.shape[2] == 3:
        # OpenCV는 BGR 순서로 읽으므로 RGB로 바꿉니다.
        arr = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB).transpose(2, 0, 1)
    else:
        raise ImageFormatError(f"그레이스케일 또는 RGB 이미지만 지원합니다 (shape={raw.shape}): {path}")

    logger.debug(f"이미지 로드: {path} shape={arr.shape} dtype={raw.dtype}")
    return arr.astype(np.float64) / max_code


def quantize(img: np.ndarray) -> np.ndarray:
    """[0, 1]로 클램프한 뒤 round-half-away-from-zero로 8비트 코드값을 만듭니다."""
    clamped = np.clip(ensure_image(img), 0.0, 1.0)
    return np.floor(clamped * 255.0 + 0.5).astype(np.uint8)


def save_image(img: np.ndarray, path: PathLike):
    """이미지를 8비트 무손실 PNG(또는 텍스트 행렬)로 저장합니다."""
    path = Path(path)
    arr = ensure_image(img)
    if _is_text(path):
        save_text_matrix(arr, path)
        return

    codes = quantize(arr)
    if codes.shape[0] == 1:
        out = codes[0]
    else:
        out = cv2.cvtColor(np.ascontiguousarray(codes.transpose(1, 2, 0)), cv2.COLOR_RGB2BGR)

    if path.parent and not path.parent.exists():
        raise OSError(f"출력 디렉토리가 존재하지 않습니다: {path.parent}")
    if not cv2.imwrite(str(path), out):
        raise OSError(f"이미지를 저장할 수 없습니다: {path}")
    logger.debug(f"이미지 저장: {path} shape={arr.shape}")


def load_text_matrix(path: PathLike) -> np.ndarray:
    """첫 줄 'H W C', 이후 채널-마지막 행 우선 순서의 실수값을 읽습니다."""
    path = Path(path)
    tokens = path.read_text().split()
    try:
        h, w, c = (int(t) for t in tokens[:3])
        values = np.array([float(t) for t in tokens[3:]])
    except ValueError as e:
        raise ImageFormatError(f"텍스트 행렬 형식이 잘못되었습니다: {path} ({e})")
    if values.size != h * w * c:
        raise ImageFormatError(f"값 개수({values.size})가 {h}x{w}x{c}와 맞지 않습니다: {path}")
    return ensure_image(values.reshape(h, w, c).transpose(2, 0, 1))


def save_text_matrix(img: np.ndarray, path: PathLike):
    arr = ensure_image(img)
    c, h, w = arr.shape
    lines = [f"{h} {w} {c}"]
    hwc = arr.transpose(1, 2, 0)
    for row in hwc:
        lines.append(" ".join(repr(float(v)) for v in row.ravel()))
    Path(path).write_text("\n".join(lines) + "\n")


def load_kernel(path: PathLike) -> np.ndarray:
    """'K <side>' 헤더를 가진 커널 텍스트 파일을 읽습니다."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"커널 파일을 찾을 수 없습니다: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    header = lines[0].split() if lines else []
    if len(header) != 2 or header[0] != "K":
        raise KernelError(f"커널 파일 헤더는 'K <side>' 형식이어야 합니다: {path}")
    side = int(header[1])
    rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
    weights = np.array(rows, dtype=np.float64)
    if weights.shape != (side, side):
        raise KernelError(f"커널 크기가 헤더({side})와 다릅니다: {weights.shape} ({path})")
    # 순환 참조를 피하기 위해 여기서 가져옵니다.
    from degradation.kernels import check_kernel
    return check_kernel(weights)


def save_kernel(kernel: np.ndarray, path: PathLike):
    """커널을 텍스트로 저장합니다. 확장자가 .png이면 최댓값으로 정규화한 시각화 이미지를 저장합니다."""
    path = Path(path)
    k = np.asarray(kernel, dtype=np.float64)
    if path.suffix.lower() == ".png":
        peak = k.max()
        vis = k / peak if peak > 0 else k
        save_image(vis[None, :, :], path)
        return
    side = k.shape[0]
    lines = [f"K {side}"] + [" ".join(repr(float(v)) for v in row) for row in k]
    path.write_text("\n".join(lines) + "\n")

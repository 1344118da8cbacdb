from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import cv2
import numpy as np
from loguru import logger

from core.drawing_utils import put_label
from core.errors import ShapeMismatchError
from core.image import bicubic_resize, ensure_image
from core.image_io import quantize

LABEL_HEIGHT = 18
BACKGROUND = 32

Rect = Tuple[int, int, int, int]  # (x, y, w, h)


def _to_rgb8(img: np.ndarray) -> np.ndarray:
    """(C, H, W) [0,1] 이미지를 (H, W, 3) uint8 RGB로 바꿉니다."""
    q = quantize(img).transpose(1, 2, 0)
    return np.repeat(q, 3, axis=2) if q.shape[2] == 1 else q


def _align(images: List[np.ndarray], align: bool) -> List[np.ndarray]:
    ref = images[0].shape[1:]
    out = []
    for i, img in enumerate(images):
        if img.shape[1:] != ref:
            if not align:
                raise ShapeMismatchError(
                    f"{i}번째 이미지 크기 {img.shape[1:]}가 첫 이미지 {ref}와 다릅니다. --align을 사용하세요.")
            img = bicubic_resize(img, Fraction(ref[0], img.shape[1]))
            if img.shape[1:] != ref:
                raise ShapeMismatchError(f"{i}번째 이미지는 종횡비가 달라 {ref}로 맞출 수 없습니다.")
        out.append(img)
    return out


def _check_inset(inset: Rect, h: int, w: int):
    x, y, iw, ih = inset
    if iw < 1 or ih < 1 or x < 0 or y < 0 or x + iw > w or y + ih > h:
        raise ValueError(f"inset 영역 (x={x}, y={y}, w={iw}, h={ih})이 이미지 범위 {w}x{h}를 벗어납니다.")


def build_comparison(
    labeled: Sequence[Tuple[str, np.ndarray]],
    inset: Optional[Rect] = None,
    align: bool = False,
    gutter: int = 8,
) -> np.ndarray:
    """
    라벨이 붙은 이미지들을 가로로 이어 붙인 비교 그리드를 만듭니다.

    각 패널 위에 LABEL_HEIGHT 높이의 라벨 띠가 있고, inset이 주어지면
    패널 아래에 해당 영역을 정수배 최근접 확대한 줌 띠가 추가됩니다.
    패널 영역의 픽셀은 원본을 양자화한 값과 정확히 같습니다.

    Returns:
        (H, W, 3) uint8 RGB 캔버스
    """
    if len(labeled) < 2:
        raise ValueError(f"비교 그리드에는 이미지가 2장 이상 필요합니다: {len(labeled)}")
    if gutter < 0:
        raise ValueError(f"gutter는 0 이상이어야 합니다: {gutter}")
    labels = [label for label, _ in labeled]
    images = _align([ensure_image(img, label) for label, img in labeled], align)
    _, h, w = images[0].shape

    zoom = 0
    zoom_h = 0
    if inset is not None:
        _check_inset(inset, h, w)
        zoom = max(1, w // inset[2])
        zoom_h = inset[3] * zoom + gutter

    n = len(images)
    canvas = np.full((LABEL_HEIGHT + h + zoom_h, n * w + (n - 1) * gutter, 3), BACKGROUND, dtype=np.uint8)
    for i, (label, img) in enumerate(zip(labels, images)):
        x0 = i * (w + gutter)
        panel = _to_rgb8(img)
        canvas[LABEL_HEIGHT:LABEL_HEIGHT + h, x0:x0 + w] = panel
        if inset is not None:
            x, y, iw, ih = inset
            crop = panel[y:y + ih, x:x + iw]
            zoomed = np.repeat(np.repeat(crop, zoom, axis=0), zoom, axis=1)
            top = LABEL_HEIGHT + h + gutter
            canvas[top:top + zoomed.shape[0], x0:x0 + zoomed.shape[1]] = zoomed
        canvas = put_label(canvas, label, (x0 + 2, 2), box=(x0, 0, x0 + w, LABEL_HEIGHT))
    return canvas


def emit_comparison(
    labeled: Sequence[Tuple[str, np.ndarray]],
    out: Union[str, Path],
    inset: Optional[Rect] = None,
    align: bool = False,
    gutter: int = 8,
) -> np.ndarray:
    """비교 그리드를 만들어 PNG로 저장하고 캔버스를 반환합니다."""
    canvas = build_comparison(labeled, inset, align, gutter)
    if not cv2.imwrite(str(out), cv2.cvtColor(canvas, cv2.COLOR_RGB2BGR)):
        raise OSError(f"비교 그리드를 저장하지 못했습니다: {out}")
    logger.info(f"비교 그리드 저장: {out} ({canvas.shape[1]}x{canvas.shape[0]}, {len(labeled)}개 패널)")
    return canvas

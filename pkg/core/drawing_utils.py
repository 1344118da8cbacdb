from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from loguru import logger


def _load_font(font_path: Optional[str], font_size: int):
    """font_path가 없거나 존재하지 않으면 Pillow 기본 비트맵 폰트를 반환합니다."""
    if font_path is None:
        return ImageFont.load_default()
    if Path(font_path).exists():
        return ImageFont.truetype(font_path, font_size)
    if not hasattr(_load_font, 'font_warning_logged'):
        logger.debug(f"폰트 파일을 찾을 수 없습니다: {font_path}. 기본 폰트로 대체합니다.")
        _load_font.font_warning_logged = True
    return ImageFont.load_default()


def put_label(
    canvas: np.ndarray,
    text: str,
    position: Tuple[int, int],
    font_size: int = 14,
    color: Tuple[int, int, int] = (255, 255, 255),
    box: Optional[Tuple[int, int, int, int]] = None,
    font_path: Optional[str] = None,
) -> np.ndarray:
    """
    RGB uint8 캔버스(H, W, 3)에 Pillow로 텍스트 라벨을 그립니다.

    Args:
        canvas: 라벨을 그릴 이미지 (RGB 순서)
        text: 라벨 문자열
        position: 텍스트 왼쪽 위 좌표 (x, y)
        font_size: 폰트 크기 (트루타입 폰트일 때만 적용)
        color: 글자색 (R, G, B)
        box: 지정하면 (x0, y0, x1, y1) 밖으로 그려진 픽셀은 원래 값으로 되돌립니다.
        font_path: TTF 폰트 경로 (기본: Pillow 내장 폰트)

    Returns:
        라벨이 그려진 새 캔버스
    """
    try:
        img_pil = Image.fromarray(canvas.copy())
        draw = ImageDraw.Draw(img_pil)
        draw.text(position, text, font=_load_font(font_path, font_size), fill=color)
        drawn = np.array(img_pil)
    except Exception as e:
        logger.error(f"라벨 렌더링 중 오류 발생: {e}")
        return canvas

    if box is not None:
        x0, y0, x1, y1 = box
        clipped = canvas.copy()
        clipped[y0:y1, x0:x1] = drawn[y0:y1, x0:x1]
        return clipped
    return drawn

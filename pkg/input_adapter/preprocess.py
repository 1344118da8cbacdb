from typing import List, Sequence

import numpy as np
from loguru import logger

from core.image import ensure_image, to_y


class CropSampler:
    """학습용 HR 이미지에서 배율에 맞는 무작위 크롭을 잘라내는 전처리 클래스"""

    def __init__(self, crop: int = 32, scale: int = 2, channels: int = 1):
        """
        :param crop: 크롭 크기 (배율의 배수로 내림)
        :param scale: SR 배율
        :param channels: 네트워크 입력 채널 수 (1이면 Y 채널, 3이면 RGB)
        """
        self.crop = crop - crop % scale
        if self.crop < scale:
            raise ValueError(f"크롭 크기({crop})가 배율({scale})보다 작습니다.")
        self.scale = scale
        self.channels = channels
        logger.info(f"크롭 샘플러 초기화: 크기={self.crop}, 배율={scale}, 채널={channels}")

    def convert_channels(self, img: np.ndarray) -> np.ndarray:
        """이미지 채널 수를 네트워크 입력에 맞춥니다."""
        arr = ensure_image(img)
        if self.channels == 1:
            return to_y(arr)
        if arr.shape[0] == 1:
            return np.repeat(arr, 3, axis=0)
        return arr

    def random_crop(self, img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """
        :param img: (C, H, W) 이미지
        :param rng: 크롭 위치를 정할 numpy Generator
        :return: (channels, crop, crop) 크롭
        """
        arr = self.convert_channels(img)
        _, h, w = arr.shape
        if h < self.crop or w < self.crop:
            raise ValueError(f"이미지({h}x{w})가 크롭 크기 {self.crop}보다 작습니다.")
        top = int(rng.integers(0, h - self.crop + 1))
        left = int(rng.integers(0, w - self.crop + 1))
        return arr[:, top : top + self.crop, left : left + self.crop].copy()

    def sample_batch(self, images: Sequence[np.ndarray], batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
        """이미지 목록에서 무작위로 골라 batch_size개의 크롭을 만듭니다."""
        picks = rng.integers(0, len(images), size=batch_size)
        return [self.random_crop(images[int(i)], rng) for i in picks]

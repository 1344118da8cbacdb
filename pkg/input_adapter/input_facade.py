from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from loguru import logger

from .preprocess import CropSampler
from .stream import ImageStream


class InputAdapter:
    def __init__(self, source: Union[str, Path], scale: int = 2, crop: int = 32, channels: int = 1):
        """
        InputAdapter는 HR 이미지 디렉토리를 읽고 학습용 크롭을 제공하는 역할을 합니다.
        :param source: HR 이미지 디렉토리
        :param scale: SR 배율
        :param crop: 학습 크롭 크기
        :param channels: 네트워크 입력 채널 수
        """
        self.stream = ImageStream(source)
        self.preprocessor = CropSampler(crop=crop, scale=scale, channels=channels)
        self.items: List[Tuple[str, np.ndarray]] = self.stream.load_all()
        logger.info(f"InputAdapter 초기화 완료. (이미지 {len(self.items)}장)")

    @property
    def images(self) -> List[np.ndarray]:
        return [self.preprocessor.convert_channels(img) for _, img in self.items]

    def get_batch(self, batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
        return self.preprocessor.sample_batch([img for _, img in self.items], batch_size, rng)

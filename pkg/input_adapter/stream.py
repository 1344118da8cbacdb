from pathlib import Path
from typing import Generator, List, Tuple, Union

import numpy as np
from loguru import logger

from core.image_io import load_image

IMAGE_SUFFIXES = {".png", ".bmp", ".tif", ".tiff", ".txt"}


class ImageStream:
    """디렉토리 안의 HR 이미지를 이름 순서대로 읽어 오는 스트림 클래스"""

    def __init__(self, source: Union[str, Path]):
        """
        :param source: 이미지 디렉토리 경로
        """
        self.source = Path(source)
        if not self.source.is_dir():
            raise FileNotFoundError(f"이미지 디렉토리를 찾을 수 없습니다: {self.source}")
        self.paths = sorted(p for p in self.source.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if not self.paths:
            raise FileNotFoundError(f"디렉토리에 지원하는 이미지가 없습니다: {self.source}")
        logger.info(f"이미지 스트림 초기화 완료: {self.source} ({len(self.paths)}장)")

    def __len__(self) -> int:
        return len(self.paths)

    def get_images(self) -> Generator[Tuple[str, np.ndarray], None, None]:
        """(이미지 ID, 이미지) 쌍을 생성합니다. ID는 확장자를 뺀 파일 이름입니다."""
        for path in self.paths:
            yield path.stem, load_image(path)

    def load_all(self) -> List[Tuple[str, np.ndarray]]:
        return list(self.get_images())

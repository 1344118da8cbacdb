import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def textured():
    """부드러운 성분과 무작위 성분이 섞인 재현 가능한 (1, H, W) 테스트 이미지 생성기."""
    def _make(h: int = 64, w: int = 64, seed: int = 0, channels: int = 1):
        gen = np.random.default_rng(seed)
        yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
        planes = []
        for _ in range(channels):
            fx, fy = gen.uniform(2, 6, size=2)
            smooth = 0.5 + 0.25 * np.sin(2 * np.pi * fx * xx) * np.cos(2 * np.pi * fy * yy)
            planes.append(np.clip(smooth + 0.2 * gen.random((h, w)) - 0.1, 0.0, 1.0))
        return np.stack(planes)
    return _make

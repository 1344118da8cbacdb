import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger

# 프로젝트 루트 디렉토리
# config/config.py -> blind-sr-toolkit/
ROOT_DIR = Path(__file__).parent.parent


def get_config() -> Dict[str, Any]:
    """
    툴킷 전체에서 사용할 중앙 기본 설정 객체를 반환합니다.
    각 섹션은 core.models의 pydantic 모델 필드 이름과 일치합니다.
    """
    config = {
        "degradation": {
            "scale": 4,
            "noise_sigma": 0.0,
            "noise_is_variance": False,  # True이면 noise_sigma를 분산으로 해석
            "seed": 0,
            "boundary": "replicate",
        },
        "pca": {
            "m": 10,
            "n_samples": 10000,
            "seed": 0,
        },
        "classical": {
            "ridge": 1e-6,
            "simplex_project": True,
            "lambda": 1e-4,
            "cg_iters": 200,
            "cg_tol": 1e-8,
        },
        "engine": {
            "iterations": 4,
            "estimator_first": False,
        },
        "dan": {
            "preset": "toy",
        },
        "train": {
            "steps": 2000,
            "batch_size": 8,
            "crop": 32,
            "lr": 2e-4,
            "decay_every": 500,
            "kernel_loss_weight": 1.0,
        },
        "bench": {
            "kernels": "gaussian8",
            "timing": True,
        },
        "runtime": {
            "seed": 0,
            "threads": None,  # None이면 BLINDSR_THREADS 또는 CPU 코어 수
        },
    }
    return config


def _parse_value(text: str) -> Any:
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config_file(path: Path) -> Dict[str, Any]:
    """
    'key=value' 형식의 설정 파일을 읽어 중첩 딕셔너리로 반환합니다.
    '#' 이후는 주석이며, 'classical.lambda=1e-4'처럼 점으로 섹션을 구분합니다.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"설정 파일을 찾을 수 없습니다: {path}")

    overrides: Dict[str, Any] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: 'key=value' 형식이 아닙니다: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        node = overrides
        *sections, leaf = key.split(".")
        for section in sections:
            node = node.setdefault(section, {})
        node[leaf] = _parse_value(value)

    logger.info(f"설정 파일 로드 완료: {path}")
    return overrides


def merge_config(base: Dict[str, Any], *overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """뒤에 오는 딕셔너리가 우선합니다 (flags > file > defaults). None 값은 무시합니다."""
    merged = copy.deepcopy(base)
    for override in overrides:
        if not override:
            continue
        for key, value in override.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = merge_config(merged[key], value)
            elif value is not None:
                merged[key] = value
    return merged


def resolve_threads(requested: Optional[int] = None) -> int:
    """--threads > BLINDSR_THREADS > CPU 코어 수 순으로 워커 수를 결정합니다."""
    if requested is None:
        env = os.environ.get("BLINDSR_THREADS")
        if env:
            try:
                requested = int(env)
            except ValueError:
                logger.warning(f"BLINDSR_THREADS 값이 정수가 아닙니다: {env!r}. 기본값을 사용합니다.")
    if requested is None:
        requested = os.cpu_count() or 1
    return max(1, int(requested))

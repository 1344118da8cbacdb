import sys

from loguru import logger


def configure_logging(verbose: bool = False):
    """loguru 기본 싱크를 stderr 하나로 재설정합니다. verbose이면 DEBUG까지 출력합니다."""
    logger.remove()
    logger.add(
        sys.stderr,
        level="DEBUG" if verbose else "INFO",
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {name}:{function} - {message}",
    )

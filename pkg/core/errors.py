class BlindSRError(Exception):
    """툴킷 전체에서 사용하는 기본 예외 클래스."""


class ImageFormatError(BlindSRError, ValueError):
    """읽을 수 없거나 지원하지 않는 이미지 파일/배열."""


class ShapeMismatchError(BlindSRError, ValueError):
    """입력 배열들의 크기(채널, 높이, 너비)가 서로 맞지 않을 때."""


class KernelError(BlindSRError, ValueError):
    """블러 커널 불변식(홀수 크기, 비음수, 합 1) 위반 또는 잘못된 생성 파라미터."""


class DegenerateSystemError(BlindSRError, RuntimeError):
    """커널을 식별할 수 없는 퇴화된 선형 시스템 (예: 상수 SR 이미지)."""


class BasisError(BlindSRError, ValueError):
    """PCA 기저 관련 오류 (표본 수 부족, 크기 불일치, 파일 형식 오류)."""


class CheckpointError(BlindSRError, ValueError):
    """DANW 체크포인트 파일 형식 오류."""


class TrainingError(BlindSRError, RuntimeError):
    """학습 중 발생한 오류 (NaN 손실 등)."""


class AlternationError(BlindSRError, RuntimeError):
    """교대 최적화 루프에서 Estimator/Restorer 호출이 실패했을 때."""

    def __init__(self, iteration: int, stage: str, cause: Exception):
        self.iteration = iteration
        self.stage = stage
        self.cause = cause
        super().__init__(f"{iteration}번째 반복의 {stage} 단계에서 실패했습니다: {cause}")

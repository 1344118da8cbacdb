from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class DegradationConfig(BaseModel):
    """y = (x ⊗ k)↓s + n 열화 모델의 설정"""
    scale: int = Field(4, ge=1, description="다운샘플링 배율 s")
    noise_sigma: float = Field(0.0, ge=0.0, description="AWGN 세기 (0-255 코드 단위)", examples=[15.0])
    noise_is_variance: bool = Field(False, description="True이면 noise_sigma를 분산으로 해석 (σ = sqrt(v))")
    seed: int = Field(0, description="노이즈 RNG 시드")
    boundary: Literal["replicate"] = Field("replicate", description="컨볼루션 경계 처리 방식")

    @property
    def sigma255(self) -> float:
        """표준편차로 환산한 노이즈 세기."""
        return self.noise_sigma ** 0.5 if self.noise_is_variance else self.noise_sigma


class LsEstimatorConfig(BaseModel):
    """최소제곱 커널 추정기 설정"""
    ridge: float = Field(1e-6, ge=0.0, description="커널 계수에 대한 Tikhonov 가중치")
    simplex_project: bool = Field(True, description="재구성된 커널을 확률 단체(simplex)에 투영할지 여부")


class CgRestorerConfig(BaseModel):
    """공액 경사법(CG) 복원기 설정"""
    lam: float = Field(1e-4, ge=0.0, alias="lambda", description="∇x에 대한 Tikhonov 정칙화 가중치 φ(x)")
    max_iters: int = Field(200, ge=1, description="CG 최대 반복 횟수")
    tol: float = Field(1e-8, gt=0.0, description="상대 잔차 허용 오차")

    model_config = {"populate_by_name": True}


class DanConfig(BaseModel):
    """신경망 Estimator/Restorer 구조 설정"""
    scale: int = Field(2, ge=1, le=4, description="SR 배율")
    channels: int = Field(1, description="이미지 채널 수 (1 또는 3)")
    iterations: int = Field(4, ge=1, description="언폴딩 반복 횟수 T")
    pca_dim: int = Field(10, ge=1, description="축소 커널 차원 m")
    est_crbs: int = Field(3, ge=1, description="Estimator CRB 개수")
    est_basic_ch: int = Field(16, ge=1)
    est_cond_ch: int = Field(16, ge=1)
    res_crbs: int = Field(4, ge=1, description="Restorer CRB 개수")
    res_basic_ch: int = Field(16, ge=1)
    res_cond_ch: int = Field(10, ge=1, description="Restorer 조건 입력 채널 수 (= m)")
    reduction: int = Field(4, ge=1, description="채널 어텐션 축소 비율 r")

    @field_validator("channels")
    @classmethod
    def check_channels(cls, v):
        if v not in (1, 3):
            raise ValueError("channels는 1 또는 3이어야 합니다.")
        return v

    @model_validator(mode="after")
    def check_cond_matches_pca(self):
        if self.res_cond_ch != self.pca_dim:
            raise ValueError(f"Restorer 조건 채널({self.res_cond_ch})은 PCA 차원({self.pca_dim})과 같아야 합니다.")
        for ch in (self.est_basic_ch, self.res_basic_ch):
            if ch % self.reduction != 0:
                raise ValueError(f"기본 채널 수({ch})는 어텐션 축소 비율({self.reduction})로 나누어져야 합니다.")
        return self

    @classmethod
    def toy(cls, scale: int = 2, **overrides) -> "DanConfig":
        """데스크 규모 검증용 프리셋."""
        return cls(scale=scale, **overrides)

    @classmethod
    def full(cls, scale: int = 4, **overrides) -> "DanConfig":
        """원래 규모(Estimator 5 CRB/32ch, Restorer 40 CRB/64ch) 프리셋."""
        params = dict(scale=scale, est_crbs=5, est_basic_ch=32, est_cond_ch=32,
                      res_crbs=40, res_basic_ch=64, res_cond_ch=10, reduction=16)
        params.update(overrides)
        return cls(**params)


class TrainConfig(BaseModel):
    """toy 학습 하이퍼파라미터"""
    steps: int = Field(2000, ge=1)
    batch_size: int = Field(8, ge=1)
    crop: int = Field(32, ge=4, description="HR 크롭 크기")
    setting: int = Field(1, description="커널 샘플링 설정 (1: 등방성, 2: 비등방성)")
    lr: float = Field(2e-4, gt=0.0, description="Adam 학습률")
    betas: List[float] = Field(default_factory=lambda: [0.9, 0.99])
    decay_every: int = Field(500, ge=1, description="학습률을 절반으로 줄이는 주기 (스텝)")
    kernel_loss_weight: float = Field(1.0, ge=0.0, description="커널 L1 손실 가중치 w")
    noise_sigma: float = Field(0.0, ge=0.0, description="학습 시 LR에 더할 AWGN (0-255 단위)")
    seed: int = Field(0)


class BenchRow(BaseModel):
    """벤치마크 결과의 한 행 (이미지 x 커널)"""
    image: str
    kernel: str
    psnr_db: Optional[float] = None
    ssim: Optional[float] = None
    kernel_l1: Optional[float] = None
    ms: float = 0.0
    error: Optional[str] = Field(None, description="실패한 행의 오류 메시지")

    @property
    def failed(self) -> bool:
        return self.error is not None


class BenchReport(BaseModel):
    """벤치마크 전체 결과"""
    rows: List[BenchRow] = Field(..., min_length=1)
    config: dict = Field(default_factory=dict, description="실행 설정 에코")

    def means(self) -> dict:
        """실패하지 않은 행들의 평균. 무한대 PSNR은 평균에서 제외합니다."""
        ok = [r for r in self.rows if not r.failed]
        def _mean(values):
            finite = [v for v in values if v is not None and v != float("inf")]
            return sum(finite) / len(finite) if finite else None
        return {
            "psnr_db": _mean([r.psnr_db for r in ok]),
            "ssim": _mean([r.ssim for r in ok]),
            "kernel_l1": _mean([r.kernel_l1 for r in ok]),
            "ms": _mean([r.ms for r in ok]),
            "rows": len(self.rows),
            "failed": len(self.rows) - len(ok),
        }


class CliConfig(BaseModel):
    """blindsr 명령 공통 옵션. 하위 명령 고유 플래그는 options에 담깁니다."""
    command: Literal["gen-kernel", "pca-fit", "degrade", "solve", "train-toy", "bench", "iter-study", "compare"]
    seed: int = Field(0, description="모든 확률적 출력의 시드")
    threads: Optional[int] = Field(None, ge=1, description="워커 수 (None이면 BLINDSR_THREADS 또는 CPU 코어 수)")
    verbose: bool = False
    config_file: Optional[str] = Field(None, description="key=value 설정 파일 경로")
    options: dict = Field(default_factory=dict)

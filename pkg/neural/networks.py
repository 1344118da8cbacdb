from typing import List, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F
from loguru import logger

from core.models import DanConfig
from degradation.kernels import dirac
from kernel_space.pca import PcaBasis, project
from .layers import ConditionalResidualBlock, kaiming_init, pixel_shuffle, stretch_kernel, upscale_factors


class Estimator(nn.Module):
    """
    LR(기본 입력)과 SR(조건 입력)로부터 축소 커널을 추정합니다.
    SR은 stride s 컨볼루션으로 LR 크기까지 줄인 뒤 모든 CRB에 같은 조건 맵으로 전달됩니다.
    """

    def __init__(self, cfg: DanConfig):
        super().__init__()
        s = cfg.scale
        self.scale = s
        self.head_sr = nn.Conv2d(cfg.channels, cfg.est_cond_ch, 2 * s + 1, stride=s, padding=s)
        self.head_lr = nn.Conv2d(cfg.channels, cfg.est_basic_ch, 3, padding=1)
        self.blocks = nn.ModuleList(
            ConditionalResidualBlock(cfg.est_basic_ch, cfg.est_cond_ch, cfg.reduction) for _ in range(cfg.est_crbs)
        )
        self.tail = nn.Conv2d(cfg.est_basic_ch, cfg.pca_dim, 3, padding=1)

    def forward(self, lr: torch.Tensor, sr: torch.Tensor) -> torch.Tensor:
        n, _, h, w = lr.shape
        if tuple(sr.shape[2:]) != (h * self.scale, w * self.scale):
            raise ValueError(f"SR 공간 크기 {tuple(sr.shape[2:])}가 LR ({h}, {w}) x {self.scale}와 다릅니다.")
        cond = self.head_sr(sr)
        feat = self.head_lr(lr)
        for block in self.blocks:
            feat = block(feat, cond)
        # 전역 평균 풀링으로 공간 차원을 없애 (N, m) 계수를 만듭니다.
        return F.adaptive_avg_pool2d(self.tail(feat), 1).flatten(1)


class Restorer(nn.Module):
    """늘린 축소 커널을 모든 CRB의 조건 입력으로 사용하고 PixelShuffle로 s배 확대합니다."""

    def __init__(self, cfg: DanConfig):
        super().__init__()
        ch = cfg.res_basic_ch
        self.pca_dim = cfg.pca_dim
        self.head = nn.Conv2d(cfg.channels, ch, 3, padding=1)
        self.blocks = nn.ModuleList(
            ConditionalResidualBlock(ch, cfg.res_cond_ch, cfg.reduction) for _ in range(cfg.res_crbs)
        )
        self.body_tail = nn.Conv2d(ch, ch, 3, padding=1)
        self.factors = upscale_factors(cfg.scale)
        self.upsamplers = nn.ModuleList(nn.Conv2d(ch, ch * f * f, 3, padding=1) for f in self.factors)
        self.tail = nn.Conv2d(ch, cfg.channels, 3, padding=1)

    def forward(self, lr: torch.Tensor, coeffs: torch.Tensor) -> torch.Tensor:
        if coeffs.shape[-1] != self.pca_dim:
            raise ValueError(f"축소 커널 길이 {coeffs.shape[-1]}가 m={self.pca_dim}과 다릅니다.")
        _, _, h, w = lr.shape
        cond = stretch_kernel(coeffs, h, w)
        head = self.head(lr)
        feat = head
        for block in self.blocks:
            feat = block(feat, cond)
        feat = self.body_tail(feat) + head
        for conv, factor in zip(self.upsamplers, self.factors):
            feat = pixel_shuffle(conv(feat), factor)
        return self.tail(feat)


class DAN(nn.Module):
    """
    Restorer와 Estimator를 T번 번갈아 실행하는 언폴딩 네트워크.
    두 모듈의 파라미터는 모든 반복에서 공유됩니다.
    """

    def __init__(self, cfg: DanConfig, kernel_init: torch.Tensor):
        super().__init__()
        self.config = cfg
        self.estimator = Estimator(cfg)
        self.restorer = Restorer(cfg)
        self.register_buffer("kernel_init", kernel_init.detach().clone().reshape(cfg.pca_dim))
        kaiming_init(self)
        logger.info(
            f"DAN 초기화 완료: scale={cfg.scale}, T={cfg.iterations}, "
            f"Estimator {cfg.est_crbs} CRB/{cfg.est_basic_ch}ch, Restorer {cfg.res_crbs} CRB/{cfg.res_basic_ch}ch"
        )

    @classmethod
    def from_basis(cls, cfg: DanConfig, basis: PcaBasis) -> "DAN":
        """Dirac 커널의 PCA 계수를 초기 커널로 사용하는 모델을 만듭니다."""
        if basis.m != cfg.pca_dim:
            raise ValueError(f"기저 차원 m={basis.m}이 설정의 pca_dim={cfg.pca_dim}과 다릅니다.")
        init = torch.as_tensor(project(basis, dirac(basis.side)).coeffs, dtype=torch.get_default_dtype())
        return cls(cfg, init)

    def forward(self, lr: torch.Tensor, iterations: Optional[int] = None,
                estimator_first: bool = False) -> Tuple[torch.Tensor, torch.Tensor, List[Tuple[torch.Tensor, torch.Tensor]]]:
        """
        Returns:
            (마지막 SR, 마지막 축소 커널, [(축소 커널, SR), ...] 반복별 기록)
        """
        iterations = iterations or self.config.iterations
        if iterations < 1:
            raise ValueError(f"반복 횟수는 1 이상이어야 합니다: {iterations}")
        n = lr.shape[0]
        coeffs = self.kernel_init.to(lr.dtype).expand(n, -1)
        sr = F.interpolate(lr, scale_factor=self.config.scale, mode="bicubic", align_corners=False) \
            if estimator_first else None
        trace = []
        for _ in range(iterations):
            if estimator_first:
                coeffs = self.estimator(lr, sr)
                sr = self.restorer(lr, coeffs)
            else:
                sr = self.restorer(lr, coeffs)
                coeffs = self.estimator(lr, sr)
            trace.append((coeffs, sr))
        return sr, coeffs, trace


def dan_forward(lr: torch.Tensor, basis: PcaBasis, model: DAN, cfg: Optional[DanConfig] = None):
    """공유 파라미터로 언폴딩된 교대 루프를 실행합니다. (sr, 축소 커널, trace)를 반환합니다."""
    cfg = cfg or model.config
    if basis.m != cfg.pca_dim:
        raise ValueError(f"기저 차원 m={basis.m}이 설정의 pca_dim={cfg.pca_dim}과 다릅니다.")
    return model(lr, cfg.iterations)

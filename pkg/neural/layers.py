import math

import torch
import torch.nn as nn
import torch.nn.functional as F


def kaiming_init(module: nn.Module):
    """
    컨볼루션은 fan-in 기준 Kaiming-uniform으로 초기화하고,
    채널 어텐션 마지막 1x1 conv의 bias만 0으로 둡니다.
    """
    for layer in module.modules():
        if isinstance(layer, nn.Conv2d):
            nn.init.kaiming_uniform_(layer.weight, a=math.sqrt(5))
            if layer.bias is not None:
                fan_in = layer.weight.shape[1] * layer.weight.shape[2] * layer.weight.shape[3]
                bound = 1.0 / math.sqrt(fan_in)
                nn.init.uniform_(layer.bias, -bound, bound)
    for layer in module.modules():
        if isinstance(layer, ChannelAttention):
            nn.init.zeros_(layer.excite.bias)


class ChannelAttention(nn.Module):
    """전역 평균 풀링 → 1x1 conv → ReLU → 1x1 conv → sigmoid 게이트로 채널별 스케일을 조정합니다."""

    def __init__(self, channels: int, reduction: int = 4):
        super().__init__()
        if channels % reduction != 0:
            raise ValueError(f"채널 수({channels})가 축소 비율({reduction})로 나누어지지 않습니다.")
        self.squeeze = nn.Conv2d(channels, channels // reduction, 1)
        self.excite = nn.Conv2d(channels // reduction, channels, 1)

    def gate(self, x: torch.Tensor) -> torch.Tensor:
        pooled = F.adaptive_avg_pool2d(x, 1)
        return torch.sigmoid(self.excite(F.relu(self.squeeze(pooled))))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x * self.gate(x)


class ConditionalResidualBlock(nn.Module):
    """
    f_out = R(Concat([f_basic, f_cond])) + f_basic
    R은 3x3 conv → ReLU → 3x3 conv → 채널 어텐션입니다.
    """

    def __init__(self, basic_ch: int, cond_ch: int, reduction: int = 4):
        super().__init__()
        self.basic_ch = basic_ch
        self.cond_ch = cond_ch
        self.conv1 = nn.Conv2d(basic_ch + cond_ch, basic_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(basic_ch, basic_ch, 3, padding=1)
        self.attention = ChannelAttention(basic_ch, reduction)

    def residual(self, basic: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        if basic.shape[0] != cond.shape[0] or basic.shape[2:] != cond.shape[2:]:
            raise ValueError(f"basic {tuple(basic.shape)}과 cond {tuple(cond.shape)}의 배치/공간 크기가 다릅니다.")
        out = self.conv2(F.relu(self.conv1(torch.cat([basic, cond], dim=1))))
        return self.attention(out)

    def forward(self, basic: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        return self.residual(basic, cond) + basic


def pixel_shuffle(x: torch.Tensor, r: int) -> torch.Tensor:
    """(C·r², H, W) → (C, H·r, W·r). out[c, h·r+a, w·r+b] = in[c·r²+a·r+b, h, w]"""
    if x.shape[1] % (r * r) != 0:
        raise ValueError(f"채널 수({x.shape[1]})가 r²={r * r}로 나누어지지 않습니다.")
    return F.pixel_shuffle(x, r)


def pixel_unshuffle(x: torch.Tensor, r: int) -> torch.Tensor:
    """pixel_shuffle의 역변환."""
    return F.pixel_unshuffle(x, r)


def stretch_kernel(coeffs: torch.Tensor, h: int, w: int) -> torch.Tensor:
    """(N, m) 축소 커널을 공간적으로 늘려 채널 j가 coeffs[:, j]로 일정한 (N, m, h, w) 맵을 만듭니다."""
    if h < 1 or w < 1:
        raise ValueError(f"공간 크기는 1 이상이어야 합니다: {h}x{w}")
    return coeffs[:, :, None, None].expand(-1, -1, h, w)


def upscale_factors(scale: int):
    """배율별 PixelShuffle 단계: 4 → [2, 2], 3 → [3], 2 → [2], 1 → []."""
    if scale == 1:
        return []
    if scale == 4:
        return [2, 2]
    if scale in (2, 3):
        return [scale]
    raise ValueError(f"지원하지 않는 배율입니다: {scale}")

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch
import torch.nn.functional as F
from loguru import logger

from core.errors import TrainingError
from core.models import DanConfig, TrainConfig
from degradation.degrade import add_awgn, blur_down
from degradation.kernels import sample_training_kernel
from input_adapter.preprocess import CropSampler
from kernel_space.pca import PcaBasis, project
from .networks import DAN


@dataclass
class TrainResult:
    model: DAN
    losses: List[float] = field(default_factory=list)


def make_training_batch(images: Sequence[np.ndarray], sampler: CropSampler, basis: PcaBasis, hyper: TrainConfig,
                        scale: int, rng: np.random.Generator) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """
    HR 크롭마다 커널을 하나씩 샘플링해 LR을 합성합니다.

    Returns:
        (hr (N,C,H,W), lr (N,C,H/s,W/s), 정답 축소 커널 (N,m)) - 모두 float32
    """
    hr_list, lr_list, coeff_list = [], [], []
    for crop in sampler.sample_batch(images, hyper.batch_size, rng):
        kernel = sample_training_kernel(hyper.setting, scale, rng, side=basis.side)
        lr = blur_down(crop, kernel, scale)
        if hyper.noise_sigma > 0:
            lr = add_awgn(lr, hyper.noise_sigma, rng)
        hr_list.append(crop)
        lr_list.append(lr)
        coeff_list.append(project(basis, kernel).coeffs)
    as_tensor = lambda arrs: torch.as_tensor(np.stack(arrs), dtype=torch.float32)
    return as_tensor(hr_list), as_tensor(lr_list), as_tensor(coeff_list)


def train_toy(dataset: Sequence[np.ndarray], cfg: DanConfig, hyper: TrainConfig, basis: PcaBasis,
              threads: Optional[int] = None) -> TrainResult:
    """
    마지막 반복에서만 L1 손실로 지도하는 데스크 규모 DAN 학습.

    L = L1(sr_T, hr) + w · L1(r_T, project(k_gt)),  Adam(β1=0.9, β2=0.99),
    decay_every 스텝마다 학습률을 절반으로 줄입니다. 같은 시드면 손실 곡선이 동일합니다.
    """
    if not dataset:
        raise TrainingError("학습 데이터셋이 비어 있습니다.")
    if threads:
        torch.set_num_threads(threads)
    torch.manual_seed(hyper.seed)
    rng = np.random.default_rng(hyper.seed)

    sampler = CropSampler(crop=hyper.crop, scale=cfg.scale, channels=cfg.channels)
    images = [sampler.convert_channels(img) for img in dataset]
    model = DAN.from_basis(cfg, basis).float().train()
    optimizer = torch.optim.Adam(model.parameters(), lr=hyper.lr, betas=tuple(hyper.betas))
    scheduler = torch.optim.lr_scheduler.StepLR(optimizer, step_size=hyper.decay_every, gamma=0.5)

    losses: List[float] = []
    log_every = max(1, hyper.steps // 10)
    logger.info(f"toy 학습 시작: steps={hyper.steps}, batch={hyper.batch_size}, crop={sampler.crop}, "
                f"setting={hyper.setting}, w={hyper.kernel_loss_weight}")

    for step in range(1, hyper.steps + 1):
        hr, lr, gt_coeffs = make_training_batch(images, sampler, basis, hyper, cfg.scale, rng)
        sr, coeffs, _ = model(lr, cfg.iterations)
        loss = F.l1_loss(sr, hr) + hyper.kernel_loss_weight * F.l1_loss(coeffs, gt_coeffs)
        if not torch.isfinite(loss):
            logger.error(f"{step}번째 스텝에서 손실이 NaN/Inf가 되었습니다.")
            raise TrainingError(f"{step}번째 스텝에서 손실이 유한하지 않습니다: {loss.item()}")

        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        scheduler.step()
        losses.append(float(loss.item()))

        if step % log_every == 0 or step == 1:
            logger.info(f"스텝 {step}/{hyper.steps}: loss={losses[-1]:.5f}, lr={scheduler.get_last_lr()[0]:.2e}")

    logger.success(f"toy 학습 완료: 초기 손실 {losses[0]:.5f} -> 최종 손실 {losses[-1]:.5f}")
    return TrainResult(model=model.eval(), losses=losses)

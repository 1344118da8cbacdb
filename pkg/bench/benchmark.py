import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from core.image import bicubic_resize
from core.image_io import load_kernel
from core.models import BenchReport, BenchRow
from degradation.degrade_facade import Degrader
from degradation.kernels import gaussian_isotropic
from engine.solver_facade import SolverFacade
from input_adapter.stream import ImageStream
from .metrics import kernel_l1_reduced, psnr_y, ssim_y

GAUSSIAN8_RANGES = {4: (1.8, 3.2), 3: (1.35, 2.40), 2: (0.80, 1.60)}
GAUSSIAN8_SIDE = 21
CSV_HEADER = ["image", "kernel", "psnr_db", "ssim", "kernel_l1", "ms"]

NamedKernel = Tuple[str, np.ndarray]


def gaussian8_widths(scale: int) -> np.ndarray:
    """배율별 범위를 양 끝점 포함 8등분한 커널 폭."""
    if scale not in GAUSSIAN8_RANGES:
        raise ValueError(f"Gaussian8은 배율 2, 3, 4만 지원합니다: {scale}")
    lo, hi = GAUSSIAN8_RANGES[scale]
    return np.linspace(lo, hi, 8)


def gaussian8(scale: int) -> List[np.ndarray]:
    return [gaussian_isotropic(float(w), GAUSSIAN8_SIDE) for w in gaussian8_widths(scale)]


def gaussian8_named(scale: int) -> List[NamedKernel]:
    return [(f"g8_{i}_w{w:.4f}", k) for i, (w, k) in enumerate(zip(gaussian8_widths(scale), gaussian8(scale)))]


def resolve_kernels(spec: str, scale: int) -> List[NamedKernel]:
    """
    --kernels 값을 (ID, 커널) 목록으로 바꿉니다.
    'gaussian8' 또는 쉼표로 구분한 커널 파일 경로를 받습니다.
    """
    if spec == "gaussian8":
        return gaussian8_named(scale)
    kernels = []
    for item in spec.split(","):
        path = Path(item.strip())
        kernels.append((path.stem, load_kernel(path)))
    return kernels


def _row_seeds(seed: int, n: int) -> List[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def _format(value: Optional[float], spec: str) -> str:
    if value is None:
        return ""
    if value == float("inf"):
        return "inf"
    return format(value, spec)


class BenchmarkRunner:
    """
    HR 디렉토리 x 커널 목록의 모든 조합에 대해 LR 합성, 복원, 평가를 수행하는 벤치마크 클래스.
    행마다 독립 시드를 쓰므로 스레드 수와 무관하게 결과가 같습니다.
    """

    def __init__(self, solver: SolverFacade, scale: int, iterations: int = 4, noise_sigma: float = 0.0,
                 noise_is_variance: bool = False, seed: int = 0, threads: int = 1, timing: bool = True):
        self.solver = solver
        self.scale = scale
        self.iterations = iterations
        self.seed = seed
        self.threads = max(1, threads)
        self.timing = timing
        self.degrader = Degrader({"scale": scale, "noise_sigma": noise_sigma,
                                  "noise_is_variance": noise_is_variance, "seed": seed})
        logger.info(f"BenchmarkRunner 초기화 완료: solver={solver.solver}, scale={scale}, T={iterations}, "
                    f"threads={self.threads}")

    def _run_row(self, image_id: str, hr: np.ndarray, kernel_id: str, kernel: np.ndarray, seed: int) -> BenchRow:
        try:
            pair = self.degrader.synthesize(hr, kernel, seed=seed)
            start = time.perf_counter()
            result = self.solver.solve(pair["lr"], self.scale, self.iterations)
            elapsed = (time.perf_counter() - start) * 1000.0 if self.timing else 0.0
            return BenchRow(
                image=image_id,
                kernel=kernel_id,
                psnr_db=psnr_y(result.image, pair["hr"], border=self.scale),
                ssim=ssim_y(result.image, pair["hr"], border=self.scale),
                kernel_l1=kernel_l1_reduced(result.reduced_kernel, kernel, self.solver.basis),
                ms=elapsed,
            )
        except Exception as e:
            logger.warning(f"벤치마크 행 실패 ({image_id}, {kernel_id}): {e}")
            return BenchRow(image=image_id, kernel=kernel_id, error=str(e))

    def run(self, hr_dir: Union[str, Path], kernels: Sequence[NamedKernel]) -> BenchReport:
        if not kernels:
            raise ValueError("커널 목록이 비어 있습니다.")
        images = ImageStream(hr_dir).load_all()
        jobs = [(image_id, hr, kernel_id, kernel) for image_id, hr in images for kernel_id, kernel in kernels]
        seeds = _row_seeds(self.seed, len(jobs))
        logger.info(f"벤치마크 시작: 이미지 {len(images)}장 x 커널 {len(kernels)}개 = {len(jobs)}행")

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [pool.submit(self._run_row, *job, seed) for job, seed in zip(jobs, seeds)]
            rows = [f.result() for f in futures]

        rows.sort(key=lambda r: (r.image, r.kernel))
        report = BenchReport(rows=rows, config={
            "solver": self.solver.solver,
            "scale": self.scale,
            "iterations": self.iterations,
            "noise_sigma": self.degrader.config.noise_sigma,
            "noise_is_variance": self.degrader.config.noise_is_variance,
            "seed": self.seed,
            "kernels": [kernel_id for kernel_id, _ in kernels],
        })
        means = report.means()
        logger.success(f"벤치마크 완료: 평균 PSNR={means['psnr_db']}, 실패 {means['failed']}행")
        return report


def run_benchmark(hr_dir: Union[str, Path], scale: int, kernels: Sequence[NamedKernel], solver: SolverFacade,
                  iterations: int = 4, **kwargs: Any) -> BenchReport:
    return BenchmarkRunner(solver, scale, iterations, **kwargs).run(hr_dir, kernels)


def write_report_csv(report: BenchReport, path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in report.rows:
            writer.writerow([
                row.image,
                row.kernel,
                _format(row.psnr_db, ".6f"),
                _format(row.ssim, ".6f"),
                _format(row.kernel_l1, ".6e"),
                _format(row.ms, ".1f"),
            ])


def write_report_json(report: BenchReport, path: Union[str, Path]):
    payload: Dict[str, Any] = {"config": report.config, "means": report.means(),
                               "failed_rows": [r.model_dump() for r in report.rows if r.failed]}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_iteration_study(hr_dir: Union[str, Path], scale: int, kernels: Sequence[NamedKernel], solver: SolverFacade,
                        max_iters: int = 7, seed: int = 0, estimator_first: bool = False) -> List[Tuple[int, float]]:
    """
    T = 1..max_iters 각각의 평균 PSNR.
    교대 루프는 결정적이므로 T=max_iters 한 번의 추적에서 앞쪽 T개 기록을 사용합니다.
    """
    if max_iters < 1:
        raise ValueError(f"최대 반복 횟수는 1 이상이어야 합니다: {max_iters}")
    degrader = Degrader({"scale": scale, "seed": seed})
    sums = np.zeros(max_iters)
    count = 0
    for image_id, hr in ImageStream(hr_dir).get_images():
        for kernel_id, kernel in kernels:
            pair = degrader.synthesize(hr, kernel)
            trace = solver.solve(pair["lr"], scale, max_iters, estimator_first=estimator_first).trace
            psnrs = [psnr_y(rec.image, pair["hr"], border=scale) for rec in trace.records]
            sums += psnrs
            count += 1
            logger.debug(f"반복 연구 {image_id}/{kernel_id}: PSNR(T=1)={psnrs[0]:.3f}, PSNR(T={max_iters})={psnrs[-1]:.3f}")
    study = [(t, float(sums[t - 1] / count)) for t in range(1, max_iters + 1)]
    logger.success("반복 연구 완료: " + ", ".join(f"T={t}: {p:.3f}dB" for t, p in study))
    return study


def write_iteration_csv(study: Sequence[Tuple[int, float]], path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["iters", "psnr_db"])
        for t, psnr in study:
            writer.writerow([t, f"{psnr:.6f}"])


def bicubic_baseline_psnr(hr: np.ndarray, lr: np.ndarray, scale: int) -> float:
    """identity-bicubic 솔버와 비교하기 위한 직접 bicubic 평가."""
    return psnr_y(bicubic_resize(lr, scale), hr, border=scale)

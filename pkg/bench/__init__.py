from .benchmark import (
    BenchmarkRunner,
    gaussian8,
    gaussian8_widths,
    resolve_kernels,
    run_benchmark,
    run_iteration_study,
    write_iteration_csv,
    write_report_csv,
    write_report_json,
)
from .metrics import kernel_l1_reduced, psnr_y, ssim_y

__all__ = [
    "BenchmarkRunner",
    "gaussian8",
    "gaussian8_widths",
    "kernel_l1_reduced",
    "psnr_y",
    "resolve_kernels",
    "run_benchmark",
    "run_iteration_study",
    "ssim_y",
    "write_iteration_csv",
    "write_report_csv",
    "write_report_json",
]

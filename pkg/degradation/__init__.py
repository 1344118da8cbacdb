from .degrade import add_awgn, blur_down, blur_down_adjoint, convolve2d, degrade, downsample_s, l1_residual
from .degrade_facade import Degrader
from .kernels import (
    check_kernel,
    dirac,
    gaussian_anisotropic,
    gaussian_isotropic,
    make_rng,
    sample_training_kernel,
)

__all__ = [
    "Degrader",
    "add_awgn",
    "blur_down",
    "blur_down_adjoint",
    "check_kernel",
    "convolve2d",
    "degrade",
    "dirac",
    "downsample_s",
    "gaussian_anisotropic",
    "gaussian_isotropic",
    "l1_residual",
    "make_rng",
    "sample_training_kernel",
]

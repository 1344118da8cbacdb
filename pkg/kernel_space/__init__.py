from .pca import (
    PcaBasis,
    ReducedKernel,
    build_basis,
    fit_pca,
    load_basis,
    project,
    reconstruct,
    reconstruct_linear,
    save_basis,
)

__all__ = [
    "PcaBasis",
    "ReducedKernel",
    "build_basis",
    "fit_pca",
    "load_basis",
    "project",
    "reconstruct",
    "reconstruct_linear",
    "save_basis",
]

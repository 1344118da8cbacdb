from .cg_restorer import CgResult, adjoint_check, refine_restore_l1, restore_cg, restore_cg_detailed
from .classical import ClassicalEstimator, ClassicalRestorer
from .ls_estimator import estimate_kernel_ls, estimate_kernel_reduced, refine_kernel_l1
from .simplex import project_simplex

__all__ = [
    "CgResult",
    "ClassicalEstimator",
    "ClassicalRestorer",
    "adjoint_check",
    "estimate_kernel_ls",
    "estimate_kernel_reduced",
    "project_simplex",
    "refine_kernel_l1",
    "refine_restore_l1",
    "restore_cg",
    "restore_cg_detailed",
]

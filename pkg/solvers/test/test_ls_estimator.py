import numpy as np
import pytest

from core.errors import DegenerateSystemError, ShapeMismatchError
from core.models import LsEstimatorConfig
from degradation.degrade import blur_down, l1_residual
from degradation.kernels import dirac, gaussian_anisotropic, gaussian_isotropic
from kernel_space.pca import fit_pca, project, reconstruct, reconstruct_linear
from solvers.ls_estimator import estimate_kernel_ls, estimate_kernel_reduced, kernel_normal_equations, refine_kernel_l1
from solvers.simplex import project_simplex


@pytest.mark.parametrize("cfg", [LsEstimatorConfig(ridge=0.0, simplex_project=True), LsEstimatorConfig()])
def test_least_squares_recovers_true_kernel(cfg):
    rng = np.random.default_rng(21)
    for _ in range(20):
        hr = rng.random((1, 64, 64))
        k = gaussian_anisotropic(*rng.uniform(0.8, 3.0, size=2), rng.uniform(-3.0, 3.0),
                                 noise_frac=0.25, seed=rng)
        lr = blur_down(hr, k, 2)
        np.testing.assert_allclose(estimate_kernel_ls(lr, hr, 11, cfg, scale=2), k, atol=1e-8)


def test_normal_equations_match_explicit_design_matrix(rng):
    hr = rng.random((1, 12, 12))
    side, s = 3, 2
    columns = []
    for j in range(side * side):
        e = np.zeros(side * side)
        e[j] = 1.0
        columns.append(blur_down(hr, e.reshape(side, side), s).ravel())
    design = np.stack(columns, axis=1)
    lr = rng.random((1, 6, 6))
    ata, aty = kernel_normal_equations(lr, hr, side, s)
    np.testing.assert_allclose(ata, design.T @ design, atol=1e-12)
    np.testing.assert_allclose(aty, design.T @ lr.ravel(), atol=1e-12)


def test_constant_sr_is_degenerate():
    with pytest.raises(DegenerateSystemError):
        estimate_kernel_ls(np.full((1, 16, 16), 0.5), np.full((1, 32, 32), 0.5), 5, scale=2)


def test_shape_mismatch(rng):
    with pytest.raises(ShapeMismatchError):
        estimate_kernel_ls(rng.random((1, 16, 16)), rng.random((1, 30, 32)), 5, scale=2)


def test_projection_gives_valid_kernel_under_noise(rng):
    hr = rng.random((1, 48, 48))
    lr = blur_down(hr, gaussian_isotropic(1.2, 7), 2) + 0.01 * rng.standard_normal((1, 24, 24))
    k = estimate_kernel_ls(lr, hr, 7, LsEstimatorConfig(ridge=1e-3), scale=2)
    assert k.min() >= 0.0
    assert k.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("cfg", [LsEstimatorConfig(ridge=0.0), LsEstimatorConfig()])
def test_reduced_estimate_recovers_in_span_kernel(rng, cfg):
    kernels = [gaussian_isotropic(w, 11) for w in np.linspace(0.6, 2.5, 8)]
    basis = fit_pca(kernels, 7)
    hr = rng.random((1, 48, 48))
    k = kernels[3]
    lr = blur_down(hr, k, 2)
    est = estimate_kernel_reduced(lr, hr, basis, cfg, scale=2)
    np.testing.assert_allclose(est.coeffs, project(basis, k).coeffs, atol=1e-6)


@pytest.mark.parametrize("ridge", [0.0, 1e-3])
def test_complete_basis_matches_full_tap_solve(rng, ridge):
    kernels = [gaussian_anisotropic(*rng.uniform(0.7, 2.0, size=2), rng.uniform(-3.0, 3.0),
                                    noise_frac=0.25, seed=rng, side=5) for _ in range(40)]
    basis = fit_pca(kernels, 25)
    hr = rng.random((1, 40, 40))
    lr = blur_down(hr, kernels[0], 2) + 0.01 * rng.standard_normal((1, 20, 20))
    cfg = LsEstimatorConfig(ridge=ridge, simplex_project=False)
    # ridge가 k = 0에 해당하는 계수 −C·mean으로 당기면 전체 탭 ridge와 같은 문제가 됩니다.
    est = estimate_kernel_reduced(lr, hr, basis, cfg, scale=2, center=-basis.components @ basis.mean)
    full = estimate_kernel_ls(lr, hr, 5, cfg, scale=2)
    np.testing.assert_allclose(reconstruct_linear(basis, est.coeffs), full, rtol=0, atol=1e-8)


def test_l1_kernel_refinement_never_increases_residual(rng):
    kernels = [gaussian_isotropic(w, 11) for w in np.linspace(0.6, 2.5, 12)]
    basis = fit_pca(kernels, 6)
    hr = rng.random((1, 40, 40))
    lr = blur_down(hr, kernels[5], 2) + 0.02 * rng.standard_normal((1, 20, 20))
    start = project(basis, dirac(11))
    refined = refine_kernel_l1(lr, hr, basis, start, scale=2)
    before = l1_residual(hr, reconstruct(basis, start), lr, 2)
    after = l1_residual(hr, reconstruct(basis, refined), lr, 2)
    assert after < before


def test_l1_kernel_refinement_stays_at_optimum(rng):
    kernels = [gaussian_isotropic(w, 11) for w in np.linspace(0.6, 2.5, 12)]
    basis = fit_pca(kernels, 6)
    hr = rng.random((1, 40, 40))
    lr = blur_down(hr, kernels[4], 2)
    start = project(basis, kernels[4])
    refined = refine_kernel_l1(lr, hr, basis, start, scale=2)
    assert l1_residual(hr, reconstruct(basis, refined), lr, 2) <= l1_residual(hr, reconstruct(basis, start), lr, 2)


@pytest.mark.parametrize("v, expected", [
    ([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]),
    ([2.0, 0.0], [1.0, 0.0]),
    ([1.0, 1.0, 1.0], [1 / 3, 1 / 3, 1 / 3]),
    ([0.5, 0.4, -1.0], [0.55, 0.45, 0.0]),
])
def test_project_simplex(v, expected):
    np.testing.assert_allclose(project_simplex(np.array(v)), expected, atol=1e-12)


def test_project_simplex_is_closest_point(rng):
    v = rng.standard_normal(25)
    w = project_simplex(v)
    for _ in range(200):
        other = rng.dirichlet(np.ones(25))
        assert np.sum((v - w) ** 2) <= np.sum((v - other) ** 2) + 1e-12

import numpy as np
import pytest

from core.errors import BasisError
from degradation.kernels import gaussian_anisotropic, gaussian_isotropic
from kernel_space.pca import (
    ReducedKernel,
    build_basis,
    fit_pca,
    load_basis,
    project,
    reconstruct,
    reconstruct_linear,
    save_basis,
)


@pytest.fixture(scope="module")
def small_basis():
    rng = np.random.default_rng(0)
    kernels = [gaussian_anisotropic(*rng.uniform(0.7, 3.0, size=2), rng.uniform(-3, 3)) for _ in range(200)]
    return fit_pca(kernels, 8)


def test_components_are_orthonormal(small_basis):
    gram = small_basis.components @ small_basis.components.T
    np.testing.assert_allclose(gram, np.eye(small_basis.m), atol=1e-10)


def test_sign_convention_largest_entry_positive(small_basis):
    for row in small_basis.components:
        assert row[np.argmax(np.abs(row))] > 0


def test_in_span_round_trip(small_basis, rng):
    coeffs = rng.standard_normal(small_basis.m) * 1e-3
    k = reconstruct_linear(small_basis, coeffs)
    np.testing.assert_allclose(project(small_basis, k).coeffs, coeffs, atol=1e-10)


def test_training_samples_recovered_when_basis_is_complete():
    kernels = [gaussian_isotropic(w, 11) for w in np.linspace(0.6, 2.5, 8)]
    basis = fit_pca(kernels, 7)
    for k in kernels:
        np.testing.assert_allclose(reconstruct(basis, project(basis, k)), k, atol=1e-10)


def test_mean_kernel_projects_to_zero(small_basis):
    mean = small_basis.mean.reshape(small_basis.side, small_basis.side)
    np.testing.assert_allclose(project(small_basis, mean).coeffs, 0.0, atol=1e-14)


def test_reconstruct_is_valid_kernel(small_basis, rng):
    k = reconstruct(small_basis, ReducedKernel(rng.standard_normal(small_basis.m) * 0.05))
    assert k.min() >= 0.0
    assert k.sum() == pytest.approx(1.0, abs=1e-12)


def test_explained_variance_of_isotropic_family():
    basis = build_basis(setting=1, scale=4, m=10, n=10_000, seed=0)
    assert basis.side == 21
    assert basis.explained_variance_ratio() > 0.999


def test_fit_requires_enough_samples():
    with pytest.raises(BasisError):
        fit_pca([gaussian_isotropic(1.0, 5)] * 3, 4)


def test_project_rejects_wrong_side(small_basis):
    with pytest.raises(BasisError):
        project(small_basis, gaussian_isotropic(1.0, 21))


def test_basis_file_round_trip(small_basis, tmp_path):
    save_basis(small_basis, tmp_path / "b.pcab")
    loaded = load_basis(tmp_path / "b.pcab")
    assert (loaded.side, loaded.m) == (small_basis.side, small_basis.m)
    np.testing.assert_array_equal(loaded.mean, small_basis.mean)
    np.testing.assert_array_equal(loaded.components, small_basis.components)


def test_basis_file_corruption(small_basis, tmp_path):
    path = tmp_path / "b.pcab"
    save_basis(small_basis, path)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(BasisError):
        load_basis(path)
    path.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(BasisError):
        load_basis(path)

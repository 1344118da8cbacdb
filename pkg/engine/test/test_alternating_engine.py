import numpy as np
import pytest

from bench.metrics import psnr_y
from core.errors import AlternationError, BasisError
from core.image import bicubic_resize
from degradation.degrade import blur_down
from degradation.kernels import dirac, gaussian_isotropic
from engine.alternating_engine import AlternationTrace, data_residual, run_alternation
from engine.solver_facade import SolverFacade
from kernel_space.pca import PcaBasis, ReducedKernel, fit_pca, project


@pytest.fixture(scope="module")
def basis():
    kernels = [gaussian_isotropic(w, 11) for w in np.linspace(0.3, 2.2, 60)]
    return fit_pca(kernels, 6)


class RecordingEstimator:
    """SR 평균에 따라 결정적으로 계수를 돌려주고 호출 순서를 기록합니다."""

    def __init__(self, log):
        self.log = log

    def __call__(self, lr, sr, basis, scale):
        self.log.append("E")
        coeffs = np.zeros(basis.m)
        coeffs[0] = 1e-3 * float(sr.mean())
        return ReducedKernel(coeffs)


class RecordingRestorer:
    def __init__(self, log):
        self.log = log

    def __call__(self, lr, r, basis, scale):
        self.log.append("R")
        return bicubic_resize(lr, scale) + r.coeffs[0]


def test_single_iteration_is_restorer_then_estimator(basis, rng):
    lr = rng.random((1, 12, 12))
    log = []
    trace = run_alternation(lr, basis, RecordingEstimator(log), RecordingRestorer(log), 2, iterations=1)
    assert log == ["R", "E"]
    init = project(basis, dirac(11))
    np.testing.assert_allclose(trace.final_image, bicubic_resize(lr, 2) + init.coeffs[0])
    assert trace.iterations == 1


def test_estimator_first_ordering(basis, rng):
    log = []
    run_alternation(rng.random((1, 12, 12)), basis, RecordingEstimator(log), RecordingRestorer(log), 2,
                    iterations=2, estimator_first=True)
    assert log == ["E", "R", "E", "R"]


def test_trace_prefix_property(basis, rng):
    lr = rng.random((1, 12, 12))
    long = run_alternation(lr, basis, RecordingEstimator([]), RecordingRestorer([]), 2, iterations=5)
    short = run_alternation(lr, basis, RecordingEstimator([]), RecordingRestorer([]), 2, iterations=3)
    for a, b in zip(long.prefix(3).records, short.records):
        np.testing.assert_array_equal(a.image, b.image)
        np.testing.assert_array_equal(a.kernel.coeffs, b.kernel.coeffs)
        assert a.residual == b.residual


def test_observation_is_read_only(basis, rng):
    def mutating_restorer(lr, r, basis, scale):
        lr[0, 0, 0] = 0.0
        return bicubic_resize(lr, scale)

    lr = rng.random((1, 12, 12))
    before = lr.copy()
    with pytest.raises(AlternationError) as info:
        run_alternation(lr, basis, RecordingEstimator([]), mutating_restorer, 2)
    assert info.value.iteration == 1
    assert info.value.stage == "Restorer"
    np.testing.assert_array_equal(lr, before)


def test_invalid_iteration_count(basis, rng):
    with pytest.raises(ValueError):
        run_alternation(rng.random((1, 12, 12)), basis, RecordingEstimator([]), RecordingRestorer([]), 2, 0)


def test_data_residual_zero_for_exact_pair(rng):
    x = rng.random((1, 16, 16))
    k = gaussian_isotropic(1.1, 11)
    assert data_residual(x, k, blur_down(x, k, 2), 2) == 0.0


def test_trace_csv(basis, rng, tmp_path):
    trace = run_alternation(rng.random((1, 12, 12)), basis, RecordingEstimator([]), RecordingRestorer([]), 2, 2)
    trace.write_csv(tmp_path / "trace.csv")
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "iter,residual_l1," + ",".join(f"c{j}" for j in range(basis.m))
    assert len(lines) == 3


def test_classical_alternation_monotone_and_beats_bicubic(basis, textured):
    rng = np.random.default_rng(5)
    solver = SolverFacade("classical", basis, {"lambda": 1e-4, "cg_iters": 200})
    wins = 0
    progressed = 0
    for i in range(20):
        hr = textured(48, 48, seed=100 + i)
        k = gaussian_isotropic(float(rng.uniform(0.8, 1.6)), 11)
        lr = blur_down(hr, k, 2)
        result = solver.solve(lr, 2, iterations=6)
        residuals = np.array(result.trace.residuals)
        assert len(residuals) == 6
        assert np.all(np.diff(residuals) <= 1e-9)
        moved = not np.array_equal(result.trace.records[0].image, result.image)
        progressed += bool(residuals[-1] < residuals[0]) and moved
        wins += psnr_y(result.image, hr, border=2) > psnr_y(bicubic_resize(lr, 2), hr, border=2)
    assert wins >= 19
    assert progressed >= 15


def test_solver_modes(basis, textured):
    hr = textured(32, 32, seed=1)
    k = gaussian_isotropic(1.2, 11)
    lr = blur_down(hr, k, 2)
    solver = SolverFacade("classical", basis)
    two_step = solver.solve(lr, 2, mode="two-step")
    known = solver.solve(lr, 2, mode="gt-kernel", gt_kernel=k)
    assert two_step.trace.iterations == known.trace.iterations == 1
    assert known.image.shape == hr.shape
    np.testing.assert_allclose(known.reduced_kernel.coeffs, project(basis, k).coeffs)
    with pytest.raises(ValueError):
        solver.solve(lr, 2, mode="gt-kernel")
    with pytest.raises(ValueError):
        solver.solve(lr, 2, mode="sideways")


def test_identity_bicubic_solver(basis, rng):
    lr = rng.random((3, 12, 12))
    result = SolverFacade("identity-bicubic", basis).solve(lr, 2, iterations=3)
    np.testing.assert_array_equal(result.image, bicubic_resize(lr, 2))
    np.testing.assert_array_equal(result.reduced_kernel.coeffs, np.zeros(basis.m))


def test_unknown_solver(basis):
    with pytest.raises(ValueError):
        SolverFacade("magic", basis)
    with pytest.raises(ValueError):
        SolverFacade("neural", basis)


def test_empty_trace_has_no_records():
    assert AlternationTrace().iterations == 0


class WarmRecordingEstimator:
    warm_start = True

    def __init__(self):
        self.inits = []
        self.returned = []

    def __call__(self, lr, sr, basis, scale, init=None):
        self.inits.append(init)
        out = ReducedKernel(np.array(init.coeffs, dtype=np.float64))
        self.returned.append(out)
        return out


class WarmRecordingRestorer:
    warm_start = True

    def __init__(self):
        self.inits = []
        self.returned = []

    def __call__(self, lr, r, basis, scale, init=None):
        self.inits.append(init)
        out = (bicubic_resize(lr, scale) if init is None else init) + 1e-3
        self.returned.append(out)
        return out


def test_warm_start_state_is_passed_to_opted_in_solvers(basis, rng):
    est, res = WarmRecordingEstimator(), WarmRecordingRestorer()
    run_alternation(rng.random((1, 12, 12)), basis, est, res, 2, iterations=3)
    assert res.inits[0] is None
    assert res.inits[1] is res.returned[0]
    assert res.inits[2] is res.returned[1]
    np.testing.assert_allclose(est.inits[0].coeffs, project(basis, dirac(11)).coeffs)
    assert est.inits[1] is est.returned[0]
    assert est.inits[2] is est.returned[1]


def test_solvers_without_warm_start_get_no_init(basis, rng):
    est = WarmRecordingEstimator()
    trace = run_alternation(rng.random((1, 12, 12)), basis, est, RecordingRestorer([]), 2, iterations=2)
    assert trace.iterations == 2
    assert len(est.inits) == 2


def test_degenerate_reconstruction_reports_iteration(rng):
    flat = PcaBasis(side=3, m=1, mean=np.full(9, 1 / 9), components=np.full((1, 9), 1 / 3))

    class CollapsingEstimator:
        def __call__(self, lr, sr, basis, scale):
            return ReducedKernel(np.array([-1.0]))

    with pytest.raises(AlternationError) as info:
        run_alternation(rng.random((1, 8, 8)), flat, CollapsingEstimator(), RecordingRestorer([]), 2)
    assert info.value.iteration == 1
    assert info.value.stage == "Residual"
    assert isinstance(info.value.cause, BasisError)


def test_classical_estimator_first_is_monotone(basis, textured):
    hr = textured(48, 48, seed=7)
    lr = blur_down(hr, gaussian_isotropic(1.3, 11), 2)
    result = SolverFacade("classical", basis).solve(lr, 2, iterations=4, estimator_first=True)
    assert np.all(np.diff(result.trace.residuals) <= 1e-9)

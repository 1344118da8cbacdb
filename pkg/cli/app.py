import argparse
import csv
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from loguru import logger

from config.config import get_config, load_config_file, merge_config, resolve_threads
from core.errors import BlindSRError
from core.image_io import load_image, load_kernel, save_image, save_kernel
from core.log_setup import configure_logging
from core.models import CliConfig, DanConfig, TrainConfig
from degradation.degrade_facade import Degrader
from kernel_space.pca import build_basis, load_basis, save_basis
from .comparison import emit_comparison


# train-toy가 체크포인트 옆에 기록하는 기저 파일 확장자
BASIS_SUFFIX = ".pcab"


class UsageError(Exception):
    """잘못된 명령행 사용 (종료 코드 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# 공통 헬퍼
# --------------------------------------------------------------------------
def _solver_overrides(args) -> Dict[str, Any]:
    return {"classical": {
        "lambda": getattr(args, "lam", None),
        "ridge": getattr(args, "ridge", None),
        "cg_iters": getattr(args, "cg_iters", None),
        "cg_tol": getattr(args, "cg_tol", None),
    }}


def _basis_path(args) -> Path:
    """--basis가 없으면 --ckpt 옆에 train-toy가 저장한 기저(.pcab)를 씁니다."""
    if args.basis:
        return Path(args.basis)
    if getattr(args, "ckpt", None):
        return Path(args.ckpt).with_suffix(BASIS_SUFFIX)
    raise UsageError("--basis가 필요합니다 (neural 솔버는 --ckpt 옆의 .pcab 기저를 기본으로 사용).")


def _make_solver(args, config: Dict[str, Any]):
    from engine.solver_facade import SolverFacade

    basis = load_basis(_basis_path(args))
    model = None
    if args.solver == "neural":
        if not args.ckpt:
            raise ValueError("--solver neural에는 --ckpt가 필요합니다.")
        from neural.checkpoint import load_checkpoint
        model = load_checkpoint(args.ckpt)
        if model.config.scale != args.scale:
            raise ValueError(f"체크포인트 배율({model.config.scale})이 --scale {args.scale}과 다릅니다.")
    return SolverFacade(args.solver, basis, config["classical"], model=model)


def _parse_rect(text: Optional[str]):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"--inset은 'x,y,w,h' 형식이어야 합니다: {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--inset 값은 정수여야 합니다: {text!r}")


# --------------------------------------------------------------------------
# 하위 명령
# --------------------------------------------------------------------------
def _cmd_gen_kernel(args, config):
    side = args.side if args.side is not None else (11 if args.setting == 2 else 21)
    kernel = Degrader.make_kernel(args.setting, side, width=args.width, sig1=args.sig1, sig2=args.sig2,
                                  theta=args.theta, noise_frac=args.noise_frac, seed=args.seed)
    save_kernel(kernel, args.out)
    logger.success(f"커널 저장: {args.out} (setting={args.setting}, side={side})")


def _cmd_pca_fit(args, config):
    pca = config["pca"]
    basis = build_basis(args.setting, args.scale, m=pca["m"], n=pca["n_samples"], seed=args.seed, side=args.side)
    save_basis(basis, args.out)
    logger.success(f"기저 저장: {args.out} (side={basis.side}, m={basis.m}, "
                   f"설명 분산={basis.explained_variance_ratio():.6f})")


def _cmd_degrade(args, config):
    hr = load_image(args.input)
    kernel = load_kernel(args.kernel)
    degrader = Degrader({**config["degradation"], "scale": args.scale, "seed": args.seed})
    pair = degrader.synthesize(hr, kernel)
    save_image(pair["lr"], args.out)
    if args.out_hr:
        save_image(pair["hr"], args.out_hr)
    logger.success(f"LR 저장: {args.out} {pair['lr'].shape}")


def _cmd_solve(args, config):
    lr = load_image(args.input)
    solver = _make_solver(args, config)
    gt_kernel = load_kernel(args.kernel) if args.kernel else None
    result = solver.solve(lr, args.scale, config["engine"]["iterations"], mode=args.mode,
                          estimator_first=config["engine"]["estimator_first"], gt_kernel=gt_kernel)
    save_image(result.image, args.out)
    if args.trace:
        result.trace.write_csv(args.trace)
    if args.out_kernel:
        save_kernel(result.kernel, args.out_kernel)
    logger.success(f"복원 완료: {args.out} (mode={args.mode}, 최종 잔차={result.trace.residuals[-1]:.6e})")


def _cmd_train_toy(args, config):
    from input_adapter.input_facade import InputAdapter
    from neural.checkpoint import save_checkpoint
    from neural.trainer import train_toy

    hyper = TrainConfig(**{**config["train"], "seed": args.seed})
    adapter = InputAdapter(args.hr, scale=args.scale, crop=hyper.crop, channels=args.channels)
    if args.basis:
        basis = load_basis(args.basis)
    else:
        pca = config["pca"]
        basis = build_basis(hyper.setting, args.scale, m=pca["m"], n=pca["n_samples"], seed=0)
        basis_path = Path(args.out).with_suffix(BASIS_SUFFIX)
        save_basis(basis, basis_path)
        logger.info(f"--basis 미지정: 학습용 기저를 새로 적합해 {basis_path}에 저장했습니다.")
    preset = DanConfig.full if config["dan"]["preset"] == "full" else DanConfig.toy
    dan_cfg = preset(scale=args.scale, channels=args.channels, iterations=config["engine"]["iterations"],
                     pca_dim=basis.m, res_cond_ch=basis.m)
    result = train_toy(adapter.images, dan_cfg, hyper, basis, threads=config["runtime"]["threads"])
    save_checkpoint(result.model, args.out)
    if args.loss_csv:
        with open(args.loss_csv, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["step", "loss"])
            writer.writerows((i, f"{loss:.8f}") for i, loss in enumerate(result.losses, start=1))


def _cmd_bench(args, config):
    from bench.benchmark import BenchmarkRunner, resolve_kernels, write_report_csv, write_report_json

    solver = _make_solver(args, config)
    runner = BenchmarkRunner(
        solver, args.scale, config["engine"]["iterations"],
        noise_sigma=config["degradation"]["noise_sigma"],
        noise_is_variance=config["degradation"]["noise_is_variance"],
        seed=args.seed, threads=config["runtime"]["threads"], timing=config["bench"]["timing"],
    )
    report = runner.run(args.hr, resolve_kernels(config["bench"]["kernels"], args.scale))
    write_report_csv(report, args.out)
    json_path = args.json or str(Path(args.out).with_suffix(".json"))
    write_report_json(report, json_path)
    logger.success(f"벤치마크 보고서 저장: {args.out}, {json_path}")


def _cmd_iter_study(args, config):
    from bench.benchmark import resolve_kernels, run_iteration_study, write_iteration_csv

    solver = _make_solver(args, config)
    study = run_iteration_study(args.hr, args.scale, resolve_kernels(config["bench"]["kernels"], args.scale),
                                solver, max_iters=args.max_iters, seed=args.seed,
                                estimator_first=config["engine"]["estimator_first"])
    write_iteration_csv(study, args.out)


def _cmd_compare(args, config):
    labels = args.labels or [Path(p).stem for p in args.images]
    if len(labels) != len(args.images):
        raise UsageError(f"--labels 개수({len(labels)})가 --images 개수({len(args.images)})와 다릅니다.")
    labeled = [(label, load_image(path)) for label, path in zip(labels, args.images)]
    emit_comparison(labeled, args.out, inset=_parse_rect(args.inset), align=args.align, gutter=args.gutter)


COMMANDS: Dict[str, Callable] = {
    "gen-kernel": _cmd_gen_kernel,
    "pca-fit": _cmd_pca_fit,
    "degrade": _cmd_degrade,
    "solve": _cmd_solve,
    "train-toy": _cmd_train_toy,
    "bench": _cmd_bench,
    "iter-study": _cmd_iter_study,
    "compare": _cmd_compare,
}


# --------------------------------------------------------------------------
# 인자 파서
# --------------------------------------------------------------------------
def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--basis", help="PCAB 기저 파일 (neural 솔버는 생략 시 --ckpt 옆의 .pcab)")
    p.add_argument("--solver", choices=["classical", "neural", "identity-bicubic"], default="classical")
    p.add_argument("--ckpt", help="neural 솔버용 DANW 체크포인트")
    p.add_argument("--iters", type=int, help="교대 반복 횟수 T")
    p.add_argument("--estimator-first", action="store_true", default=None, help="Estimator를 먼저 실행")
    p.add_argument("--lambda", dest="lam", type=float, help="CG 복원기 정칙화 가중치")
    p.add_argument("--ridge", type=float, help="LS 추정기 ridge 가중치")
    p.add_argument("--cg-iters", type=int, help="CG 최대 반복 횟수")
    p.add_argument("--cg-tol", type=float, help="CG 상대 잔차 허용 오차")


def _add_noise_flags(p: argparse.ArgumentParser):
    p.add_argument("--sigma", "--noise", dest="noise", type=float, help="AWGN 세기 (0-255 코드 단위)")
    p.add_argument("--noise-variance", action="store_true", default=None, help="--sigma를 분산으로 해석")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="난수 시드")
    common.add_argument("--threads", type=int, help="워커 수 (기본: BLINDSR_THREADS 또는 CPU 코어 수)")
    common.add_argument("--verbose", action="store_true", help="DEBUG 로그 출력")
    common.add_argument("--config", help="key=value 설정 파일")

    parser = _Parser(prog="blindsr", description="블라인드 초해상도 툴킷")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("gen-kernel", parents=[common], help="블러 커널 생성")
    p.add_argument("--setting", type=int, choices=[0, 1, 2], required=True, help="0: Dirac, 1: 등방성, 2: 비등방성")
    p.add_argument("--width", type=float, help="등방성 커널 폭")
    p.add_argument("--sig1", type=float)
    p.add_argument("--sig2", type=float)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--noise-frac", type=float, default=0.0)
    p.add_argument("--side", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pca-fit", parents=[common], help="커널 PCA 기저 적합")
    p.add_argument("--setting", type=int, choices=[1, 2], default=1)
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--m", type=int, help="기저 차원")
    p.add_argument("--n", type=int, help="샘플 커널 수")
    p.add_argument("--side", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("degrade", parents=[common], help="HR 이미지로 LR 합성")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--scale", type=int, required=True)
    _add_noise_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--out-hr", help="modcrop된 HR 저장 경로")

    p = sub.add_parser("solve", parents=[common], help="LR 이미지 복원")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--scale", type=int, required=True)
    _add_solver_flags(p)
    p.add_argument("--mode", choices=["alternating", "two-step", "gt-kernel"], default="alternating")
    p.add_argument("--kernel", help="gt-kernel 모드용 정답 커널")
    p.add_argument("--trace", help="반복별 추적 CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--out-kernel", help="최종 커널 (.txt 또는 .png)")

    p = sub.add_parser("train-toy", parents=[common], help="데스크 규모 DAN 학습")
    p.add_argument("--data", "--hr", dest="hr", required=True, help="HR 이미지 디렉토리")
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--basis", help="PCAB 기저 (생략 시 설정의 m으로 새로 적합해 --out 옆에 .pcab로 저장)")
    p.add_argument("--channels", type=int, choices=[1, 3], default=1)
    p.add_argument("--iters", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--crop", type=int)
    p.add_argument("--setting", type=int, choices=[1, 2])
    p.add_argument("--lr", type=float)
    p.add_argument("--kernel-weight", type=float)
    p.add_argument("--preset", choices=["toy", "full"])
    p.add_argument("--out", required=True, help="DANW 체크포인트 경로")
    p.add_argument("--loss-csv", help="스텝별 손실 CSV")

    p = sub.add_parser("bench", parents=[common], help="벤치마크 실행")
    p.add_argument("--hr", required=True)
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--kernels", help="'gaussian8' 또는 쉼표로 구분한 커널 파일")
    _add_solver_flags(p)
    _add_noise_flags(p)
    p.add_argument("--no-timing", action="store_true", help="ms 열을 0으로 기록 (바이트 단위 재현성)")
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="집계 JSON 경로 (기본: CSV 옆)")

    p = sub.add_parser("iter-study", parents=[common], help="반복 횟수별 평균 PSNR")
    p.add_argument("--hr", required=True)
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--kernels", help="'gaussian8' 또는 쉼표로 구분한 커널 파일")
    _add_solver_flags(p)
    p.add_argument("--max-iters", type=int, default=7)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", parents=[common], help="비교 그리드 이미지 생성")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--labels", nargs="+")
    p.add_argument("--inset", help="줌 영역 'x,y,w,h'")
    p.add_argument("--align", action="store_true", help="크기가 다르면 bicubic으로 첫 이미지에 맞춤")
    p.add_argument("--gutter", type=int, default=8)
    p.add_argument("--out", required=True)
    return parser


def _flag_overrides(args) -> Dict[str, Any]:
    """명령행 플래그를 설정 딕셔너리 형태로 모읍니다. 지정하지 않은 플래그(None)는 무시됩니다."""
    overrides = _solver_overrides(args)
    overrides["degradation"] = {
        "noise_sigma": getattr(args, "noise", None),
        "noise_is_variance": getattr(args, "noise_variance", None),
    }
    overrides["pca"] = {"m": getattr(args, "m", None), "n_samples": getattr(args, "n", None)}
    overrides["engine"] = {
        "iterations": getattr(args, "iters", None),
        "estimator_first": getattr(args, "estimator_first", None),
    }
    overrides["dan"] = {"preset": getattr(args, "preset", None)}
    overrides["train"] = {
        "steps": getattr(args, "steps", None),
        "batch_size": getattr(args, "batch", None),
        "crop": getattr(args, "crop", None),
        "setting": getattr(args, "setting", None) if args.command == "train-toy" else None,
        "lr": getattr(args, "lr", None),
        "kernel_loss_weight": getattr(args, "kernel_weight", None),
    }
    overrides["bench"] = {
        "kernels": getattr(args, "kernels", None),
        "timing": False if getattr(args, "no_timing", False) else None,
    }
    overrides["runtime"] = {"seed": args.seed, "threads": args.threads}
    return overrides


# --------------------------------------------------------------------------
# 진입점
# --------------------------------------------------------------------------
def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    blindsr 명령을 실행하고 종료 코드를 반환합니다.
    0: 성공, 1: 사용법 오류, 2: 실행 중 오류. 오류 메시지는 표준 에러로 출력합니다.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        cli = CliConfig(command=args.command, seed=args.seed or 0, threads=args.threads,
                        verbose=args.verbose, config_file=args.config)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except ValueError as e:
        print(f"blindsr: error: {e}", file=sys.stderr)
        return 1

    configure_logging(cli.verbose)
    try:
        file_overrides = load_config_file(Path(cli.config_file)) if cli.config_file else None
        config = merge_config(get_config(), file_overrides, _flag_overrides(args))
        config["runtime"]["threads"] = resolve_threads(config["runtime"]["threads"])
        args.seed = config["runtime"]["seed"]
        logger.debug(f"{cli.command} 실행: seed={args.seed}, threads={config['runtime']['threads']}")
        COMMANDS[cli.command](args, config)
    except UsageError as e:
        print(f"blindsr {cli.command}: error: {e}", file=sys.stderr)
        return 1
    except (BlindSRError, OSError, ValueError, RuntimeError) as e:
        logger.error(f"{cli.command} 실패: {e}")
        print(f"blindsr {cli.command}: error: {e}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[List[str]] = None):
    sys.exit(dispatch(argv))

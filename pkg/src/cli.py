"""Command-line entry point: ``python -m src.cli <command> [options]``.

Commands:
    run         single-scene IMD run with trace artifacts
    sweep       IMD sweep over one config axis
    bench       build and save the benchmark only
    train-toy   train the toy denoiser (``--demo`` also runs IMD with it)
    gradcheck   finite-difference check of the toy denoiser gradients
    selftest    mask, voting, occlusion and fixed-point property suites

Exit codes: 0 on success, 1 when a check or run fails, 2 on a bad config or argument.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from .config import OUTPUT_DIR, print_config_summary, validate_config
from .errors import ConfigError, MaskLabError
from .harness import (
    ExperimentConfig,
    build_benchmark,
    build_scene,
    load_config,
    run_selftest,
    run_single,
    run_sweep,
    write_echo,
)
from .harness.selftest import SUITES
from .imd import export_trace, run_imd
from .logging_utils import setup_logging
from .toy import (
    ToyGenerator,
    ToyModelConfig,
    TrainConfig,
    conditioned_iou,
    run_gradcheck,
    save_checkpoint,
    train_toy,
)
from .toy.gradcheck import TINY_MODEL
from .world import save_scenes

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

MAX_SEED = 2 ** 64


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--config", default=default, help="JSON experiment config")
    parser.add_argument("--seed", type=_seed, default=default, help="Root seed (u64), overrides the config")
    parser.add_argument("--out", default=default, help="Output directory")
    parser.add_argument("--quiet", action="store_true", default=default, help="Only warnings and errors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masklab", description="Iterative mask denoising lab")
    _global_flags(parser, None)
    # the same flags are accepted after the command name
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Run IMD on one benchmark scene")
    run.add_argument("--scene", type=int, default=0, help="Scene index within the benchmark")

    sub.add_parser("sweep", parents=[common], help="Run the config's sweep axis")
    sub.add_parser("bench", parents=[common], help="Build and save the benchmark")

    train = sub.add_parser("train-toy", parents=[common], help="Train the toy diffusion denoiser")
    train.add_argument("--epochs", type=int, default=None, help="Override the number of epochs")
    train.add_argument("--observed", action="store_true", help="Train on once-occluded targets only")
    train.add_argument("--no-gate", action="store_true", help="Disable the condition gate")
    train.add_argument("--demo", action="store_true", help="Run one IMD loop with the trained model")

    check = sub.add_parser("gradcheck", parents=[common], help="Finite-difference gradient check")
    check.add_argument("--no-gate", action="store_true", help="Check the ungated model")

    selftest = sub.add_parser("selftest", parents=[common], help="Run property suites")
    selftest.add_argument(
        "--suite", action="append", choices=sorted(SUITES), help="Suite name; repeat to run several"
    )
    return parser


def _experiment(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.model_copy(update={"root_seed": args.seed})
    return cfg


def _out_dir(args, cfg: Optional[ExperimentConfig], name: str) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output_dir:
        return Path(cfg.output_dir)
    return Path(OUTPUT_DIR) / name


def cmd_run(args) -> int:
    cfg = _experiment(args)
    out_dir = _out_dir(args, cfg, "run")
    print(f"🧩 Running IMD on scene {args.scene} (T={cfg.imd.steps_T}, N={cfg.imd.samples_N})...")
    scene, trace = run_single(cfg, out_dir, scene_index=args.scene)
    print(f"   Occlusion rate: {scene.occlusion_rate:.3f}")
    for record in trace.steps:
        print(f"   step {record.step}: delta_iou={record.delta_iou:.4f} iou_truth={record.fused_iou_truth:.4f}")
    for warning in trace.warnings:
        print(f"⚠️  {warning}")
    print(f"✅ Final IoU: {trace.final_iou:.4f}")
    print(f"   Artifacts: {out_dir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _experiment(args)
    if cfg.sweep is None:
        raise ConfigError(args.config or "<defaults>", "config has no 'sweep' section")
    out_dir = _out_dir(args, cfg, "sweep")
    print(f"📊 Sweeping {cfg.sweep.axis} over {cfg.sweep.values} on {cfg.scene_count} scenes...")

    def on_value(label, agg):
        print(
            f"   {cfg.sweep.axis}={label}: final IoU {agg['mean_final_iou']:.4f} "
            f"± {agg['std_final_iou']:.4f}, conv step {agg['mean_conv_step']:.2f}"
        )

    run_sweep(cfg, out_dir, progress=not args.quiet, on_value=on_value)
    print(f"✅ Wrote {out_dir / 'sweep.csv'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _experiment(args)
    out_dir = _out_dir(args, cfg, "bench")
    print(f"🎲 Building {cfg.scene_count} scenes at {cfg.occlusion_rate:.0%} occlusion...")
    scenes = build_benchmark(cfg)
    path = save_scenes(out_dir / "scenes.json", scenes)
    write_echo(cfg, out_dir)
    rates = np.array([s.occlusion_rate for s in scenes])
    print(f"   Achieved rates: {rates.min():.3f} .. {rates.max():.3f}")
    print(f"✅ Saved {path}")
    return EXIT_OK


def _toy_demo(args, model_cfg: ToyModelConfig, train_cfg: TrainConfig, result, out_dir: Path) -> None:
    base = _experiment(args)
    demo_cfg = base.model_copy(
        update={
            "resolution": model_cfg.side,
            "k_range": (1, 1),
            "scale_range": train_cfg.scale_range,
            "rate_tol": 0.05,
            "scene_count": 1,
        }
    )
    scene = build_scene(demo_cfg, 0)
    gen = ToyGenerator(result.model, result.schedule)
    trace = run_imd(scene, gen, demo_cfg.segmenter, demo_cfg.imd.model_copy(update={"workers": 1}))
    export_trace(trace, out_dir / "demo", echo=demo_cfg.echo())
    print(f"   Demo IMD on a {model_cfg.side}x{model_cfg.side} scene: final IoU {trace.final_iou:.4f}")

    rng = np.random.default_rng(train_cfg.seed)
    for kind in ("partial", "intermediate", "complete"):
        score = conditioned_iou(result.model, result.schedule, result.dataset, kind, rng, count=20)
        print(f"   Sample IoU conditioned on {kind} masks: {score:.4f}")


def cmd_train_toy(args) -> int:
    model_cfg = ToyModelConfig(use_gate=not args.no_gate)
    overrides = {"target_mode": "observed" if args.observed else "complete"}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.seed is not None:
        overrides["seed"] = args.seed
    train_cfg = TrainConfig(**overrides)
    out_dir = _out_dir(args, None, "toy")
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"🧠 Training toy denoiser for {train_cfg.epochs} epochs ({train_cfg.target_mode} targets)...")
    result = train_toy(model_cfg, train_cfg, log_path=out_dir / "train_log.csv", progress=not args.quiet)
    last = result.history[-1]
    print(f"   Final epoch: loss_eps={last['loss_eps']:.4f} loss_mask={last['loss_mask']:.4f}")
    meta = {"train": train_cfg.model_dump(mode="json")}
    path = save_checkpoint(out_dir / "checkpoint.json", result.model, result.schedule, meta=meta)
    print(f"✅ Saved {path}")

    if args.demo:
        _toy_demo(args, model_cfg, train_cfg, result, out_dir)
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    config = TINY_MODEL.model_copy(update={"use_gate": not args.no_gate})
    print("🔍 Checking toy denoiser gradients against central differences...")
    report = run_gradcheck(config=config, seed=args.seed or 0)
    for name, err in report.max_rel_error.items():
        status = "✅" if report.failures[name] == 0 else "❌"
        print(f"   {status} {name:<3} max rel error {err:.2e} ({report.failures[name]} failures)")
    print(f"   Checked {report.checked} entries")
    if not report.passed:
        print("❌ Gradient check failed")
        return EXIT_FAILED
    print("✅ All parameter groups pass")
    return EXIT_OK


def cmd_selftest(args) -> int:
    print("🧪 Running property suites...")
    report = run_selftest(seed=args.seed or 0, names=args.suite)
    for suite in report.suites:
        status = "✅" if suite.passed else "❌"
        print(f"   {status} {suite.name}: {suite.cases} checks, {suite.failures} failures")
        for note in suite.notes:
            print(f"      - {note}")
    return EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "train-toy": cmd_train_toy,
    "gradcheck": cmd_gradcheck,
    "selftest": cmd_selftest,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    setup_logging(quiet=bool(args.quiet))
    try:
        validate_config()
    except ValueError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print_config_summary()

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"❌ Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"❌ Invalid settings:\n{e}", file=sys.stderr)
        return EXIT_CONFIG
    except MaskLabError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as e:
        print(f"❌ Invalid arguments: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"❌ I/O error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(cli_main())

"""Command-line interface: fuse images, evaluate datasets, verify dynamics.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .dynamics import classify_regime, continuous_firing_threshold, single_neuron_trace
from .lattice import NeuronParams
from .metrics import MetricReport, evaluate_pair
from .imgio import load_image, save_png
from .pipeline import FusionConfig, run_fusion

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3


def _err(msg: str):
    print(f"error: {msg}", file=sys.stderr)


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _add_param_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--alpha", type=float, default=0.8)
    parser.add_argument("--beta", type=float, default=0.2)
    parser.add_argument("--gamma", type=float, default=0.5)
    parser.add_argument("--lambda", dest="lam", type=float, default=15.0)
    parser.add_argument(
        "--kernel", type=Path, default=None, help="text file with the synaptic weight matrix"
    )


def _add_fusion_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--radius", type=int, default=16, help="coupling radius")
    parser.add_argument("--iters", type=int, default=110, help="lattice iterations")
    parser.add_argument("--sml-step", type=int, default=1)
    parser.add_argument("--sml-window", type=int, default=3)
    parser.add_argument(
        "--no-sml", action="store_true", help="feed raw luminance instead of focus features"
    )
    parser.add_argument(
        "--no-autoconfig", action="store_true", help="skip the input rescaling safeguard"
    )
    _add_param_flags(parser)


def _params_from_args(args) -> NeuronParams:
    kwargs = dict(alpha=args.alpha, beta=args.beta, gamma=args.gamma, lam=args.lam)
    if getattr(args, "kernel", None) is not None:
        kwargs["kernel"] = np.atleast_2d(np.loadtxt(args.kernel))
    return NeuronParams(**kwargs)


def _config_from_args(args) -> FusionConfig:
    return FusionConfig(
        radius=args.radius,
        iterations=args.iters,
        params=_params_from_args(args),
        sml_step=args.sml_step,
        sml_window=args.sml_window,
        use_sml=not args.no_sml,
        use_autoconfig=not args.no_autoconfig,
    )


def _decision_to_png(decision: np.ndarray, n_sources: int) -> np.ndarray:
    if n_sources == 2:
        return (decision * 255).astype(np.uint8)
    return np.round(decision.astype(np.float64) * 255.0 / (n_sources - 1)).astype(np.uint8)


def cmd_fuse(args) -> int:
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE

    t0 = time.perf_counter()
    sources = []
    for path in args.images:
        try:
            sources.append(load_image(path))
        except (OSError, ValueError) as exc:
            _err(f"cannot read {path}: {exc}")
            return EXIT_IO
    t_load = time.perf_counter()

    try:
        result = run_fusion(sources, config)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    t_fuse = time.perf_counter()

    out_dir = args.output
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = {}

    fused_path = out_dir / "fused.png"
    save_png(fused_path, result.fused)
    outputs["fused"] = str(fused_path)

    dm_path = out_dir / "dm.png"
    save_png(dm_path, _decision_to_png(result.decision, len(sources)))
    outputs["decision_map"] = str(dm_path)

    if args.emit_spikes:
        for idx, sm in enumerate(result.spike_matrices):
            spike_path = out_dir / f"spikes_{idx}.png"
            clamped = np.minimum(sm.counts, sm.total_steps).astype(np.uint16)
            save_png(spike_path, clamped)
            outputs[f"spikes_{idx}"] = str(spike_path)
    t_write = time.perf_counter()

    manifest = {
        "inputs": [str(p) for p in args.images],
        "config": {
            "radius": config.radius,
            "iterations": config.iterations,
            "alpha": config.params.alpha,
            "beta": config.params.beta,
            "gamma": config.params.gamma,
            "lambda": config.params.lam,
            "kernel": config.params.kernel.tolist(),
            "sml_step": config.sml_step,
            "sml_window": config.sml_window,
            "use_sml": config.use_sml,
            "use_autoconfig": config.use_autoconfig,
        },
        "scale": result.scale,
        "outputs": outputs,
        "timings_ms": {
            "load": (t_load - t0) * 1000.0,
            "fusion": (t_fuse - t_load) * 1000.0,
            "write": (t_write - t_fuse) * 1000.0,
        },
    }
    manifest_path = out_dir / "manifest.json"
    manifest["outputs"]["manifest"] = str(manifest_path)
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return EXIT_OK


def _find_pairs(dataset: Path):
    """Yield (image_id, path_a, path_b, path_fused_or_None), sorted by id."""
    pairs = {}
    for path in sorted(dataset.iterdir()):
        stem = path.stem
        if stem.endswith("_A"):
            pairs.setdefault(stem[:-2], {})["a"] = path
        elif stem.endswith("_B"):
            pairs.setdefault(stem[:-2], {})["b"] = path
        elif stem.endswith("_fused"):
            pairs.setdefault(stem[: -len("_fused")], {})["fused"] = path
    for image_id in sorted(pairs):
        entry = pairs[image_id]
        if "a" not in entry or "b" not in entry:
            _warn(f"{image_id}: missing counterpart file, skipped")
            continue
        yield image_id, entry["a"], entry["b"], entry.get("fused")


def cmd_eval(args) -> int:
    dataset = args.dataset
    if not dataset.is_dir():
        _err(f"not a directory: {dataset}")
        return EXIT_IO
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE

    report = MetricReport()
    for image_id, path_a, path_b, path_fused in _find_pairs(dataset):
        try:
            a = load_image(path_a)
            b = load_image(path_b)
            if path_fused is not None:
                fused = load_image(path_fused)
            else:
                fused = run_fusion([a, b], config).fused
            report.add(image_id, evaluate_pair(fused, a, b))
        except (OSError, ValueError) as exc:
            _warn(f"{image_id}: {exc}, skipped")

    if not report.per_image:
        _err("no usable image pairs found")
        return EXIT_IO

    out_dir = args.output if args.output is not None else dataset
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.json").write_text(report.to_json())
    (out_dir / "metrics.csv").write_text(report.to_csv())
    means = report.means()
    print(
        f"{len(report.per_image)} pairs: "
        f"qabf={means['qabf']:.4f} ssim={means['ssim']:.4f} psnr={means['psnr']:.4f}"
    )
    return EXIT_OK


def cmd_verify_dynamics(args) -> int:
    try:
        params = _params_from_args(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE

    threshold = continuous_firing_threshold(params)
    print(f"continuous-firing input boundary: {threshold:.6f}")
    print(f"{'input':>8} {'rate':>8} {'predicted':>10} {'simulated':>10}")

    burn_in = max(1, args.horizon // 5)
    all_match = True
    for value in args.inputs:
        report = classify_regime(value, params, horizon=args.horizon)
        trace = single_neuron_trace(value, params, args.horizon)
        simulated = "continuous" if trace.always_firing(burn_in=burn_in) else "safe"
        match = simulated == report.regime
        all_match = all_match and match
        flag = "" if match else "  MISMATCH"
        print(
            f"{value:8.3f} {report.firing_rate:8.3f} {report.regime:>10} {simulated:>10}{flag}"
        )
    return EXIT_OK if all_match else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnpfuse",
        description="Training-free multi-focus image fusion with spiking lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fuse = sub.add_parser("fuse", help="fuse two or more aligned images")
    p_fuse.add_argument("images", nargs="+", type=Path)
    p_fuse.add_argument("-o", "--output", type=Path, default=Path("out"))
    p_fuse.add_argument(
        "--emit-spikes", action="store_true", help="also write 16-bit spike count PNGs"
    )
    _add_fusion_flags(p_fuse)
    p_fuse.set_defaults(func=cmd_fuse)

    p_eval = sub.add_parser("eval", help="fuse and score a dataset of <id>_A/<id>_B pairs")
    p_eval.add_argument("dataset", type=Path)
    p_eval.add_argument("-o", "--output", type=Path, default=None)
    _add_fusion_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_verify = sub.add_parser(
        "verify-dynamics", help="check simulated firing regimes against the theory"
    )
    p_verify.add_argument(
        "--inputs", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0]
    )
    p_verify.add_argument("--horizon", type=int, default=500)
    _add_param_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify_dynamics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if len(getattr(args, "images", ["a", "b"])) < 2:
        _err("need at least two input images")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: synth-data, denoise, label, train, sweep, report, selftest.
Every command is deterministic given its flags and config. Exit codes:
0 success, 1 runtime failure, 2 flag misuse (argparse), 3 config schema
violation.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import config_from_dict
from .data import add_gaussian_noise, load_pgm, save_pgm, synth_shapes
from .errors import ConfigError
from .experiments import (ClassifyConfig, DenoiseConfig, SweepConfig,
                          run_classify_experiment, run_denoise_experiment,
                          run_ratio_sweep)
from .graphcut import CrfParams, denoise, energy, nearest_labeling
from .metrics import flops_report, rows_from_csv, ssim
from .nn import save_network
from .plot_svg import sweep_plot_svg
from .rng import Rng, derive_seed
from .selftest import run_selftest

_EXPERIMENTS = {
    "denoise": (DenoiseConfig, run_denoise_experiment),
    "classify": (ClassifyConfig, run_classify_experiment),
    "sweep": (SweepConfig, run_ratio_sweep),
}


def _crf_params(args):
    return CrfParams(num_labels=args.labels,
                     smoothness_weight=args.smoothness,
                     smoothness_cap=args.cap)


def _add_crf_flags(parser):
    parser.add_argument("--labels", type=int, default=16,
                        help="number of intensity levels (default 16)")
    parser.add_argument("--smoothness", type=float, default=12.0,
                        help="neighbor disagreement weight (default 12)")
    parser.add_argument("--cap", type=float, default=32.0,
                        help="truncation of the neighbor cost (default 32)")


def _load_experiment_config(path, seed_override=None):
    """Parse {"experiment": <kind>, ...fields} into (kind, config, runner)."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    kind = data.pop("experiment", "sweep")
    if kind not in _EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {sorted(_EXPERIMENTS)}, "
                          f"got {kind!r}")
    cls, runner = _EXPERIMENTS[kind]
    cfg = config_from_dict(cls, data)
    if seed_override is not None:
        cfg.seed = seed_override
    return kind, cfg, runner


def cmd_synth_data(args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clean = synth_shapes(args.count, size=args.size, num_levels=args.levels,
                         seed=args.seed)
    noise_seed = derive_seed(args.seed, 2)
    manifest = ["path,role"]
    for i, img in enumerate(clean):
        noisy = add_gaussian_noise(img, args.sigma, Rng(noise_seed).split(i))
        for name, data, role in ((f"clean_{i:03d}.pgm", img, "clean"),
                                 (f"noisy_{i:03d}.pgm", noisy, "noisy")):
            save_pgm(out_dir / name, data)
            manifest.append(f"{name},{role}")
    (out_dir / "manifest.csv").write_text("\n".join(manifest) + "\n")
    print(f"wrote {2 * args.count} images and manifest.csv to {out_dir}")
    return 0


def _denoise_and_report(image, params):
    """Denoise one image; returns (output, lines to print)."""
    output, ops = denoise(image, params)
    labels = nearest_labeling(output, params)
    total, _, _ = energy(labels, image, params)
    return output, ops, total


def cmd_denoise(args):
    image = load_pgm(args.input)
    params = _crf_params(args)
    output, ops, total = _denoise_and_report(image, params)
    save_pgm(args.out, output)
    print(f"energy={total!r}")
    print(f"ops={ops}")
    if args.clean is not None:
        print(f"ssim={ssim(output, load_pgm(args.clean))!r}")
    return 0


def cmd_label(args):
    in_dir, out_dir = Path(args.in_dir), Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(in_dir.glob(args.pattern))
    if not paths:
        print(f"no files in {in_dir} match {args.pattern!r}", file=sys.stderr)
        return 1
    params = _crf_params(args)

    def work(path):
        return denoise(load_pgm(path), params)

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(work, paths))
    manifest = ["path,role"]
    total_ops = 0
    for path, (output, ops) in zip(paths, results):
        name = f"labeled_{path.stem}.pgm"
        save_pgm(out_dir / name, output)
        manifest.append(f"{name},imputed")
        total_ops += ops
    (out_dir / "manifest.csv").write_text("\n".join(manifest) + "\n")
    print(f"labeled {len(paths)} images")
    print(f"ops={total_ops}")
    return 0


def _write_rows(rows, csv_path, svg_path, title):
    text = flops_report(rows)
    if csv_path is not None:
        Path(csv_path).write_text(text)
    if svg_path is not None:
        Path(svg_path).write_text(sweep_plot_svg(rows, title=title))
    return text


def cmd_train(args):
    kind, cfg, runner = _load_experiment_config(args.config, args.seed)
    result = runner(cfg)
    net = result.artifacts.get("net") or result.artifacts.get("student")
    if net is None:
        print("config describes an experiment without a trainable surrogate",
              file=sys.stderr)
        return 1
    save_network(net, args.out)
    _write_rows(result.rows, args.csv, None, kind)
    print(f"saved model to {args.out}")
    for row in result.rows:
        print(f"{row.task}/{row.method}: {row.metric}={row.value!r}")
    return 0


def cmd_sweep(args):
    kind, cfg, runner = _load_experiment_config(args.config, args.seed)
    result = runner(cfg)
    text = _write_rows(result.rows, args.csv, args.svg, kind)
    sys.stdout.write(text)
    return 0


def cmd_report(args):
    rows = rows_from_csv(Path(args.csv).read_text())
    text = _write_rows(rows, None, args.svg, Path(args.csv).stem)
    sys.stdout.write(text)
    return 0


def cmd_selftest(args):
    failures = run_selftest()
    if failures:
        print(f"FAILED: {', '.join(failures)}")
        return 1
    print("all checks passed")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pipeboot",
        description="Train cheap network surrogates for an expensive "
                    "graph-cut labeling pipeline and compare the two.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="generate a clean/noisy PGM corpus")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--sigma", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth_data)

    p = sub.add_parser("denoise", help="denoise one PGM image")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--clean", help="reference image for an ssim= line")
    _add_crf_flags(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("label", help="denoise every matching PGM in a directory")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--pattern", default="noisy_*.pgm")
    p.add_argument("--threads", type=int, default=1)
    _add_crf_flags(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="run an experiment and save its model")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="checkpoint path (.pbnn)")
    p.add_argument("--csv", help="also write the metric rows here")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="run an experiment config, write CSV/SVG")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", help="write the metric rows here")
    p.add_argument("--svg", help="write a line plot here")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-emit a metrics CSV canonically")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg", help="write a line plot here")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # runtime failures map to exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

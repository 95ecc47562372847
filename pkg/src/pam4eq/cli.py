"""Command-line front end: scenario files in, CSV/JSON results, run
manifests and serialized models out.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ScenarioConfig, load_config, resolve_config
from .equalizers import load_model, lms_equalize, save_model, svm_equalize
from .errors import Pam4EqError, ParseError, ValidationError
from .metrics import (
    count_errors,
    evaluate_unit,
    make_frame,
    sweep_csv,
    sweep_rows,
    sweep_snr,
    sweep_training_length,
    transient_symbols,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pam4eq",
        description="Bandwidth-limited PAM4 link simulator and equalizer bench",
    )
    parser.add_argument("--version", action="version", version=f"pam4eq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="scenario config JSON")
        p.add_argument("--out", type=Path, help="output path (overrides output.path)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config field (repeatable)")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker cap")
        p.add_argument("--seed-offset", type=int, default=0,
                       help="added to every configured seed")

    common(sub.add_parser("simulate", help="single point at the configured SNR"))
    common(sub.add_parser("sweep-snr", help="BER waterfall over the SNR grid"))
    common(sub.add_parser("sweep-train", help="BER against training length"))
    common(sub.add_parser("train-model", help="train equalizers once and save them"))
    p_eval = sub.add_parser("eval-model", help="evaluate saved models on fresh runs")
    p_eval.add_argument("models", nargs="+", type=Path, help="model JSON files")
    common(p_eval)
    return parser


def _load(args, default_kind: str) -> ScenarioConfig:
    if args.config is not None:
        cfg = load_config(args.config, overrides=args.overrides, default_kind=default_kind)
    else:
        cfg = resolve_config({}, overrides=args.overrides, default_kind=default_kind)
    if args.seed_offset:
        cfg.seeds = [s + args.seed_offset for s in cfg.seeds]
        cfg.resolved["experiment"]["seeds"] = cfg.seeds
    if args.out is not None:
        cfg.output_path = str(args.out)
        cfg.resolved["output"]["path"] = str(args.out)
    return cfg


def _write_results(cfg: ScenarioConfig, points, command: str) -> Path:
    out = Path(cfg.output_path)
    if cfg.output_format == "json":
        out.write_text(json.dumps(sweep_rows(points), indent=2) + "\n")
    else:
        out.write_text(sweep_csv(points))
    manifest = {
        "tool": "pam4eq",
        "version": __version__,
        "command": command,
        "config": cfg.resolved,
        "seeds": cfg.seeds,
        "stream_hashes": {
            repr(p.x_value): {str(s): h for s, h in sorted(p.stream_hashes.items())}
            for p in points
        },
        "results": str(out),
    }
    Path(f"{out}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def _print_summary(points) -> None:
    for row in sweep_rows(points):
        print(
            f"{row['x_kind']}={row['x_value']} seed={row['seed']} "
            f"{row['equalizer']}: ber={row['ber']:.6g} ser={row['ser']:.6g}"
        )


def _cmd_simulate(args) -> int:
    cfg = _load(args, "single")
    points = sweep_snr(
        cfg.scenario, [cfg.scenario.channel.snr_db], cfg.equalizers,
        cfg.n_symbols, cfg.seeds, jobs=args.jobs,
    )
    out = _write_results(cfg, points, "simulate")
    _print_summary(points)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_sweep_snr(args) -> int:
    cfg = _load(args, "snr_sweep")
    points = sweep_snr(
        cfg.scenario, cfg.grid, cfg.equalizers, cfg.n_symbols, cfg.seeds,
        jobs=args.jobs,
    )
    out = _write_results(cfg, points, "sweep-snr")
    _print_summary(points)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_sweep_train(args) -> int:
    cfg = _load(args, "train_sweep")
    points = sweep_training_length(
        cfg.scenario, cfg.grid, cfg.equalizers, cfg.seeds, cfg.n_symbols,
        jobs=args.jobs,
    )
    out = _write_results(cfg, points, "sweep-train")
    _print_summary(points)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_train_model(args) -> int:
    from .channel import run_link
    from .metrics import _train_one

    cfg = _load(args, "single")
    out_dir = Path(cfg.output_path)
    if out_dir.suffix:
        out_dir = out_dir.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = cfg.seeds[0]
    chan = replace(cfg.scenario.channel, rng_seed=seed)
    frame = make_frame(cfg.scenario.tx, cfg.n_symbols)
    rx = run_link(frame, cfg.scenario.tx, chan)
    paths = []
    for spec in cfg.equalizers:
        model = _train_one(spec, rx.values, frame, cfg.train_length, seed)
        path = out_dir / f"{spec.name}.model.json"
        save_model(model, path)
        paths.append(path)
        print(f"trained {spec.name} -> {path}")
    manifest = {
        "tool": "pam4eq",
        "version": __version__,
        "command": "train-model",
        "config": cfg.resolved,
        "seeds": [seed],
        "stream_hashes": {repr(chan.snr_db): {str(seed): rx.digest()}},
        "models": [str(p) for p in paths],
    }
    Path(out_dir / "train.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def _cmd_eval_model(args) -> int:
    from .channel import run_link
    from .equalizers import LmsModel
    from .metrics import BerResult, SweepPoint

    cfg = _load(args, "single")
    models = {path.name.removesuffix(".model.json"): load_model(path) for path in args.models}
    warm = max(
        max(m.config.half_window, m.config.dfe_taps) for m in models.values()
    )
    skip = transient_symbols(cfg.scenario.tx) + warm
    frame = make_frame(cfg.scenario.tx, cfg.n_symbols)
    results: dict[str, dict[int, BerResult]] = {name: {} for name in models}
    hashes = {}
    for seed in cfg.seeds:
        chan = replace(cfg.scenario.channel, rng_seed=seed)
        rx = run_link(frame, cfg.scenario.tx, chan)
        hashes[seed] = rx.digest()
        for name, model in models.items():
            decided = (
                lms_equalize(rx, model) if isinstance(model, LmsModel) else svm_equalize(rx, model)
            )
            results[name][seed] = count_errors(decided, frame, skip_prefix=skip)
    point = SweepPoint(
        x_kind="snr_db", x_value=float(cfg.scenario.channel.snr_db),
        seeds=cfg.seeds, results=results, stream_hashes=hashes,
    )
    out = _write_results(cfg, [point], "eval-model")
    _print_summary([point])
    print(f"wrote {out}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep-snr": _cmd_sweep_snr,
    "sweep-train": _cmd_sweep_train,
    "train-model": _cmd_train_model,
    "eval-model": _cmd_eval_model,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ValidationError) as e:
        print(f"pam4eq: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Pam4EqError as e:
        print(f"pam4eq: error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        print(f"pam4eq: error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line experiment harness.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import data as _data
from . import experiment as ex
from .exceptions import InvalidArgumentError
from .kernels import CLASSICAL_KINDS, KernelMatrix, psd_report
from .svgplot import plot_sweep


def _write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _centers(text: str) -> list[list[float]]:
    return [_floats(chunk) for chunk in text.split(";") if chunk.strip()]


# -- config assembly -----------------------------------------------------------


def add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment config (flags override --config)")
    g.add_argument("--config", help="experiment config JSON, or a result file embedding one")
    g.add_argument("--tag", help="dataset tag for summary tables (e.g. i, r, b)")
    g.add_argument("--data", help="CSV dataset path")
    g.add_argument("--label-column", default=None)
    g.add_argument("--builtin", choices=_data.BUILTIN_DATASETS)
    g.add_argument("--generator", choices=("blobs",) + _data.HARD_KINDS,
                   help="synthetic dataset kind")
    g.add_argument("--n", type=int, help="samples per class for --generator")
    g.add_argument("--noise", type=float)
    g.add_argument("--data-seed", type=int)
    g.add_argument("--centers", type=_centers, help='blob centers, e.g. "0,0;6,8"')
    g.add_argument("--spread", type=float)
    g.add_argument("--scaler", choices=("minmax", "standard", "none"))
    g.add_argument("--pca-k", type=int)
    g.add_argument("--train-fraction", type=float)
    g.add_argument("--split-seed", type=int)
    g.add_argument("--kernel", choices=("quantum",) + CLASSICAL_KINDS)
    g.add_argument("--reps", type=int)
    g.add_argument("--entanglement", choices=("none", "linear", "full"))
    g.add_argument("--n-qubits", type=int)
    g.add_argument("--gamma", type=float)
    g.add_argument("--degree", type=int)
    g.add_argument("--coef0", type=float)
    g.add_argument("--trainer", choices=("smo", "sgd"))
    g.add_argument("--C", type=float, dest="C")
    g.add_argument("--tol", type=float)
    g.add_argument("--max-passes", type=int)
    g.add_argument("--seed", type=int, help="trainer seed")
    g.add_argument("--learning-rate", type=float)
    g.add_argument("--epochs", type=int)


def config_from_args(args) -> dict:
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text())
        config = config.get("config", config)
        # sweep results also embed their grid
        config = {k: v for k, v in config.items() if k in ex.DEFAULT_CONFIG}
    config = ex.resolve_config(config)

    if args.tag is not None:
        config["tag"] = args.tag
    if args.data:
        config["dataset"] = {"path": args.data, "label_column": args.label_column or "label"}
    elif args.builtin:
        config["dataset"] = {"builtin": args.builtin}
    elif args.generator:
        if args.generator == "blobs":
            config["dataset"] = {
                "generator": "blobs",
                "n_per_class": args.n or 50,
                "centers": args.centers or [[0.0, 0.0], [6.0, 8.0]],
                "spread": args.spread if args.spread is not None else 0.5,
                "seed": args.data_seed if args.data_seed is not None else 0,
            }
        else:
            config["dataset"] = {
                "generator": "hard",
                "kind": args.generator,
                "n_per_class": args.n or 100,
                "noise": args.noise or 0.0,
                "seed": args.data_seed if args.data_seed is not None else 0,
            }
    ds = config["dataset"]
    if ds.get("generator"):
        for flag, key in ((args.n, "n_per_class"), (args.noise, "noise"), (args.data_seed, "seed"),
                          (args.centers, "centers"), (args.spread, "spread")):
            if flag is not None and key in ds:
                ds[key] = flag

    pre = config["preprocess"]
    if args.scaler is not None:
        pre["scaler"] = None if args.scaler == "none" else args.scaler
    if args.pca_k is not None:
        pre["pca_k"] = args.pca_k or None
    split = config["split"]
    if args.train_fraction is not None:
        split["train_fraction"] = args.train_fraction
    if args.split_seed is not None:
        split["seed"] = args.split_seed

    kernel = config["kernel"]
    if args.kernel is not None:
        kernel = ex.kernel_spec(args.kernel, kernel)
    if kernel["family"] == "quantum":
        for flag, key in ((args.reps, "reps"), (args.entanglement, "entanglement"), (args.n_qubits, "n_qubits")):
            if flag is not None:
                kernel[key] = flag
    else:
        for flag, key in ((args.gamma, "gamma"), (args.degree, "degree"), (args.coef0, "coef0")):
            if flag is not None:
                kernel[key] = flag
    config["kernel"] = kernel

    trainer = config["trainer"]
    for flag, key in ((args.trainer, "trainer"), (args.C, "C"), (args.tol, "tol"),
                      (args.max_passes, "max_passes"), (args.seed, "seed"),
                      (args.learning_rate, "learning_rate"), (args.epochs, "epochs")):
        if flag is not None:
            trainer[key] = flag
    return ex.resolve_config(config)


# -- subcommands ---------------------------------------------------------------


def cmd_gen_data(args) -> int:
    if args.kind == "blobs":
        ds = _data.gen_blobs(args.n, args.centers or [[0.0, 0.0], [6.0, 8.0]], args.spread, args.seed)
    else:
        ds = _data.gen_hard(args.n, args.kind, args.noise, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    ds.to_csv(out)
    _write(out.with_name(out.name + ".provenance.json"), ex.dump_json(ds.provenance))
    print(f"wrote {ds.n_samples} rows x {ds.n_features} features to {out}")
    return 0


def cmd_kernel(args) -> int:
    config = config_from_args(args)
    ds, X = ex.preprocess_all(config)
    gram = ex.full_gram(config["kernel"], X)
    gram.kind = dict(gram.kind, dataset=config["dataset"], preprocess=config["preprocess"])
    gram.save(args.out)
    rep = psd_report(gram)
    print(json.dumps({
        "size": gram.size,
        "min_eigenvalue": rep.min_eigenvalue,
        "is_psd": rep.is_psd,
        "out": str(args.out),
    }, sort_keys=True))
    return 0


def cmd_train_eval(args) -> int:
    config = config_from_args(args)
    if args.gram:
        result = ex.run_train_eval_precomputed(config, KernelMatrix.load(args.gram))
    else:
        result = ex.run_train_eval(config)
    out = Path(args.out)
    _write(out / "report.json", ex.dump_json(result.to_dict()))
    _write(out / "model.json", ex.dump_json({"config": result.config, "model": result.model.to_dict()}))
    print(f"train_acc={result.train_accuracy:.4f} test_acc={result.test_accuracy:.4f} "
          f"({result.seconds:.2f}s) -> {out}")
    return 0


def _write_sweep(result: ex.SweepResult, out: Path, plot: bool, title: str) -> None:
    _write(out, result.to_csv())
    _write(out.with_suffix(".json"), ex.dump_json(result.to_dict()))
    _write(out.with_name(out.stem + ".timing.csv"), result.timing_csv())
    if plot:
        _write(out.with_suffix(".svg"), plot_sweep(out, title))


def cmd_sweep_depth(args) -> int:
    config = config_from_args(args)
    result = ex.sweep_depth(config, args.reps_list)
    _write_sweep(result, Path(args.out), args.plot, "Training accuracy vs depth")
    for row in result.rows:
        print(f"reps={row['reps']} train_acc={row['train_acc']:.4f} test_acc={row['test_acc']:.4f}")
    return 0


def cmd_sweep_kernels(args) -> int:
    config = config_from_args(args)
    result = ex.sweep_kernels(config, args.kernels, args.learning_rates)
    _write_sweep(result, Path(args.out), args.plot, "Kernels x learning rate")
    for row in result.rows:
        print(f"{row['kernel']:>8} lr={row['learning_rate']:<5} "
              f"train_acc={row['train_acc']:.4f} test_acc={row['test_acc']:.4f}")
    return 0


def cmd_plot(args) -> int:
    _write(args.out, plot_sweep(args.csv, args.title))
    return 0


def run_suite(suite: dict, out_dir: Path, plot: bool = True) -> dict:
    """Run every experiment of a suite file; returns summary rows and timings."""
    out_dir = Path(out_dir)
    summary, timings = [], []
    for entry in suite["experiments"]:
        tag = entry["tag"]
        base = dict(entry.get("base", {}), tag=tag)
        results = {}
        for name, kernel in entry.get("models", {}).items():
            t0 = time.perf_counter()
            results[name] = ex.run_train_eval(dict(base, kernel=kernel))
            timings.append({"tag": tag, "step": f"train-eval:{name}", "seconds": time.perf_counter() - t0})
            _write(out_dir / tag / f"{name}.json", ex.dump_json(results[name].to_dict()))
        summary.extend(ex.summary_rows(tag, results))
        if "depth_sweep" in entry:
            t0 = time.perf_counter()
            sweep = ex.sweep_depth(dict(base, kernel=entry["depth_sweep"]["kernel"]), entry["depth_sweep"]["reps"])
            timings.append({"tag": tag, "step": "sweep-depth", "seconds": time.perf_counter() - t0})
            _write_sweep(sweep, out_dir / tag / "depth_sweep.csv", plot, f"[{tag}] Training accuracy vs depth")
        if "kernel_sweep" in entry:
            t0 = time.perf_counter()
            ks = entry["kernel_sweep"]
            sweep = ex.sweep_kernels(dict(base, trainer=ks.get("trainer", {})), ks["kernels"], ks["learning_rates"])
            timings.append({"tag": tag, "step": "sweep-kernels", "seconds": time.perf_counter() - t0})
            _write_sweep(sweep, out_dir / tag / "kernel_sweep.csv", plot, f"[{tag}] Kernels x learning rate")
    _write(out_dir / "summary.csv", ex.rows_to_csv(ex.SUMMARY_COLUMNS, summary))
    _write(out_dir / "summary.json", ex.dump_json({"suite": suite, "rows": summary}))
    _write(out_dir / "timing.json", json.dumps(timings, indent=2) + "\n")
    return {"rows": summary, "timings": timings}


def cmd_suite(args) -> int:
    suite = ex.load_suite(args.suite)
    t0 = time.perf_counter()
    res = run_suite(suite, Path(args.out), plot=not args.no_plot)
    print(ex.rows_to_csv(ex.SUMMARY_COLUMNS, res["rows"]), end="")
    print(f"suite finished in {time.perf_counter() - t0:.1f}s -> {args.out}")
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qksvm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic dataset CSV")
    p.add_argument("--kind", required=True, choices=("blobs",) + _data.HARD_KINDS)
    p.add_argument("--n", type=int, default=100, help="samples per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--centers", type=_centers, help='blob centers, e.g. "0,0;6,8"')
    p.add_argument("--spread", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("kernel", help="compute a Gram matrix over a whole dataset")
    add_config_flags(p)
    p.add_argument("--out", required=True, help="output .csv or .json")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("train-eval", help="train on the train split, evaluate both splits")
    add_config_flags(p)
    p.add_argument("--gram", help="precomputed Gram file from the kernel subcommand")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("sweep-depth", help="accuracy vs feature-map repetitions")
    add_config_flags(p)
    p.add_argument("--reps-list", type=_ints, default=[1, 2, 3, 4, 5])
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")
    p.set_defaults(func=cmd_sweep_depth)

    p = sub.add_parser("sweep-kernels", help="accuracy over kernels x learning rates (SGD)")
    add_config_flags(p)
    p.add_argument("--kernels", type=lambda s: [k for k in s.split(",") if k],
                   default=list(CLASSICAL_KINDS))
    p.add_argument("--learning-rates", type=_floats, default=[0.01, 0.1, 0.5])
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_sweep_kernels)

    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("suite", help="run the experiment suite and emit the summary table")
    p.add_argument("--suite", help="suite JSON (default: the bundled suite)")
    p.add_argument("--out", default="results")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgumentError, ValueError, KeyError, OSError) as exc:
        print(f"qksvm {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line entry point.

    hkaclust run --dataset iris --algo hkak --preset reference --out runs.csv
    hkaclust compare hkak.csv hka.csv --metric intra --tail less
    hkaclust gen artset1 --seed 0 --out artset1.csv

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .data import DATASET_NAMES, DataError, load_dataset, write_csv
from .harness import ALGORITHMS, METRICS, PRESETS, ExperimentConfig, compare, emit_results, format_summary, read_records, run_experiment, summarize

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

# flag name -> (type, target); target "param" goes into the algorithm parameters
_RUN_KEYS = {
    "dataset": (str, "config"),
    "csv": (str, "config"),
    "label_col": (str, "config"),
    "header": (bool, "config"),
    "algo": (str, "config"),
    "k": (int, "config"),
    "preset": (str, "config"),
    "replicates": (int, "config"),
    "seed": (int, "config"),
    "data_seed": (int, "config"),
    "workers": (int, "config"),
    "out": (str, "config"),
    "format": (str, "config"),
    "n": (int, "param"),
    "n_xi": (int, "param"),
    "alpha": (float, "param"),
    "w": (float, "param"),
    "epsilon": (float, "param"),
    "maxiter": (int, "param"),
    "tol": (float, "param"),
    "cap": (int, "param"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {s!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes and underscores are interchangeable."""
    out = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, _, value = line.partition(" ")
        key = key.strip().lstrip("-").replace("-", "_")
        if key not in _RUN_KEYS:
            raise UsageError(f"{path}:{i}: unknown key {key!r}")
        typ = _RUN_KEYS[key][0]
        try:
            out[key] = _bool(value) if typ is bool else typ(value.strip())
        except ValueError:
            raise UsageError(f"{path}:{i}: bad value for {key}: {value.strip()!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hkaclust", description="HKA / HKA-K clustering experiments")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("run", help="run replicated clustering experiments")
    r.add_argument("--config", help="key = value file; flags override it")
    r.add_argument("--dataset", choices=DATASET_NAMES)
    r.add_argument("--csv", help="CSV file to cluster instead of a named dataset")
    r.add_argument("--label-col", dest="label_col", help="label column (0-based index, or name with --header)")
    r.add_argument("--header", action="store_const", const=True, default=None, help="CSV has a header line")
    r.add_argument("--algo", choices=ALGORITHMS)
    r.add_argument("--k", type=int)
    r.add_argument("--preset", choices=tuple(PRESETS))
    r.add_argument("--replicates", type=int)
    r.add_argument("--seed", type=int, help="base seed; replicate i uses seed + i")
    r.add_argument("--data-seed", dest="data_seed", type=int, help="seed for synthetic datasets")
    r.add_argument("--workers", type=int, help="parallel replicate processes")
    r.add_argument("--out", help="output path (default: stdout summary only)")
    r.add_argument("--format", choices=("csv", "markdown"))
    r.add_argument("--n", type=int, help="samples per iteration")
    r.add_argument("--n-xi", dest="n_xi", type=int, help="best samples used for the measurement")
    r.add_argument("--alpha", type=float, help="slowdown coefficient")
    r.add_argument("--w", type=float, help="K-Means weight (hkak)")
    r.add_argument("--epsilon", type=float, help="restart threshold (hkak)")
    r.add_argument("--maxiter", type=int)
    r.add_argument("--tol", type=float, help="centroid tolerance (kmeans)")
    r.add_argument("--cap", type=int, help="evaluation budget cap (hkak)")

    c = sub.add_parser("compare", help="rank-sum test between two result CSVs")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--metric", default="intra", choices=METRICS)
    c.add_argument("--tail", default="less", choices=("less", "greater", "two-sided"))

    g = sub.add_parser("gen", help="write a synthetic dataset as CSV")
    g.add_argument("name", choices=("artset1", "artset2"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    return p


def _label_col(v):
    if v is None:
        return None
    try:
        return int(v)
    except ValueError:
        return v


def _run_settings(args) -> dict:
    settings = read_config(args.config) if args.config else {}
    for key in _RUN_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v
    return settings


def cmd_run(args) -> int:
    s = _run_settings(args)
    params = {}
    for key, (_, target) in _RUN_KEYS.items():
        if target == "param" and key in s:
            params["eval_budget_cap" if key == "cap" else key] = s[key]
    if s.get("csv") is None and s.get("dataset") is None:
        raise UsageError("one of --dataset or --csv is required")
    try:
        config = ExperimentConfig(
            algorithm=s.get("algo", "hkak"),
            dataset=s.get("dataset"),
            csv=s.get("csv"),
            label_column=_label_col(s.get("label_col")),
            header=bool(s.get("header", False)),
            k=s.get("k"),
            preset=s.get("preset", "reference"),
            params=params,
            replicates=s.get("replicates", 20),
            seed=s.get("seed", 0),
            data_seed=s.get("data_seed", 0),
            workers=s.get("workers", 1),
        )
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e

    records = run_experiment(config)
    summary = summarize(records)
    title = f"{config.algorithm} on {config.csv or config.dataset}"
    if s.get("out"):
        emit_results(records, summary, s.get("format", "csv"), s["out"], title=title)
    print(format_summary(summary, title), end="")
    return EXIT_OK


def cmd_compare(args) -> int:
    a = read_records(args.a)
    b = read_records(args.b)
    print(f"{compare(a, b, args.metric, args.tail):.6g}")
    return EXIT_OK


def cmd_gen(args) -> int:
    write_csv(load_dataset(args.name, seed=args.seed), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: run, compare or gen")
        handler = {"run": cmd_run, "compare": cmd_compare, "gen": cmd_gen}[args.command]
        return handler(args)
    except UsageError as e:
        print(f"hkaclust: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as e:
        print(f"hkaclust: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001
        print(f"hkaclust: failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``rpnb gen-gm | run | compare``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O or data error.
Reports contain no timestamps, so identical configurations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .baselines import Algorithm, LinearModel
from .data import BUILTIN_DATASETS, down_dim, generate_gm, load_builtin, load_csv, write_csv
from .ensemble import Combiner, Mode, RpnbConfig, RpnbModel
from .errors import InsufficientDataError, RpnbError
from .evaluation import averaged_eval, wilcoxon_signed_rank, win_loss_count
from .gnb import PriorMode
from .projection import ProjectionScheme

LEARNERS = ("rpnb",) + tuple(a.value for a in Algorithm)

RUN_DEFAULTS = {
    "dataset": [],
    "learner": ["rpnb"],
    "perms": 10,
    "seed": 0,
    "gm_seed": 0,
    "mode": Mode.ONE_BY_ONE.value,
    "batch_size": 1,
    "k": 200,
    "q": None,
    "scheme": ProjectionScheme.GAUSSIAN.value,
    "combiner": Combiner.SUM.value,
    "prior": PriorMode.UNIFORM.value,
    "eta0": 1.0,
    "out": "-",
    "format": "json",
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpnb", description="Random-projection Naive Bayes online learning experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-gm", help="write the synthetic Gaussian-mixture dataset as CSV")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="prequential evaluation over permutations")
    run.add_argument("--config", help="flat JSON file with the same keys as the flags")
    run.add_argument("--dataset", action="append", help=f"CSV path or one of {', '.join(BUILTIN_DATASETS)}")
    run.add_argument("--learner", action="append", choices=LEARNERS)
    run.add_argument("--perms", type=int)
    run.add_argument("--seed", type=int, help="base permutation seed; also the RPNB matrix seed")
    run.add_argument("--gm-seed", dest="gm_seed", type=int)
    run.add_argument("--mode", choices=[m.value for m in Mode])
    run.add_argument("--batch-size", dest="batch_size", type=int)
    run.add_argument("--k", type=int)
    run.add_argument("--q", type=int, help="down-space dimension (default: from p)")
    run.add_argument("--scheme", choices=[s.value for s in ProjectionScheme])
    run.add_argument("--combiner", choices=[c.value for c in Combiner])
    run.add_argument("--prior", choices=[p.value for p in PriorMode])
    run.add_argument("--eta0", type=float)
    run.add_argument("--out")
    run.add_argument("--format", choices=["json", "csv"])

    cmp_ = sub.add_parser("compare", help="Wilcoxon comparison of two learners across datasets")
    cmp_.add_argument("reports", nargs="+", help="one report with --a/--b, or two reports")
    cmp_.add_argument("--a", dest="learner_a")
    cmp_.add_argument("--b", dest="learner_b")
    cmp_.add_argument("--alpha", type=float, default=0.05)
    cmp_.add_argument("--out", default="-")
    return parser


def resolve_run_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the optional config file and explicit flags (flags win)."""
    config = dict(RUN_DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a flat JSON object")
        unknown = set(doc) - set(RUN_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        config.update(doc)
    for key in RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    for key in ("dataset", "learner"):
        if isinstance(config[key], str):
            config[key] = [config[key]]
    if not config["dataset"]:
        raise UsageError("at least one --dataset is required")
    if not config["learner"]:
        raise UsageError("at least one --learner is required")
    bad = [name for name in config["learner"] if name not in LEARNERS]
    if bad:
        raise UsageError(f"unknown learners: {', '.join(bad)}")
    for key in ("perms", "seed", "gm_seed", "batch_size", "k"):
        if not isinstance(config[key], int) or isinstance(config[key], bool):
            raise UsageError(f"{key} must be an integer")
    if config["perms"] < 1:
        raise UsageError("--perms must be >= 1")
    if config["seed"] < 0 or config["gm_seed"] < 0:
        raise UsageError("seeds must be non-negative")
    if config["format"] not in ("json", "csv"):
        raise UsageError("--format must be json or csv")
    return config


def _rpnb_config(config: dict) -> RpnbConfig:
    try:
        return RpnbConfig(
            k=config["k"],
            q=config["q"],
            scheme=config["scheme"],
            combiner=config["combiner"],
            mode=config["mode"],
            batch_size=config["batch_size"],
            seed=config["seed"],
            prior_mode=config["prior"],
        )
    except (RpnbError, TypeError) as exc:
        raise UsageError(f"invalid RPNB settings: {exc}") from None


def _learner_factory(name: str, config: dict):
    if name == "rpnb":
        rpnb_config = _rpnb_config(config)
        return lambda ds: RpnbModel(rpnb_config, ds.p, ds.n_classes)
    if not config["eta0"] > 0:
        raise UsageError("--eta0 must be positive")
    return lambda ds: LinearModel(ds.p, ds.n_classes, name, eta0=config["eta0"])


def _learner_params(name: str, config: dict, dataset) -> dict:
    if name == "rpnb":
        params = _rpnb_config(config).to_dict()
        if params["q"] is None:
            params["q"] = down_dim(dataset.p)
        return params
    params = {"algorithm": name}
    if name == Algorithm.OGD.value:
        params["eta0"] = config["eta0"]
    return params


def _load_dataset(spec: str, gm_seed: int):
    try:
        if spec in BUILTIN_DATASETS:
            return load_builtin(spec, seed=gm_seed)
        return load_csv(spec)
    except (OSError, RpnbError) as exc:
        raise DataError(f"cannot load dataset {spec!r}: {exc}") from None


def execute_run(config: dict) -> dict:
    factories = {name: _learner_factory(name, config) for name in config["learner"]}
    runs = []
    for spec in config["dataset"]:
        dataset = _load_dataset(spec, config["gm_seed"])
        for name in config["learner"]:
            agg = averaged_eval(factories[name], dataset, config["perms"], config["seed"])
            runs.append({
                "dataset": dataset.name,
                "learner": name,
                "n_perms": agg.n_perms,
                "n_observations": dataset.n,
                "n_features": dataset.p,
                "n_classes": dataset.n_classes,
                "params": _learner_params(name, config, dataset),
                "error_rate": {"mean": agg.error_rate.mean, "var": agg.error_rate.var},
                "macro_f1": {"mean": agg.macro_f1.mean, "var": agg.macro_f1.var},
                "update_count": {"mean": agg.update_count.mean, "var": agg.update_count.var},
                "per_perm": [r.to_dict() for r in agg.runs],
            })
    return {"runs": runs, "config_echo": config}


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "dataset", "learner", "n_perms",
        "error_rate_mean", "error_rate_var",
        "macro_f1_mean", "macro_f1_var",
        "update_count_mean", "update_count_var",
    ])
    for run in report["runs"]:
        writer.writerow([
            run["dataset"], run["learner"], run["n_perms"],
            repr(run["error_rate"]["mean"]), repr(run["error_rate"]["var"]),
            repr(run["macro_f1"]["mean"]), repr(run["macro_f1"]["var"]),
            repr(run["update_count"]["mean"]), repr(run["update_count"]["var"]),
        ])
    return buf.getvalue()


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc}") from None


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _read_report(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read report {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not a JSON report: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("runs"), list):
        raise UsageError(f"{path} has no 'runs' list")
    return doc


def _select(report: dict, learner, path: str) -> tuple[str, dict]:
    names = sorted({run["learner"] for run in report["runs"]})
    if learner is None:
        if len(names) != 1:
            raise UsageError(f"{path} holds learners {names}; pick one with --a/--b")
        learner = names[0]
    entries = {run["dataset"]: run for run in report["runs"] if run["learner"] == learner}
    if not entries:
        raise UsageError(f"{path} has no runs for learner {learner!r}")
    return learner, entries


def execute_compare(paths, learner_a, learner_b, alpha: float) -> dict:
    if len(paths) == 1:
        if not (learner_a and learner_b):
            raise UsageError("comparing within one report needs both --a and --b")
        report_a = report_b = _read_report(paths[0])
        paths = [paths[0], paths[0]]
    elif len(paths) == 2:
        report_a, report_b = _read_report(paths[0]), _read_report(paths[1])
    else:
        raise UsageError("compare takes one or two reports")
    learner_a, runs_a = _select(report_a, learner_a, paths[0])
    learner_b, runs_b = _select(report_b, learner_b, paths[1])
    if set(runs_a) != set(runs_b):
        raise UsageError(f"dataset sets differ: {sorted(runs_a)} vs {sorted(runs_b)}")

    datasets = [run["dataset"] for run in report_a["runs"] if run["dataset"] in runs_a]
    datasets = list(dict.fromkeys(datasets))
    errors_a = [runs_a[d]["error_rate"]["mean"] for d in datasets]
    errors_b = [runs_b[d]["error_rate"]["mean"] for d in datasets]

    per_dataset, rejected = [], []
    for name, ea, eb in zip(datasets, errors_a, errors_b):
        perm_a = [r["error_rate"] for r in runs_a[name].get("per_perm", [])]
        perm_b = [r["error_rate"] for r in runs_b[name].get("per_perm", [])]
        entry = {"dataset": name, "error_a": ea, "error_b": eb, "p_value": None, "reject": False}
        if perm_a and len(perm_a) == len(perm_b):
            try:
                res = wilcoxon_signed_rank(perm_a, perm_b, alpha)
                entry["p_value"], entry["reject"] = res.p_value, res.reject
            except InsufficientDataError:
                pass
        entry["winner"] = (learner_a if ea < eb else learner_b if eb < ea else None) if entry["reject"] else None
        rejected.append(entry["reject"])
        per_dataset.append(entry)

    try:
        overall = wilcoxon_signed_rank(errors_a, errors_b, alpha)
    except InsufficientDataError as exc:
        raise UsageError(f"cannot test across datasets: {exc}") from None
    wins, losses = win_loss_count(errors_a, errors_b, rejected)
    return {
        "test": "wilcoxon",
        "alpha": alpha,
        "learner_a": learner_a,
        "learner_b": learner_b,
        "n_datasets": len(datasets),
        "n_effective": overall.n_effective,
        "statistic": overall.statistic,
        "w_plus": overall.w_plus,
        "w_minus": overall.w_minus,
        "method": overall.method,
        "p_value": overall.p_value,
        "reject": overall.reject,
        "wins": wins,
        "losses": losses,
        "per_dataset": per_dataset,
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-gm":
            try:
                write_csv(generate_gm(args.seed), args.out)
            except OSError as exc:
                raise DataError(f"cannot write {args.out}: {exc}") from None
            except RpnbError as exc:
                raise UsageError(str(exc)) from None
        elif args.command == "run":
            config = resolve_run_config(args)
            report = execute_run(config)
            text = _dump_json(report) if config["format"] == "json" else report_to_csv(report)
            _emit(text, config["out"])
        else:
            _emit(_dump_json(execute_compare(args.reports, args.learner_a, args.learner_b, args.alpha)), args.out)
    except UsageError as exc:
        print(f"rpnb: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"rpnb: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

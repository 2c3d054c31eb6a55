"""Command-line interface.

Exit codes: 0 success, 1 property failure, 2 input or parse error, 3 solver
error, 4 ingestion error.  Randomized subcommands take ``--seed`` (default 0)
and are reproducible for a fixed seed.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from typing import Sequence

from .analysis.functionals import Direction, kl_from_log
from .analysis.properties import DEFAULT_SIZES, run_suite
from .analysis.quadrature import Example, run_oracle
from .analysis.transforms import TransformKind, transform_risk
from .errors import EmptyDataset, IngestionError, LengthMismatch, NoConvergence, NonPositiveLambda
from .experiment.harness import (
    ConfigError,
    ExperimentConfig,
    load_config,
    load_image_pools,
    log_summary,
    run_sweep,
    summarize,
    write_csv,
)
from .measure import load_fixture
from .type1 import solve_type1
from .type2 import solve_type2

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_SOLVER, EXIT_INGEST = 0, 1, 2, 3, 4

log = logging.getLogger("ermrer")


def _fail(code: int, exc: BaseException) -> int:
    print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("value must be a positive integer")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}")


def _label_pair(text: str) -> tuple[int, int]:
    parts = [p for p in text.split(",") if p.strip()]
    try:
        pair = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid label list {text!r}")
    if len(pair) != 2 or pair[0] == pair[1]:
        raise argparse.ArgumentTypeError("--keep takes two distinct labels, e.g. 6,7")
    return pair


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ermrer", description="Relative-entropy regularized ERM on finite model sets."
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance and print the solution as JSON")
    s.add_argument("fixture", help='JSON file {"weights": [...], "risks": [...]}')
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--type", choices=("I", "II"), default="II")

    v = sub.add_parser("verify", help="run the randomized property suite")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--instances", type=_positive_int, default=50)
    v.add_argument("--sizes", type=_int_list, default=list(DEFAULT_SIZES))
    v.add_argument("--lambdas", type=_float_list, default=None,
                   help="fixed factors; default draws one log-uniform factor per instance")
    v.add_argument("--perturb-beta", type=float, default=0.0,
                   help="shift every normalization constant (harness self-test)")

    t = sub.add_parser("transform", help="print the V or W transformed risk as JSON")
    t.add_argument("fixture")
    t.add_argument("--lambda", dest="lam", type=float, required=True)
    t.add_argument("--kind", choices=("V", "W"), default="V")

    o = sub.add_parser("oracle", help="run the continuous and closed-form checks")
    o.add_argument("--example", choices=("Ex1", "Ex2", "Ex3", "all"), default="all")

    e = sub.add_parser("experiment", help="run the regularization sweep and write CSV")
    e.add_argument("--config", help="JSON file with ExperimentConfig fields")
    e.add_argument("--out", help="CSV path; stdout when omitted")
    e.add_argument("--seed", type=_seed, default=None, help="overrides rng_seed")
    e.add_argument("--images")
    e.add_argument("--labels")
    e.add_argument("--keep", type=_label_pair, default=None)
    e.add_argument("--test-images")
    e.add_argument("--test-labels")
    return p


def _load(path: str):
    try:
        return load_fixture(path), None
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        return None, exc


def cmd_solve(args) -> int:
    fixture, err = _load(args.fixture)
    if err is not None:
        return _fail(EXIT_INPUT, err)
    Q, L = fixture
    try:
        if args.type == "I":
            sol = solve_type1(Q, L, args.lam)
            out = {"lambda": sol.lam, "log_partition": sol.log_partition}
        else:
            sol = solve_type2(Q, L, args.lam)
            out = {"lambda": sol.lam, "beta": sol.beta}
    except (NonPositiveLambda, NoConvergence) as exc:
        return _fail(EXIT_SOLVER, exc)
    rn = sol.rn_derivative
    out["rn_derivative"] = [float(x) for x in rn]
    out["expected_risk"] = float((Q.weights * rn) @ L.values)
    out["kl_p_q"] = kl_from_log(sol.log_rn, Q, Direction.P_TO_Q)
    out["kl_q_p"] = kl_from_log(sol.log_rn, Q, Direction.Q_TO_P)
    print(json.dumps(out))
    return EXIT_OK


def cmd_transform(args) -> int:
    fixture, err = _load(args.fixture)
    if err is not None:
        return _fail(EXIT_INPUT, err)
    Q, L = fixture
    try:
        tr = transform_risk(Q, L, args.lam, TransformKind(args.kind))
    except (NonPositiveLambda, NoConvergence, ValueError) as exc:
        return _fail(EXIT_SOLVER, exc)
    print(json.dumps({"lambda": tr.lam, "kind": tr.kind.value,
                      "values": [float(x) for x in tr.values]}))
    return EXIT_OK


def cmd_verify(args) -> int:
    if any(not lam > 0 for lam in args.lambdas or []):
        return _fail(EXIT_INPUT, ValueError("--lambdas must be positive"))
    try:
        suite = run_suite(
            seed=args.seed,
            instances=args.instances,
            sizes=args.sizes,
            lambdas=args.lambdas,
            perturb_beta=args.perturb_beta,
        )
    except (NonPositiveLambda, NoConvergence) as exc:
        return _fail(EXIT_SOLVER, exc)
    for line in suite.lines():
        print(line)
    return EXIT_OK if suite.passed else EXIT_PROPERTY


def cmd_oracle(args) -> int:
    which = list(Example) if args.example == "all" else [Example(args.example)]
    reports = [run_oracle(w) for w in which]
    print(json.dumps({r.example.value: {"passed": r.passed, **r.values} for r in reports}))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_PROPERTY


def cmd_experiment(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        overrides = {}
        if args.seed is not None:
            overrides["rng_seed"] = args.seed
        if args.keep is not None:
            overrides["label_pair"] = args.keep
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
    except ConfigError as exc:
        return _fail(EXIT_INPUT, exc)
    if (args.images is None) != (args.labels is None):
        return _fail(EXIT_INPUT, ConfigError("--images and --labels go together"))
    if (args.test_images is None) != (args.test_labels is None):
        return _fail(EXIT_INPUT, ConfigError("--test-images and --test-labels go together"))
    train_pool = test_pool = None
    if args.images is not None:
        try:
            train_pool, test_pool = load_image_pools(
                args.images, args.labels, cfg.label_pair,
                args.test_images, args.test_labels, seed=cfg.rng_seed,
            )
        except (IngestionError, EmptyDataset) as exc:
            return _fail(EXIT_INGEST, exc)
    try:
        rows = run_sweep(cfg, train_pool, test_pool)
    except (NonPositiveLambda, NoConvergence) as exc:
        return _fail(EXIT_SOLVER, exc)
    except (EmptyDataset, LengthMismatch, ValueError) as exc:
        return _fail(EXIT_INGEST, exc)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                write_csv(rows, fh)
        except OSError as exc:
            return _fail(EXIT_INPUT, exc)
    else:
        write_csv(rows, sys.stdout)
    log_summary(summarize(rows))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "transform": cmd_transform,
    "oracle": cmd_oracle,
    "experiment": cmd_experiment,
}


def _setup_logging() -> None:
    # own handler bound to the current stderr, so repeated in-process calls
    # and host applications with configured root loggers behave the same
    pkg = logging.getLogger("ermrer")
    for h in list(pkg.handlers):
        pkg.removeHandler(h)
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("%(message)s"))
    pkg.addHandler(h)
    pkg.setLevel(logging.INFO)
    pkg.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

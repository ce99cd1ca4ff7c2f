"""Command line entry point: ``run``, ``report``, ``validate-config``, ``canonicalize``."""

from __future__ import annotations

import argparse
import json
import sys

from .agent import PolicyError
from .evolve import IncompleteSeedingError, SeedShortfallError
from .ledger import LedgerError
from .molgraph import MoleculeError, parse_smiles
from .objectives import OracleError
from .runner import ConfigError, load_config, report, run, validate_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCOMPLETE_SEED = 3
EXIT_REMOTE = 4

# flag dest -> path in the config dict
_FLAG_PATHS = {
    "mode": ("mode",),
    "target": ("target",),
    "seed": ("seed",),
    "seed_file": ("seed_file",),
    "output_dir": ("output_dir",),
    "budget": ("budget",),
    "n_jobs": ("n_jobs",),
    "cache_path": ("cache_path",),
    "max_steps": ("agent", "max_steps"),
    "max_modifications": ("agent", "max_modifications"),
    "mw_cap": ("agent", "mw_cap"),
    "population_size": ("ga", "population_size"),
    "n_offspring": ("ga", "n_offspring"),
    "k": ("ga", "k"),
    "sampling": ("ga", "sampling"),
    "strict_dominance": ("ga", "strict_dominance"),
    "max_generations": ("ga", "max_generations"),
    "n_islands": ("qd", "n_islands"),
    "n_init": ("qd", "n_init"),
    "generations_per_epoch": ("qd", "generations_per_epoch"),
    "n_migrants": ("qd", "n_migrants"),
    "lam": ("qd", "lam"),
    "oracle": ("oracle", "kind"),
    "oracle_url": ("oracle", "url"),
    "policy": ("policy", "kind"),
    "policy_url": ("policy", "url"),
    "model": ("policy", "model"),
}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override its values")
    p.add_argument("--mode", choices=["ga", "qd"])
    p.add_argument("--target")
    p.add_argument("--seed", type=int)
    p.add_argument("--seed-file")
    p.add_argument("--output-dir")
    p.add_argument("--budget", type=int)
    p.add_argument("--n-jobs", type=int)
    p.add_argument("--cache-path")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--max-modifications", type=int)
    p.add_argument("--mw-cap", type=float)
    ga = p.add_argument_group("ga")
    ga.add_argument("--population-size", type=int)
    ga.add_argument("--n-offspring", type=int)
    ga.add_argument("--k", type=float)
    ga.add_argument("--sampling", choices=["exponential", "pareto_rank"])
    ga.add_argument(
        "--weak-dominance",
        dest="strict_dominance",
        action="store_false",
        default=None,
        help="use conventional weak dominance instead of the strict default",
    )
    ga.add_argument("--max-generations", type=int)
    qd = p.add_argument_group("qd")
    qd.add_argument("--n-islands", type=int)
    qd.add_argument("--n-init", type=int)
    qd.add_argument("--generations-per-epoch", type=int)
    qd.add_argument("--n-migrants", type=int)
    qd.add_argument("--lam", type=float)
    remote = p.add_argument_group("oracle and policy")
    remote.add_argument("--oracle", choices=["surrogate", "remote"])
    remote.add_argument("--oracle-url")
    remote.add_argument("--policy", choices=["scripted", "remote"])
    remote.add_argument("--policy-url")
    remote.add_argument("--model")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molagent", description="Agent-driven evolutionary molecular design.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("run", help="run a GA or MAP-Elites search"))
    rep = sub.add_parser("report", help="recompute metrics from a ledger")
    rep.add_argument("ledger")
    rep.add_argument("--output-dir", help="defaults to the ledger's directory")
    rep.add_argument("--threshold", type=float, default=0.6, help="Butina similarity threshold")
    rep.add_argument("--top-k", type=int, default=10)
    val = sub.add_parser("validate-config", help="check a JSON run config")
    val.add_argument("config")
    sub.add_parser("canonicalize", help="read SMILES on stdin, write canonical SMILES")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    out: dict = {}
    for dest, path in _FLAG_PATHS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        node = out
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = value
    return out


def _err(msg: str) -> None:
    print(f"molagent: {msg}", file=sys.stderr)


def _cmd_run(args) -> int:
    overrides = overrides_from_args(args)
    try:
        cfg = load_config(args.config, overrides) if args.config else validate_config(overrides)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    try:
        result = run(cfg)
    except (ConfigError, SeedShortfallError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except IncompleteSeedingError as exc:
        _err(str(exc))
        return EXIT_INCOMPLETE_SEED
    except (OracleError, PolicyError) as exc:
        _err(str(exc))
        return EXIT_REMOTE
    est = result.estimator
    print(
        f"mode={cfg['mode']} evaluations={est.n_evaluations_}/{cfg['budget']} "
        f"stop={est.stop_reason_} ledger={result.ledger_path}"
    )
    print(json.dumps(result.report.summary, sort_keys=True))
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        rep = report(args.ledger, args.output_dir, threshold=args.threshold, k=args.top_k)
    except FileNotFoundError:
        _err(f"ledger not found: {args.ledger}")
        return EXIT_CONFIG
    except LedgerError as exc:
        _err(f"{args.ledger}: {exc}")
        return EXIT_CONFIG
    print(json.dumps(rep.summary, sort_keys=True))
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    print(json.dumps(cfg, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_canonicalize(args) -> int:
    status = EXIT_OK
    for n, line in enumerate(sys.stdin, 1):
        text = line.strip()
        if not text:
            continue
        try:
            print(parse_smiles(text.split()[0]).smiles)
        except MoleculeError as exc:
            _err(f"line {n}: {exc}")
            status = EXIT_CONFIG
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "report": _cmd_report,
        "validate-config": _cmd_validate,
        "canonicalize": _cmd_canonicalize,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

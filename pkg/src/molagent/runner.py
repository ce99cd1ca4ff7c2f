"""Run configuration, seed loading and the end-to-end pipeline behind the CLI."""

from __future__ import annotations

import copy
import json
import os
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .agent import RemoteLLMPolicy, ScriptedPolicy
from .evolve import ParetoGA, SeedShortfallError, _derived_seed
from .ledger import Ledger, read_ledger
from .metrics import RunReport, evaluate_run, write_report
from .molgraph import MoleculeError, parse_smiles
from .objectives import RemoteAffinityOracle, SurrogateAffinityOracle
from .qd import IslandMapElites


class ConfigError(ValueError):
    """Invalid run configuration or missing input file."""


DEFAULT_CONFIG = {
    "mode": "ga",
    "target": "target",
    "seed": 0,
    "seed_file": None,
    "output_dir": "run",
    "budget": 1000,
    "n_jobs": 1,
    "cache_path": None,
    "agent": {"max_steps": 10, "max_modifications": 3, "mw_cap": 700.0},
    "ga": {
        "population_size": 60,
        "n_offspring": 35,
        "k": 10.0,
        "sampling": "exponential",
        "strict_dominance": True,
        "max_stall": 25,
        "max_generations": None,
    },
    "qd": {
        "n_islands": 4,
        "n_init": 40,
        "generations_per_epoch": 10,
        "n_migrants": 2,
        "lam": 1.0,
        "max_stall": 20,
    },
    "oracle": {"kind": "surrogate", "url": None, "timeout": 60.0, "max_retries": 3},
    "policy": {"kind": "scripted", "url": None, "model": "default", "timeout": 120.0, "max_retries": 3},
}

_POS_INT = {"type": "integer", "minimum": 1}
_NULL_STR = {"type": ["string", "null"]}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": ["ga", "qd"]},
        "target": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "seed_file": _NULL_STR,
        "output_dir": {"type": "string", "minLength": 1},
        "budget": _POS_INT,
        "n_jobs": _POS_INT,
        "cache_path": _NULL_STR,
        "agent": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_steps": _POS_INT,
                "max_modifications": _POS_INT,
                "mw_cap": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "ga": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "population_size": {"type": "integer", "minimum": 2},
                "n_offspring": _POS_INT,
                "k": {"type": "number", "exclusiveMinimum": 1},
                "sampling": {"enum": ["exponential", "pareto_rank"]},
                "strict_dominance": {"type": "boolean"},
                "max_stall": _POS_INT,
                "max_generations": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "qd": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_islands": _POS_INT,
                "n_init": _POS_INT,
                "generations_per_epoch": _POS_INT,
                "n_migrants": {"type": "integer", "minimum": 0},
                "lam": {"type": "number"},
                "max_stall": _POS_INT,
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["surrogate", "remote"]},
                "url": _NULL_STR,
                "timeout": {"type": "number", "exclusiveMinimum": 0},
                "max_retries": {"type": "integer", "minimum": 0},
            },
        },
        "policy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["scripted", "remote"]},
                "url": _NULL_STR,
                "model": {"type": "string"},
                "timeout": {"type": "number", "exclusiveMinimum": 0},
                "max_retries": {"type": "integer", "minimum": 0},
            },
        },
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def validate_config(raw: dict) -> dict:
    """Check ``raw`` against the schema and fill defaults; raises ConfigError."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None
    cfg = _merge(DEFAULT_CONFIG, raw)
    if cfg["seed_file"] is not None and not Path(cfg["seed_file"]).is_file():
        raise ConfigError(f"seed file not found: {cfg['seed_file']}")
    if cfg["oracle"]["kind"] == "remote" and not (cfg["oracle"]["url"] or os.environ.get("TOOLMOL_ORACLE_URL")):
        raise ConfigError("remote oracle needs oracle.url or TOOLMOL_ORACLE_URL")
    if cfg["policy"]["kind"] == "remote" and not (cfg["policy"]["url"] or os.environ.get("TOOLMOL_LLM_URL")):
        raise ConfigError("remote policy needs policy.url or TOOLMOL_LLM_URL")
    return cfg


def load_config(path: str | os.PathLike, overrides: dict | None = None) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    return validate_config(_merge(raw, overrides or {}))


def bundled_seed_file() -> Path:
    return Path(str(resources.files("molagent") / "data" / "seeds.smi"))


def load_seeds(path: str | os.PathLike | None, count: int, rng: np.random.Generator) -> list[str]:
    """Sample ``count`` valid SMILES lines without replacement.

    Unparseable lines are skipped with a warning.  Returned strings are
    canonical, in sampled order.
    """
    path = bundled_seed_file() if path is None else Path(path)
    if not path.is_file():
        raise ConfigError(f"seed file not found: {path}")
    valid = []
    for n, line in enumerate(path.read_text().splitlines(), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        token = text.split()[0]
        try:
            valid.append(parse_smiles(token).smiles)
        except MoleculeError as exc:
            warnings.warn(f"{path}:{n}: skipping invalid SMILES {token!r} ({exc})", stacklevel=2)
    if len(valid) < count:
        raise SeedShortfallError(f"{path} has {len(valid)} valid molecules, {count} requested")
    picks = rng.choice(len(valid), size=count, replace=False)
    return [valid[int(i)] for i in picks]


def build_oracle(cfg: dict):
    o = cfg["oracle"]
    if o["kind"] == "surrogate":
        return SurrogateAffinityOracle()
    return RemoteAffinityOracle(o["url"], timeout=o["timeout"], max_retries=o["max_retries"])


def build_policy(cfg: dict):
    p = cfg["policy"]
    if p["kind"] == "scripted":
        return ScriptedPolicy()
    return RemoteLLMPolicy(p["url"], model=p["model"], timeout=p["timeout"], max_retries=p["max_retries"])


def build_estimator(cfg: dict, oracle=None, policy=None):
    common = dict(
        budget=cfg["budget"],
        target=cfg["target"],
        n_jobs=cfg["n_jobs"],
        random_state=cfg["seed"],
        cache_path=cfg["cache_path"],
        oracle=oracle if oracle is not None else build_oracle(cfg),
        policy=policy if policy is not None else build_policy(cfg),
        **cfg["agent"],
    )
    if cfg["mode"] == "ga":
        return ParetoGA(**cfg["ga"], **common)
    return IslandMapElites(**cfg["qd"], **common)


def seed_count(cfg: dict) -> int:
    return cfg["ga"]["population_size"] if cfg["mode"] == "ga" else cfg["qd"]["n_init"]


@dataclass
class RunResult:
    estimator: object
    report: RunReport
    ledger_path: Path
    report_paths: tuple[Path, Path]


def run(cfg: dict, *, oracle=None, policy=None) -> RunResult:
    """Execute one configured search and write ledger and report files.

    The ledger is streamed to ``output_dir/ledger.jsonl`` as rows are
    produced; if the search raises, a report is still written for whatever
    the ledger holds before the error propagates.
    """
    out = Path(cfg["output_dir"])
    rng = np.random.default_rng(_derived_seed(cfg["seed"], 0x5EED))
    seeds = load_seeds(cfg["seed_file"], seed_count(cfg), rng)
    est = build_estimator(cfg, oracle, policy)
    ledger_path = out / "ledger.jsonl"
    ledger = Ledger(ledger_path)
    try:
        est.fit(seeds, ledger=ledger)
    finally:
        report = evaluate_run(ledger.rows)
        paths = write_report(report, out)
    return RunResult(est, report, ledger_path, paths)


def report(ledger_path: str | os.PathLike, output_dir: str | os.PathLike | None = None, **kwargs) -> RunReport:
    rows = read_ledger(ledger_path)
    rep = evaluate_run(rows, **kwargs)
    write_report(rep, output_dir if output_dir is not None else Path(ledger_path).parent)
    return rep

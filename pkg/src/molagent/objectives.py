"""Objective scores, scaling to [0, 1], fitness and budgeted oracle evaluation."""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from .descriptors import compute_descriptors, surrogate_qed, surrogate_sa
from .molgraph import Molecule, parse_cached

AFFINITY_BOUND = 13.0  # kcal/mol; -13 maps to f_affinity = 1


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def scale_objectives(dG: float, qed: float, sa: float) -> tuple[float, float, float]:
    """Higher-is-better components in [0, 1]."""
    return (_clamp01(-dG / AFFINITY_BOUND), _clamp01(qed), _clamp01((10.0 - sa) / 9.0))


def fitness(dG: float, qed: float, sa: float) -> float:
    return sum(scale_objectives(dG, qed, sa))


@dataclass(frozen=True)
class Scores:
    dG: float
    qed: float
    sa: float

    @property
    def scaled(self) -> tuple[float, float, float]:
        return scale_objectives(self.dG, self.qed, self.sa)

    @property
    def phi(self) -> float:
        return sum(self.scaled)


@dataclass(frozen=True)
class ScoredMolecule:
    smiles: str
    scores: Scores

    @property
    def dG(self) -> float:
        return self.scores.dG

    @property
    def qed(self) -> float:
        return self.scores.qed

    @property
    def sa(self) -> float:
        return self.scores.sa

    @property
    def scaled(self) -> tuple[float, float, float]:
        return self.scores.scaled

    @property
    def phi(self) -> float:
        return self.scores.phi


# -- affinity oracles --------------------------------------------------------


class OracleError(RuntimeError):
    """The affinity oracle failed after retries or sent a malformed reply."""


class AffinityOracle(Protocol):
    def score_batch(self, smiles: Sequence[str], target: str) -> list[float]: ...


def _unit_hash(*parts) -> float:
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(h, "big") / 2.0**64


def surrogate_affinity(mol: Molecule, target: str, seed: int = 0) -> float:
    d = compute_descriptors(mol)
    u = _unit_hash(mol.smiles, target, seed)
    raw = (
        0.35 * d.heavy_atom_count**0.8
        + 0.6 * d.aromatic_ring_count
        + 0.25 * d.h_bond_donors
        + 0.25 * d.h_bond_acceptors
        + u
    )
    return -min(AFFINITY_BOUND, raw)


class SurrogateAffinityOracle:
    """Deterministic desk-scale affinity stand-in."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.n_calls = 0

    def score_batch(self, smiles: Sequence[str], target: str) -> list[float]:
        self.n_calls += 1
        return [surrogate_affinity(parse_cached(s), target, self.seed) for s in smiles]


class RemoteAffinityOracle:
    """Client for ``POST {url}/score`` returning index-aligned affinities."""

    def __init__(
        self,
        url: str | None = None,
        *,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 0.5,
        client: httpx.Client | None = None,
    ):
        url = url or os.environ.get("TOOLMOL_ORACLE_URL")
        if not url:
            raise ValueError("remote oracle needs a URL (argument or TOOLMOL_ORACLE_URL)")
        self.url = url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._client = client or httpx.Client(timeout=timeout)
        self.n_calls = 0

    def score_batch(self, smiles: Sequence[str], target: str) -> list[float]:
        payload = {"target": target, "smiles": list(smiles)}
        last: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                self.n_calls += 1
                resp = self._client.post(self.url + "/score", json=payload)
            except httpx.HTTPError as exc:
                last = exc
                continue
            if resp.status_code >= 500 or resp.status_code == 429:
                last = OracleError(f"oracle returned HTTP {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise OracleError(f"oracle rejected the request: HTTP {resp.status_code}")
            return self._parse(resp, len(payload["smiles"]))
        raise OracleError(f"oracle unreachable after {self.max_retries + 1} attempts: {last}")

    @staticmethod
    def _parse(resp: httpx.Response, n: int) -> list[float]:
        try:
            body = resp.json()
        except ValueError:
            raise OracleError("oracle response is not JSON") from None
        values = body.get("affinities") if isinstance(body, dict) else None
        if not isinstance(values, list) or len(values) != n:
            raise OracleError(f"oracle response must hold {n} affinities")
        out = []
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v != v or v in (float("inf"), float("-inf")):
                raise OracleError(f"oracle returned a non-numeric affinity: {v!r}")
            out.append(float(v))
        return out


# -- drug-likeness / synthesizability -----------------------------------------

# provider(mol) -> (qed, sa)
DescriptorProvider = Callable[[Molecule], tuple[float, float]]


def surrogate_provider(mol: Molecule) -> tuple[float, float]:
    d = compute_descriptors(mol)
    return surrogate_qed(d), surrogate_sa(mol, d)


# -- evaluation with budget and cache ----------------------------------------


@dataclass(frozen=True)
class Evaluation:
    """One entry of an evaluated batch; ``scores`` is None when deferred."""

    smiles: str
    scores: Scores | None
    charged: bool


@dataclass(frozen=True)
class EvaluationBatch:
    results: tuple[Evaluation, ...]
    exhausted: bool

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)


class Evaluator:
    """Scores molecules, charging the budget once per new canonical SMILES.

    ``evaluate`` is serialized by a lock, so the spent count can never pass
    the budget however many threads call it.
    """

    def __init__(
        self,
        oracle: AffinityOracle,
        target: str,
        budget: int,
        provider: DescriptorProvider | None = None,
        cache_path: str | os.PathLike | None = None,
    ):
        if budget < 0:
            raise ValueError("budget must be non-negative")
        self.oracle = oracle
        self.target = target
        self.budget = int(budget)
        self.provider = provider or surrogate_provider
        self.spent = 0
        self._cache: dict[str, Scores] = {}
        self._lock = threading.Lock()
        self.cache_path = Path(cache_path) if cache_path else None
        if self.cache_path and self.cache_path.exists():
            self._load_cache()

    @property
    def remaining(self) -> int:
        return self.budget - self.spent

    @property
    def exhausted(self) -> bool:
        return self.spent >= self.budget

    def cached(self, smiles: str) -> Scores | None:
        return self._cache.get(smiles)

    def _load_cache(self) -> None:
        with open(self.cache_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec.get("target") == self.target:
                    self._cache[rec["smiles"]] = Scores(rec["dG"], rec["qed"], rec["sa"])

    def _persist(self, items: list[tuple[str, Scores]]) -> None:
        if not self.cache_path or not items:
            return
        with open(self.cache_path, "a") as fh:
            for smi, sc in items:
                fh.write(
                    json.dumps({"smiles": smi, "target": self.target, "dG": sc.dG, "qed": sc.qed, "sa": sc.sa})
                    + "\n"
                )

    def evaluate(self, molecules: Sequence[Molecule | str]) -> EvaluationBatch:
        mols = [m if isinstance(m, Molecule) else parse_cached(m) for m in molecules]
        keys = [m.smiles for m in mols]
        with self._lock:
            misses: list[int] = []
            seen: set[str] = set()
            for i, k in enumerate(keys):
                if k not in self._cache and k not in seen:
                    seen.add(k)
                    misses.append(i)
            allowed = misses[: max(0, self.remaining)]
            deferred = len(misses) > len(allowed)
            if allowed:
                affinities = self.oracle.score_batch([keys[i] for i in allowed], self.target)
                new = []
                for i, dG in zip(allowed, affinities):
                    qed, sa = self.provider(mols[i])
                    sc = Scores(float(dG), float(qed), float(sa))
                    self._cache[keys[i]] = sc
                    new.append((keys[i], sc))
                self.spent += len(allowed)
                self._persist(new)
            charged = set(allowed)
            results = tuple(Evaluation(k, self._cache.get(k), i in charged) for i, k in enumerate(keys))
            return EvaluationBatch(results, deferred or self.exhausted)

"""Run evaluation: Butina clustering, cluster representatives, affinity summaries, hypervolume."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .descriptors import Fingerprint, fingerprint
from .molgraph import parse_cached
from .objectives import Scores, ScoredMolecule
from .pareto import non_dominated_mask
from .utils.validation import check_molecules

NA = "N/A"
REPORT_CSV_FIELDS = ("smiles", "dG", "qed", "sa", "cluster_id")


def similarity_matrix(fps: Sequence[Fingerprint | int]) -> np.ndarray:
    """All-pairs Tanimoto similarity; two empty fingerprints count as identical."""
    bits = [fp.bits if isinstance(fp, Fingerprint) else int(fp) for fp in fps]
    n = len(bits)
    if n == 0:
        return np.zeros((0, 0))
    width = max(1, max(b.bit_length() for b in bits))
    nbytes = (width + 7) // 8
    raw = np.frombuffer(b"".join(b.to_bytes(nbytes, "little") for b in bits), dtype=np.uint8)
    X = np.unpackbits(raw.reshape(n, nbytes), axis=1).astype(np.float32)
    inter = (X @ X.T).astype(np.int64)
    counts = np.diag(inter)
    union = counts[:, None] + counts[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
    return sim


def butina_clusters(
    fps: Sequence[Fingerprint | int] | None = None,
    keys: Sequence[str] | None = None,
    threshold: float = 0.6,
    *,
    similarity: np.ndarray | None = None,
) -> list[list[int]]:
    """Greedy sphere-exclusion clustering.

    Two items are neighbours when their similarity is at least ``threshold``.
    The unassigned item with the most unassigned neighbours becomes the next
    centroid (ties go to the smallest key) and takes all of its unassigned
    neighbours.  Counts are refreshed after every cluster.  Each returned
    cluster lists the centroid first, then members in index order.
    """
    sim = similarity_matrix(fps) if similarity is None else np.asarray(similarity, dtype=float)
    n = sim.shape[0]
    if keys is None:
        keys = [f"{i:012d}" for i in range(n)]
    if len(keys) != n:
        raise ValueError("keys and fingerprints differ in length")
    adj = sim >= threshold
    np.fill_diagonal(adj, False)
    key_rank = np.empty(n, dtype=np.int64)
    key_rank[np.argsort(np.asarray(keys, dtype=object), kind="stable")] = np.arange(n)
    unassigned = np.ones(n, dtype=bool)
    counts = adj.sum(axis=1).astype(np.int64)
    clusters = []
    while unassigned.any():
        cand = np.flatnonzero(unassigned)
        top = cand[counts[cand] == counts[cand].max()]
        c = int(top[np.argmin(key_rank[top])])
        members = np.flatnonzero(adj[c] & unassigned)
        taken = np.concatenate(([c], members))
        unassigned[taken] = False
        counts -= adj[taken].sum(axis=0)
        clusters.append([c] + [int(m) for m in members])
    return clusters


class ButinaClustering(ClusterMixin, BaseEstimator):
    """Butina clustering of SMILES by fingerprint Tanimoto similarity.

    Attributes
    ----------
    labels_ : ndarray of int
    clusters_ : list of list of int
        Indices into the input, centroid first.
    centroids_ : ndarray of int
    """

    def __init__(self, threshold: float = 0.6):
        self.threshold = threshold

    def fit(self, X, y=None):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        mols = check_molecules(X)
        self.clusters_ = butina_clusters([fingerprint(m) for m in mols], [m.smiles for m in mols], self.threshold)
        self.labels_ = np.empty(len(mols), dtype=np.int64)
        for cid, members in enumerate(self.clusters_):
            self.labels_[members] = cid
        self.centroids_ = np.array([c[0] for c in self.clusters_], dtype=np.int64)
        return self


def cluster_best(clusters: Iterable[Sequence[int]], pool: Sequence[ScoredMolecule]) -> list[tuple[int, ScoredMolecule]]:
    """``(cluster_id, member)`` with the most negative dG per cluster; ties go to the smaller SMILES."""
    reps = []
    for cid, members in enumerate(clusters):
        best = min((pool[i] for i in members), key=lambda m: (m.dG, m.smiles))
        reps.append((cid, best))
    return reps


def top_k_mean(values: Iterable[float], k: int = 10) -> float | None:
    """Mean of the ``k`` most negative values, or None when there are none."""
    vals = sorted(values)[:k]
    if not vals:
        return None
    return float(np.mean(vals))


def passes_filter(m, qed_min: float = 0.5, sa_max: float = 3.0) -> bool:
    return m.qed > qed_min and m.sa < sa_max


def filtered_affinity(reps: Iterable, k: int = 10, qed_min: float = 0.5, sa_max: float = 3.0) -> float | None:
    return top_k_mean((m.dG for m in reps if passes_filter(m, qed_min, sa_max)), k)


def _area_2d(points: list[tuple[float, float]]) -> float:
    area = 0.0
    low_y = 1.0
    for x, y in sorted(points):
        if y < low_y:
            area += (1.0 - x) * (low_y - y)
            low_y = y
    return area


def hypervolume(points, ref: Sequence[float] = (1.0, 1.0, 1.0)) -> float:
    """Volume dominated by 3-D cost points (lower is better) up to ``ref``.

    Points are shifted so ``ref`` sits at (1, 1, 1); every point must lie in
    the unit cube relative to it.  Slabs between successive z levels are
    measured with a 2-D staircase over the points at or below that level.
    """
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    if P.size == 0:
        return 0.0
    if not np.all(np.isfinite(P)):
        raise ValueError("hypervolume points must be finite")
    P = P + (1.0 - np.asarray(ref, dtype=float))
    if P.min() < 0.0 or P.max() > 1.0:
        raise ValueError("hypervolume points must lie within [0, 1]^3 of the reference")
    P = P[non_dominated_mask(-P, strict=False)]
    P = P[np.argsort(P[:, 2], kind="stable")]
    volume = 0.0
    active: list[tuple[float, float]] = []
    for i in range(len(P)):
        active.append((P[i, 0], P[i, 1]))
        z_next = P[i + 1, 2] if i + 1 < len(P) else 1.0
        if z_next > P[i, 2]:
            volume += _area_2d(active) * (z_next - P[i, 2])
    return float(volume)


def cost_point(scores: Scores) -> tuple[float, float, float]:
    return tuple(1.0 - f for f in scores.scaled)


@dataclass(frozen=True)
class RunReport:
    summary: dict
    representatives: list[dict]

    def to_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True)


def scored_pool(rows: Iterable[dict]) -> list[ScoredMolecule]:
    """Distinct scored molecules in first-seen order."""
    pool: dict[str, ScoredMolecule] = {}
    for r in rows:
        smi = r.get("smiles")
        if not smi or r.get("dG") is None or r.get("qed") is None or r.get("sa") is None:
            continue
        if smi not in pool:
            pool[smi] = ScoredMolecule(smi, Scores(float(r["dG"]), float(r["qed"]), float(r["sa"])))
    return list(pool.values())


def evaluate_run(rows: Iterable[dict], threshold: float = 0.6, k: int = 10) -> RunReport:
    rows = list(rows)
    pool = scored_pool(rows)
    fps = [fingerprint(parse_cached(m.smiles)) for m in pool]
    clusters = butina_clusters(fps, [m.smiles for m in pool], threshold)
    reps = cluster_best(clusters, pool)
    rep_mols = [m for _, m in reps]
    ba = top_k_mean((m.dG for m in rep_mols), k)
    fa = filtered_affinity(rep_mols, k)
    hv = hypervolume([cost_point(m.scores) for m in pool]) if pool else None
    summary = {
        "BA": NA if ba is None else ba,
        "FA": NA if fa is None else fa,
        "HV": NA if hv is None else hv,
        "n_rows": len(rows),
        "n_molecules": len(pool),
        "n_clusters": len(clusters),
        "n_filtered": sum(passes_filter(m) for m in rep_mols),
        "n_charged": sum(1 for r in rows if r.get("charged")),
        "similarity_threshold": threshold,
        "top_k": k,
    }
    representatives = [
        {"smiles": m.smiles, "dG": m.dG, "qed": m.qed, "sa": m.sa, "cluster_id": cid} for cid, m in reps
    ]
    return RunReport(summary, representatives)


def write_report(report: RunReport, out_dir: str | os.PathLike) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = out / "report.json", out / "report.csv"
    json_path.write_text(report.to_json() + "\n")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_CSV_FIELDS)
        writer.writeheader()
        writer.writerows(report.representatives)
    return json_path, csv_path

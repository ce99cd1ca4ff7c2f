"""MAP-Elites islands over molecular-weight bins, using the editing agent."""

from __future__ import annotations

from dataclasses import dataclass

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .descriptors import molecular_weight
from .evolve import _AgentSearch, _derived_seed
from .ledger import Ledger, score_fields
from .molgraph import parse_cached
from .objectives import ScoredMolecule


def bin_of(mw: float, n_bins: int = 50, low: float = 200.0, high: float = 900.0) -> int:
    """Half-open bins of width ``(high - low) / n_bins``; out-of-range values clamp."""
    width = (high - low) / n_bins
    b = int(np.floor((mw - low) / width))
    return min(n_bins - 1, max(0, b))


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class Elite:
    molecule: ScoredMolecule
    mw: float
    n_children: int = 0


class MapElitesGrid:
    """One island: at most one elite per molecular-weight bin."""

    def __init__(self, n_bins: int = 50, low: float = 200.0, high: float = 900.0):
        self.n_bins = n_bins
        self.low = low
        self.high = high
        self.cells: dict[int, Elite] = {}

    def __len__(self) -> int:
        return len(self.cells)

    def bin_of(self, mw: float) -> int:
        return bin_of(mw, self.n_bins, self.low, self.high)

    def occupants(self) -> list[Elite]:
        return [self.cells[b] for b in sorted(self.cells)]

    def offer(self, molecule: ScoredMolecule, mw: float | None = None) -> bool:
        """Place ``molecule`` if its bin is empty or it has strictly higher phi."""
        if mw is None:
            mw = molecular_weight(parse_cached(molecule.smiles))
        b = self.bin_of(mw)
        old = self.cells.get(b)
        if old is not None and not molecule.phi > old.molecule.phi:
            return False
        self.cells[b] = Elite(molecule, mw)
        return True

    def weights(self, lam: float = 1.0) -> np.ndarray:
        occ = self.occupants()
        if not occ:
            raise ValueError("cannot sample from an empty grid")
        phi = np.array([e.molecule.phi for e in occ])
        alpha = float(np.median(phi))
        w = np.array([sigmoid(lam * (p - alpha)) / (1.0 + e.n_children) for p, e in zip(phi, occ)])
        return w / w.sum()

    def sample_parents(self, rng: np.random.Generator, lam: float = 1.0) -> tuple[Elite, Elite]:
        """Two independent draws; each draw adds one to the chosen elite's count."""
        occ = self.occupants()
        p = self.weights(lam)
        i, j = rng.choice(len(occ), size=2, p=p)
        a, b = occ[int(i)], occ[int(j)]
        a.n_children += 1
        b.n_children += 1
        return a, b

    def best(self) -> Elite | None:
        occ = self.occupants()
        if not occ:
            return None
        return min(occ, key=lambda e: (-e.molecule.phi, e.molecule.smiles))


class IslandMapElites(_AgentSearch):
    """Independent MAP-Elites islands with periodic migration.

    Seeds are spread over the islands at random.  Each epoch runs
    ``generations_per_epoch`` single-child generations on every island (in
    island order), then every island sends ``n_migrants`` randomly chosen
    elites, never its best one, to another random island.

    Attributes
    ----------
    islands_ : list of MapElitesGrid
    pool_ : dict
        Every scored molecule by canonical SMILES, accepted or not.
    ledger_ : Ledger
    migrations_ : list of dict
        ``{"epoch", "source", "destination", "smiles", "accepted", "source_best"}``.
    n_evaluations_ : int
    """

    def __init__(
        self,
        n_islands: int = 4,
        n_init: int = 40,
        generations_per_epoch: int = 10,
        n_migrants: int = 2,
        lam: float = 1.0,
        budget: int = 1000,
        n_bins: int = 50,
        mw_range: tuple[float, float] = (200.0, 900.0),
        target: str = "target",
        max_steps: int = 10,
        max_modifications: int = 3,
        mw_cap: float = 700.0,
        max_stall: int = 20,
        n_jobs: int = 1,
        random_state=None,
        policy=None,
        oracle=None,
        provider=None,
        cache_path=None,
        on_accept=None,
    ):
        self.n_islands = n_islands
        self.n_init = n_init
        self.generations_per_epoch = generations_per_epoch
        self.n_migrants = n_migrants
        self.lam = lam
        self.budget = budget
        self.n_bins = n_bins
        self.mw_range = mw_range
        self.target = target
        self.max_steps = max_steps
        self.max_modifications = max_modifications
        self.mw_cap = mw_cap
        self.max_stall = max_stall
        self.n_jobs = n_jobs
        self.random_state = random_state
        self.policy = policy
        self.oracle = oracle
        self.provider = provider
        self.cache_path = cache_path
        self.on_accept = on_accept

    def _validate_params(self):
        for name in ("n_islands", "n_init", "generations_per_epoch", "n_bins", "max_stall"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_migrants < 0:
            raise ValueError("n_migrants must be >= 0")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        lo, hi = self.mw_range
        if not hi > lo:
            raise ValueError("mw_range must be increasing")

    def _offer(self, island: int, molecule: ScoredMolecule, mw: float) -> bool:
        grid = self.islands_[island]
        b = grid.bin_of(mw)
        before = grid.cells.get(b)
        accepted = grid.offer(molecule, mw)
        if accepted and self.on_accept is not None:
            self.on_accept(island, b, before.molecule if before else None, molecule)
        return accepted

    def fit(self, X, y=None, ledger: Ledger | None = None):
        self._validate_params()
        self._setup(ledger)
        lo, hi = self.mw_range
        self.islands_ = [MapElitesGrid(self.n_bins, lo, hi) for _ in range(self.n_islands)]
        self.migrations_ = []
        rng = np.random.default_rng(_derived_seed(self.seed_, 0x0D))
        seeds = self._seed_molecules(X, self.n_init)
        homes = [int(rng.integers(self.n_islands)) for _ in seeds]
        mws = {s: molecular_weight(parse_cached(s)) for s in seeds}
        self._score_seeds(
            seeds,
            place=lambda i, sm: self._offer(homes[i], sm, mws[sm.smiles]),
            island=homes,
            generation=0,
        )

        island_rngs = [np.random.default_rng(_derived_seed(self.seed_, 0x0D, i + 1)) for i in range(self.n_islands)]
        self._ledger_lock = threading.Lock()
        epoch = 0
        stall = 0
        while not self.evaluator_.exhausted and stall < self.max_stall:
            epoch += 1
            spent_before = self.evaluator_.spent
            blocks = [(i, island_rngs[i], epoch) for i in range(self.n_islands)]
            if self.n_jobs is not None and self.n_jobs > 1:
                with ThreadPoolExecutor(max_workers=min(self.n_jobs, self.n_islands)) as pool:
                    list(pool.map(lambda b: self._island_block(*b), blocks))
            else:
                for b in blocks:
                    self._island_block(*b)
            stall = stall + 1 if self.evaluator_.spent == spent_before else 0
            if self.evaluator_.exhausted or stall >= self.max_stall:
                break
            self._migrate(rng, epoch)
        self.stop_reason_ = "budget" if self.evaluator_.exhausted else "stalled"
        self.n_epochs_ = epoch
        self.n_evaluations_ = self.evaluator_.spent
        return self

    def _island_block(self, island: int, rng: np.random.Generator, epoch: int) -> None:
        grid = self.islands_[island]
        for g in range(self.generations_per_epoch):
            if self.evaluator_.exhausted or len(grid) == 0:
                return
            generation = (epoch - 1) * self.generations_per_epoch + g + 1
            a, b = grid.sample_parents(rng, self.lam)
            ((row_seed, rec),) = self._offspring([(a.molecule, b.molecule)], generation, stream=island + 1)
            ev = None
            accepted = False
            if not rec.failed:
                ev = self.evaluator_.evaluate([rec.final_smiles]).results[0]
                if ev.scores is not None:
                    sm = ScoredMolecule(ev.smiles, ev.scores)
                    accepted = self._offer(island, sm, molecular_weight(parse_cached(sm.smiles)))
            with self._ledger_lock:
                if ev is not None and ev.scores is not None:
                    self.pool_.setdefault(ev.smiles, ScoredMolecule(ev.smiles, ev.scores))
                self.ledger_.append(
                    kind="offspring",
                    status="failed" if rec.failed else ("scored" if ev.scores is not None else "deferred"),
                    smiles=None if rec.failed else ev.smiles,
                    parents=list(rec.parents),
                    seed=row_seed,
                    tool_trace=rec.tool_trace,
                    charged=bool(ev is not None and ev.charged),
                    accepted=accepted,
                    island=island,
                    generation=generation,
                    **score_fields(None if ev is None else ev.scores),
                )

    def _migrate(self, rng: np.random.Generator, epoch: int) -> None:
        outgoing = []
        for src, grid in enumerate(self.islands_):
            best = grid.best()
            candidates = [e for e in grid.occupants() if best is None or e.molecule.smiles != best.molecule.smiles]
            if not candidates or self.n_islands < 2:
                continue
            take = min(self.n_migrants, len(candidates))
            picks = rng.choice(len(candidates), size=take, replace=False)
            for p in sorted(int(x) for x in picks):
                others = [i for i in range(self.n_islands) if i != src]
                dest = others[int(rng.integers(len(others)))]
                outgoing.append((src, dest, candidates[p], best.molecule.smiles))
        for src, dest, elite, best_smiles in outgoing:
            accepted = self._offer(dest, elite.molecule, elite.mw)
            self.migrations_.append(
                {
                    "epoch": epoch,
                    "source": src,
                    "destination": dest,
                    "smiles": elite.molecule.smiles,
                    "accepted": accepted,
                    "source_best": best_smiles,
                }
            )
            self.ledger_.append(
                kind="migrant",
                status="scored",
                smiles=elite.molecule.smiles,
                parents=[],
                tool_trace=[],
                charged=False,
                accepted=accepted,
                island=dest,
                generation=epoch * self.generations_per_epoch,
                **score_fields(elite.molecule.scores),
            )

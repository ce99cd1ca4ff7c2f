"""Multi-objective genetic algorithm driven by the editing agent."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator

from .agent import AgentConfig, ScriptedPolicy, agent_gen
from .ledger import Ledger, score_fields
from .objectives import Evaluator, ScoredMolecule, SurrogateAffinityOracle
from .pareto import draw_pair, exponential_weights, non_dominated_mask, pareto_ranks, rank_weights
from .utils.validation import check_molecules, dedupe

SAMPLING_MODES = ("exponential", "pareto_rank")


class SeedShortfallError(ValueError):
    """Fewer seed molecules than the algorithm needs."""


class IncompleteSeedingError(RuntimeError):
    """The budget ran out before every seed molecule could be scored."""


def _entropy(random_state) -> int:
    if random_state is None:
        return int(np.random.SeedSequence().entropy % 2**63)
    if isinstance(random_state, (int, np.integer)) and not isinstance(random_state, bool):
        if random_state < 0:
            raise ValueError("random_state must be non-negative")
        return int(random_state)
    raise ValueError("random_state must be None or a non-negative integer")


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0] >> 1)


class _AgentSearch(BaseEstimator):
    """Shared plumbing: evaluator, ledger, policy and offspring generation."""

    def _setup(self, ledger):
        self.seed_ = _entropy(self.random_state)
        oracle = self.oracle if self.oracle is not None else SurrogateAffinityOracle()
        self.policy_ = self.policy if self.policy is not None else ScriptedPolicy()
        self.evaluator_ = Evaluator(oracle, self.target, self.budget, self.provider, self.cache_path)
        self.ledger_ = ledger if ledger is not None else Ledger()
        self.agent_config_ = AgentConfig(
            max_steps=self.max_steps,
            max_modifications=self.max_modifications,
            mw_cap=self.mw_cap,
            target=self.target,
        )
        self.pool_: dict[str, ScoredMolecule] = {}
        self.stop_reason_ = None

    def _seed_molecules(self, X, count: int) -> list[str]:
        mols = check_molecules(X)
        if len(mols) < count:
            raise SeedShortfallError(f"need {count} seed molecules, got {len(mols)}")
        return [m.smiles for m in dedupe(mols)][:count]

    def _score_seeds(self, smiles: list[str], place=None, **row_fields) -> list[ScoredMolecule]:
        """Score seeds and log them; ``place(i, molecule)`` decides ``accepted``."""
        batch = self.evaluator_.evaluate(smiles)
        scored = []
        for i, ev in enumerate(batch):
            extra = {k: (v[i] if isinstance(v, list) else v) for k, v in row_fields.items()}
            accepted = False
            if ev.scores is not None:
                sm = ScoredMolecule(ev.smiles, ev.scores)
                scored.append(sm)
                self.pool_[sm.smiles] = sm
                accepted = True if place is None else place(i, sm)
            self.ledger_.append(
                kind="seed",
                status="scored" if ev.scores else "deferred",
                smiles=ev.smiles,
                parents=[],
                tool_trace=[],
                charged=ev.charged,
                accepted=accepted,
                **score_fields(ev.scores),
                **extra,
            )
        if len(scored) < len(smiles):
            raise IncompleteSeedingError(
                f"budget {self.budget} exhausted after scoring {len(scored)} of {len(smiles)} seeds"
            )
        return scored

    def _offspring(self, pairs: list[tuple[ScoredMolecule, ScoredMolecule]], generation: int, stream: int = 0):
        """Run one agent generation per parent pair; results keep input order."""

        def job(j):
            row_seed = _derived_seed(self.seed_, stream, generation, j)
            p1, p2 = pairs[j]
            return row_seed, agent_gen(p1, p2, self.policy_, self.agent_config_, np.random.default_rng(row_seed))

        if self.n_jobs is not None and self.n_jobs > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                return list(pool.map(job, range(len(pairs))))
        return [job(j) for j in range(len(pairs))]


class ParetoGA(_AgentSearch):
    """Pareto-frontier genetic algorithm with an agent as variation operator.

    Each generation samples ``n_offspring`` parent pairs from the current
    population (weights ``k**phi`` or Pareto-rank weights), asks the agent
    for one child per pair, scores the children, merges them into the
    population and keeps the non-dominated set (or the top three fronts in
    ``pareto_rank`` mode).  The run stops when the oracle budget is spent.

    Parameters
    ----------
    population_size : int, default 60
        Number of seed molecules taken from ``X``.
    n_offspring : int, default 35
        Agent calls per generation.  Failed calls produce no child.
    k : float, default 10.0
        Base of the exponential sampling weights.
    budget : int, default 1000
        Maximum number of distinct molecules sent to the affinity oracle.
    sampling : {"exponential", "pareto_rank"}
    strict_dominance : bool, default True
        Dominance requires being better in every objective.  ``False``
        switches to the conventional weak rule.
    max_stall : int, default 25
        Stop after this many consecutive generations that spend no budget
        (every child failed or was already known).
    n_jobs : int, default 1
        Threads for offspring generation.  Results do not depend on it.

    Attributes
    ----------
    population_ : list of ScoredMolecule
    frontier_ : list of ScoredMolecule
        Non-dominated members of the final population.
    pool_ : dict
        Every scored molecule (seeds and offspring) by canonical SMILES.
    ledger_ : Ledger
    n_evaluations_ : int
    n_generations_ : int
    history_ : list of dict
    stop_reason_ : str
    """

    def __init__(
        self,
        population_size: int = 60,
        n_offspring: int = 35,
        k: float = 10.0,
        budget: int = 1000,
        sampling: str = "exponential",
        strict_dominance: bool = True,
        target: str = "target",
        max_steps: int = 10,
        max_modifications: int = 3,
        mw_cap: float = 700.0,
        max_stall: int = 25,
        max_generations: int | None = None,
        n_jobs: int = 1,
        random_state=None,
        policy=None,
        oracle=None,
        provider=None,
        cache_path=None,
    ):
        self.population_size = population_size
        self.n_offspring = n_offspring
        self.k = k
        self.budget = budget
        self.sampling = sampling
        self.strict_dominance = strict_dominance
        self.target = target
        self.max_steps = max_steps
        self.max_modifications = max_modifications
        self.mw_cap = mw_cap
        self.max_stall = max_stall
        self.max_generations = max_generations
        self.n_jobs = n_jobs
        self.random_state = random_state
        self.policy = policy
        self.oracle = oracle
        self.provider = provider
        self.cache_path = cache_path

    def _validate_params(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.n_offspring < 1:
            raise ValueError("n_offspring must be >= 1")
        if not self.k > 1:
            raise ValueError("k must be > 1")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"sampling must be one of {SAMPLING_MODES}")
        if self.max_stall < 1:
            raise ValueError("max_stall must be >= 1")

    def _weights(self, population: list[ScoredMolecule]) -> np.ndarray:
        if self.sampling == "exponential":
            return exponential_weights([m.phi for m in population], self.k)
        ranks = pareto_ranks([m.scaled for m in population], strict=self.strict_dominance)
        return rank_weights(ranks)

    def _select(self, members: list[ScoredMolecule]) -> list[ScoredMolecule]:
        F = [m.scaled for m in members]
        if self.sampling == "exponential":
            mask = non_dominated_mask(F, strict=self.strict_dominance)
            return [m for m, keep in zip(members, mask) if keep]
        ranks = pareto_ranks(F, max_rank=3, strict=self.strict_dominance)
        return [m for m, r in zip(members, ranks) if r > 0]

    def fit(self, X, y=None, ledger: Ledger | None = None):
        """Run the search from seed molecules ``X`` (SMILES strings)."""
        self._validate_params()
        self._setup(ledger)
        seeds = self._seed_molecules(X, self.population_size)
        self.n_generations_ = 0
        self.history_ = []
        population = self._score_seeds(seeds, generation=0)
        self.population_ = population
        rng = np.random.default_rng(_derived_seed(self.seed_, 0xA11))
        stall = 0
        while True:
            if self.evaluator_.exhausted:
                self.stop_reason_ = "budget"
                break
            if self.max_generations is not None and self.n_generations_ >= self.max_generations:
                self.stop_reason_ = "max_generations"
                break
            gen = self.n_generations_ + 1
            probs = self._weights(population)
            pairs = []
            for _ in range(self.n_offspring):
                i, j = draw_pair(probs, rng)
                pairs.append((population[i], population[j]))
            records = self._offspring(pairs, gen)
            finals = [rec.final_smiles for _, rec in records if not rec.failed]
            spent_before = self.evaluator_.spent
            batch = iter(self.evaluator_.evaluate(finals)) if finals else iter(())
            outcomes = []
            for row_seed, rec in records:
                ev = None if rec.failed else next(batch)
                outcomes.append((row_seed, rec, ev))
            merged = {m.smiles: m for m in population}
            for _, rec, ev in outcomes:
                if ev is not None and ev.scores is not None and ev.smiles not in merged:
                    sm = ScoredMolecule(ev.smiles, ev.scores)
                    merged[sm.smiles] = sm
                    self.pool_[sm.smiles] = sm
            population = self._select(list(merged.values()))
            survivors = {m.smiles for m in population}
            for row_seed, rec, ev in outcomes:
                if rec.failed:
                    status, smiles, scores, charged = "failed", None, None, False
                else:
                    smiles, scores, charged = ev.smiles, ev.scores, ev.charged
                    status = "scored" if scores is not None else "deferred"
                self.ledger_.append(
                    kind="offspring",
                    status=status,
                    smiles=smiles,
                    parents=list(rec.parents),
                    seed=row_seed,
                    tool_trace=rec.tool_trace,
                    charged=charged,
                    accepted=smiles in survivors if smiles else False,
                    generation=gen,
                    **score_fields(scores),
                )
            self.n_generations_ = gen
            spent = self.evaluator_.spent - spent_before
            self.history_.append(
                {
                    "generation": gen,
                    "evaluations": self.evaluator_.spent,
                    "new_evaluations": spent,
                    "failed": sum(1 for _, rec, _ in outcomes if rec.failed),
                    "population": len(population),
                }
            )
            stall = stall + 1 if spent == 0 else 0
            if stall >= self.max_stall:
                self.stop_reason_ = "stalled"
                break
        self.population_ = population
        mask = non_dominated_mask([m.scaled for m in population], strict=self.strict_dominance)
        self.frontier_ = [m for m, keep in zip(population, mask) if keep]
        self.n_evaluations_ = self.evaluator_.spent
        return self

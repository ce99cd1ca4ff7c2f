import numpy as np
import pytest
from sklearn.base import clone

from helpers import brute_front
from molagent.agent import replay_trace
from molagent.evolve import IncompleteSeedingError, ParetoGA, SeedShortfallError
from molagent.ledger import strip_timestamps
from molagent.molgraph import parse_smiles
from molagent.objectives import scale_objectives
from molagent.pareto import non_dominated_mask


def small(**kw):
    params = dict(population_size=10, n_offspring=5, budget=50, random_state=0)
    params.update(kw)
    return ParetoGA(**params)


def test_estimator_params_roundtrip():
    ga = ParetoGA(population_size=12, k=np.e)
    assert clone(ga).get_params()["population_size"] == 12
    assert ga.get_params()["sampling"] == "exponential"


@pytest.mark.parametrize("budget", [50, 200])
def test_budget_exact(corpus, budget):
    ga = small(budget=budget).fit(corpus[:10])
    assert ga.n_evaluations_ == budget
    assert ga.stop_reason_ == "budget"
    charged = [r for r in ga.ledger_ if r["charged"]]
    assert len(charged) == budget
    assert len({r["smiles"] for r in charged}) == budget


def test_survivors_non_dominated_and_unique(corpus):
    ga = small(budget=120).fit(corpus[10:20])
    F = np.array([m.scaled for m in ga.population_])
    assert brute_front(F).all()
    assert len({m.smiles for m in ga.population_}) == len(ga.population_)


def test_pareto_rank_mode_keeps_three_fronts(corpus):
    ga = small(budget=120, sampling="pareto_rank").fit(corpus[20:30])
    F = np.array([m.scaled for m in ga.population_])
    # peeling the survivors gives at most three fronts
    remaining = F
    for _ in range(3):
        remaining = remaining[~non_dominated_mask(remaining)]
    assert len(remaining) == 0


def test_cumulative_frontier_grows(corpus):
    ga = small(budget=150).fit(corpus[30:40])
    pool = {}
    fronts = []
    last_gen = max(r["generation"] for r in ga.ledger_)
    for gen in range(last_gen + 1):
        for r in ga.ledger_:
            if r["generation"] == gen and r["status"] == "scored":
                pool.setdefault(r["smiles"], scale_objectives(r["dG"], r["qed"], r["sa"]))
        F = np.array(list(pool.values()))
        fronts.append(F[non_dominated_mask(F)])
    # the region covered by the frontier of the accumulated pool never shrinks
    for old, new in zip(fronts, fronts[1:]):
        for p in old:
            assert any(np.all(q >= p) for q in new)


def test_deterministic_and_replayable(corpus):
    a = small(budget=80, random_state=3).fit(corpus[:10])
    b = small(budget=80, random_state=3).fit(corpus[:10])
    assert strip_timestamps(a.ledger_) == strip_timestamps(b.ledger_)
    for row in a.ledger_:
        if row["kind"] == "offspring" and row["status"] != "failed":
            assert replay_trace(row["tool_trace"]) == row["smiles"]


def test_n_jobs_does_not_change_result(corpus):
    a = small(budget=80, random_state=4).fit(corpus[:10])
    b = small(budget=80, random_state=4, n_jobs=8).fit(corpus[:10])
    assert strip_timestamps(a.ledger_) == strip_timestamps(b.ledger_)


def test_identical_seeds_collapse_but_terminate():
    ga = small(budget=30).fit(["CCO"] * 10)
    assert ga.ledger_.rows[0]["smiles"] == parse_smiles("CCO").smiles
    assert sum(1 for r in ga.ledger_ if r["kind"] == "seed") == 1
    assert ga.stop_reason_ in {"budget", "stalled"}


def test_seed_shortfall(corpus):
    with pytest.raises(SeedShortfallError):
        small().fit(corpus[:5])


def test_incomplete_seeding(corpus):
    with pytest.raises(IncompleteSeedingError):
        small(budget=5).fit(corpus[:10])


def test_failed_generations_consume_slots(corpus):
    class NeverEdits:
        def decide(self, conv, tools):
            from molagent.agent import FinalAnswer

            return FinalAnswer()

    ga = small(budget=100, policy=NeverEdits(), max_stall=3).fit(corpus[:10])
    offspring = [r for r in ga.ledger_ if r["kind"] == "offspring"]
    assert len(offspring) == 3 * 5 and all(r["status"] == "failed" for r in offspring)
    assert ga.n_evaluations_ == 10 and ga.stop_reason_ == "stalled"


def test_parameter_validation(corpus):
    for bad in (dict(population_size=1), dict(n_offspring=0), dict(k=1.0), dict(sampling="greedy")):
        with pytest.raises(ValueError):
            small(**bad).fit(corpus[:10])

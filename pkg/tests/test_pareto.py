import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import brute_front
from molagent.pareto import (
    dominates,
    draw_pair,
    exponential_weights,
    non_dominated_mask,
    pareto_ranks,
    rank_weights,
)


def test_dominates_rules():
    assert dominates([2, 2, 2], [1, 1, 1])
    assert not dominates([2, 2, 1], [1, 1, 1])
    assert dominates([2, 2, 1], [1, 1, 1], strict=False)
    assert not dominates([1, 1, 1], [1, 1, 1], strict=False)


def test_duplicates_share_rank_one():
    F = [[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]]
    assert non_dominated_mask(F).all()
    assert list(pareto_ranks(F)) == [1, 1]


def test_ties_co_survive_under_strict_rule():
    F = [[1.0, 0.5, 0.5], [0.5, 0.5, 0.4]]
    assert non_dominated_mask(F).all()
    assert list(non_dominated_mask(F, strict=False)) == [True, False]


def test_mutually_non_dominated_all_rank_one():
    F = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert list(pareto_ranks(F)) == [1, 1, 1]


def test_ranks_peel_in_order():
    F = [[3, 3, 3], [2, 2, 2], [1, 1, 1], [0, 0, 0]]
    assert list(pareto_ranks(F)) == [1, 2, 3, 4]
    assert list(pareto_ranks(F, max_rank=3)) == [1, 2, 3, 0]


def test_frontier_matches_brute_force_random_sets():
    rng = np.random.default_rng(2024)
    for trial in range(200):
        n = int(rng.integers(1, 121))
        # coarse grids produce many ties
        F = rng.integers(0, 6, size=(n, 3)) / 5 if trial % 2 else rng.random((n, 3))
        assert np.array_equal(non_dominated_mask(F), brute_front(F))
        assert np.array_equal(non_dominated_mask(F, strict=False), brute_front(F, strict=False))


def test_two_objective_fallback():
    rng = np.random.default_rng(1)
    F = rng.integers(0, 4, size=(40, 2)).astype(float)
    assert np.array_equal(non_dominated_mask(F), brute_front(F))


def test_input_validation():
    with pytest.raises(ValueError):
        non_dominated_mask([1, 2, 3])
    with pytest.raises(ValueError):
        non_dominated_mask([[np.nan, 0, 0]])
    assert non_dominated_mask(np.zeros((0, 3))).shape == (0,)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 40), st.just(3)), elements=st.sampled_from([0.0, 0.25, 0.5, 1.0])))
def test_frontier_property(F):
    mask = non_dominated_mask(F)
    assert np.array_equal(mask, brute_front(F))
    assert mask.any()
    survivors = F[mask]
    for a in survivors:
        assert not any(np.all(b > a) for b in survivors)


def test_weight_laws():
    p = exponential_weights([0.0, 1.0, 2.0], k=10)
    assert p == pytest.approx(np.array([1, 10, 100]) / 111)
    q = rank_weights([1, 2, 3])
    assert q == pytest.approx(np.array([1 / 2, 1 / 3, 1 / 4]) / (1 / 2 + 1 / 3 + 1 / 4))
    assert exponential_weights([1000.0, 999.0], k=10) == pytest.approx([10 / 11, 1 / 11])
    with pytest.raises(ValueError):
        exponential_weights([], k=10)
    with pytest.raises(ValueError):
        exponential_weights([1.0], k=1)


def test_draw_pair_independent():
    rng = np.random.default_rng(0)
    same = sum(i == j for i, j in (draw_pair(np.array([0.5, 0.5]), rng) for _ in range(4000)))
    assert 0.45 < same / 4000 < 0.55

import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import monte_carlo_hv
from molagent.descriptors import Fingerprint, fingerprint, tanimoto
from molagent.metrics import (
    NA,
    ButinaClustering,
    butina_clusters,
    cluster_best,
    evaluate_run,
    filtered_affinity,
    hypervolume,
    similarity_matrix,
    top_k_mean,
    write_report,
)
from molagent.molgraph import parse_smiles
from molagent.objectives import Scores, ScoredMolecule


def row(smiles, dG, qed=0.6, sa=2.0, **kw):
    return {"smiles": parse_smiles(smiles).smiles, "dG": dG, "qed": qed, "sa": sa, "status": "scored", **kw}


# -- Butina -----------------------------------------------------------------------


def test_butina_hand_executed_bitsets():
    fps = [0b11110000, 0b11100000, 0b11111000, 0b00001111, 0b00000111]
    # neighbour counts at 0.6: a2 b2 c2 d1 e1 -> a wins the tie, then d
    assert butina_clusters(fps, list("abcde")) == [[0, 1, 2], [3, 4]]


def test_butina_recounts_after_each_cluster():
    edges = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]
    sim = np.eye(7)
    for i, j in edges:
        sim[i, j] = sim[j, i] = 1.0
    # a takes b, c, d; then f has two unassigned neighbours (e, g), e only one
    assert butina_clusters(keys=list("abcdefg"), similarity=sim) == [[0, 1, 2, 3], [5, 4, 6]]


def test_butina_tie_goes_to_smallest_key():
    sim = np.ones((2, 2))
    assert butina_clusters(keys=["zz", "aa"], similarity=sim) == [[1, 0]]


def test_butina_trivial_cases():
    assert butina_clusters([0b1, 0b1, 0b1], ["a", "b", "c"]) == [[0, 1, 2]]
    assert butina_clusters([0b1, 0b10, 0b100], ["a", "b", "c"]) == [[0], [1], [2]]
    assert butina_clusters([], []) == []


def test_similarity_matrix_matches_pairwise_tanimoto(corpus):
    fps = [fingerprint(parse_smiles(s)) for s in corpus[:60]]
    S = similarity_matrix(fps)
    for i in range(60):
        for j in range(60):
            assert S[i, j] == tanimoto(fps[i], fps[j])


def test_butina_partition_property(corpus):
    est = ButinaClustering(threshold=0.6).fit(corpus[:150])
    members = sorted(i for c in est.clusters_ for i in c)
    assert members == list(range(150))
    fps = [fingerprint(parse_smiles(s)) for s in corpus[:150]]
    for c in est.clusters_:
        for m in c[1:]:
            assert tanimoto(fps[c[0]], fps[m]) >= 0.6
    assert len(set(est.labels_)) == len(est.clusters_)


def test_cluster_best():
    pool = [ScoredMolecule("CC", Scores(-5, 0.5, 2)), ScoredMolecule("CO", Scores(-9, 0.5, 2))]
    assert cluster_best([[0, 1]], pool)[0][1].smiles == "CO"
    assert cluster_best([[0]], pool)[0][1].smiles == "CC"
    tie = [ScoredMolecule("CO", Scores(-7, 0.5, 2)), ScoredMolecule("CC", Scores(-7, 0.5, 2))]
    assert cluster_best([[0, 1]], tie)[0][1].smiles == "CC"


# -- affinity summaries ---------------------------------------------------------------


def test_top_k_examples():
    assert top_k_mean([-float(i) for i in range(1, 13)]) == pytest.approx(-7.5)
    assert top_k_mean([-1.0, -2.0, -3.0]) == pytest.approx(-2.0)
    assert top_k_mean([]) is None


def test_filter_is_strict():
    reps = [
        ScoredMolecule("a", Scores(-9, 0.5, 2.0)),
        ScoredMolecule("b", Scores(-8, 0.6, 3.0)),
        ScoredMolecule("c", Scores(-7, 0.51, 2.99)),
    ]
    assert filtered_affinity(reps) == -7
    assert filtered_affinity(reps[:2]) is None


# -- hypervolume ----------------------------------------------------------------------


def test_hv_examples():
    assert hypervolume([(0, 0, 0)]) == 1.0
    assert hypervolume([(0.5, 0, 0), (0, 0.5, 0)]) == pytest.approx(0.75)
    assert hypervolume([]) == 0.0
    assert hypervolume([(1, 1, 1)]) == 0.0


def test_hv_rejects_out_of_range():
    with pytest.raises(ValueError):
        hypervolume([(1.2, 0, 0)])
    with pytest.raises(ValueError):
        hypervolume([(-0.1, 0, 0)])


def test_hv_monte_carlo_small():
    rng = np.random.default_rng(11)
    samples = rng.random((400_000, 3))
    for _ in range(5):
        P = rng.random((int(rng.integers(1, 12)), 3))
        assert hypervolume(P) == pytest.approx(monte_carlo_hv(P, samples), abs=0.006)


def test_hv_inclusion_exclusion_two_boxes():
    a, b = np.array([0.2, 0.4, 0.1]), np.array([0.5, 0.1, 0.3])
    vol = lambda p: float(np.prod(1 - p))  # noqa: E731
    assert hypervolume([a, b]) == pytest.approx(vol(a) + vol(b) - vol(np.maximum(a, b)))


points = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(3)), elements=st.floats(0, 1))


@settings(max_examples=150, deadline=None)
@given(points, points)
def test_hv_properties(P, Q):
    hp = hypervolume(P)
    assert 0.0 <= hp <= 1.0
    assert hypervolume(np.vstack([P, Q])) >= hp - 1e-12
    dominated = np.minimum(P + 0.1, 1.0)
    assert hypervolume(np.vstack([P, dominated])) == pytest.approx(hp, abs=1e-12)
    assert hypervolume(P[::-1]) == pytest.approx(hp, abs=1e-12)


# -- evaluate_run ------------------------------------------------------------------------


def test_evaluate_run_single():
    rep = evaluate_run([row("CCO", -6.5, 0.5, 5.5)])
    assert rep.summary["BA"] == -6.5
    assert rep.summary["HV"] == pytest.approx(0.5 * 0.5 * 0.5)
    assert rep.summary["FA"] == NA


def test_evaluate_run_empty_is_na():
    s = evaluate_run([]).summary
    assert s["BA"] == NA and s["FA"] == NA and s["HV"] == NA


def test_evaluate_run_dedupes_and_ignores_unscored():
    rows = [row("CCO", -6), row("OCC", -6), {"smiles": None, "status": "failed", "dG": None}]
    rep = evaluate_run(rows)
    assert rep.summary["n_molecules"] == 1


def test_dominated_addition_keeps_hv():
    base = [row("CCO", -10, 0.8, 2.0)]
    worse = base + [row("CCN", -5, 0.5, 4.0)]
    assert evaluate_run(worse).summary["HV"] == pytest.approx(evaluate_run(base).summary["HV"])


def test_write_report(tmp_path):
    rep = evaluate_run([row("CCO", -6.5), row("c1ccccc1", -8.0)])
    jpath, cpath = write_report(rep, tmp_path)
    assert json.loads(jpath.read_text())["BA"] == pytest.approx(-7.25)
    rows = list(csv.DictReader(cpath.open()))
    assert list(rows[0]) == ["smiles", "dG", "qed", "sa", "cluster_id"]
    assert len(rows) == 2


def test_fingerprint_objects_accepted():
    assert butina_clusters([Fingerprint(0b11, 8), Fingerprint(0b11, 8)], ["a", "b"]) == [[0, 1]]

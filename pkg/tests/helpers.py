"""Independent oracles used by several test modules."""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from molagent.molgraph import Bond, Molecule


def to_networkx(mol: Molecule) -> nx.Graph:
    g = nx.Graph()
    for i, a in enumerate(mol.atoms):
        g.add_node(i, label=(a.element, a.charge, a.aromatic, mol.hydrogens(i)))
    for b in mol.bonds:
        g.add_edge(b.begin, b.end, label=b.type.value)
    return g


def isomorphic(a: Molecule, b: Molecule) -> bool:
    return nx.is_isomorphic(
        to_networkx(a),
        to_networkx(b),
        node_match=lambda x, y: x["label"] == y["label"],
        edge_match=lambda x, y: x["label"] == y["label"],
    )


def permuted(mol: Molecule, rng: np.random.Generator) -> Molecule:
    """Same graph with atoms and bonds shuffled."""
    n = len(mol)
    perm = rng.permutation(n)  # old index -> new index
    atoms = [None] * n
    for old, new in enumerate(perm):
        atoms[new] = mol.atoms[old]
    bonds = []
    for b in mol.bonds:
        u, v = int(perm[b.begin]), int(perm[b.end])
        if rng.random() < 0.5:
            u, v = v, u
        bonds.append(Bond(u, v, b.type))
    order = rng.permutation(len(bonds))
    return Molecule(atoms, [bonds[k] for k in order])


def brute_front(F, strict: bool = True) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    keep = np.ones(len(F), dtype=bool)
    for i, j in itertools.product(range(len(F)), repeat=2):
        if i == j:
            continue
        if strict:
            dom = all(F[j, d] > F[i, d] for d in range(F.shape[1]))
        else:
            dom = all(F[j, d] >= F[i, d] for d in range(F.shape[1])) and any(
                F[j, d] > F[i, d] for d in range(F.shape[1])
            )
        if dom:
            keep[i] = False
    return keep


def monte_carlo_hv(P, samples: np.ndarray) -> float:
    """Fraction of unit-cube samples weakly dominated (as costs) by some point."""
    hit = np.zeros(len(samples), dtype=bool)
    for p in np.asarray(P, dtype=float):
        hit |= np.all(samples >= p, axis=1)
    return float(hit.mean())


def brute_betweenness(n: int, edges: list[tuple[int, int]]) -> list[float]:
    """Count shortest paths through each vertex by enumerating them all."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    out = [0.0] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = list(nx.all_shortest_paths(g, s, t))
        for v in range(n):
            if v in (s, t):
                continue
            out[v] += sum(1 for p in paths if v in p) / len(paths)
    if n < 3:
        return [0.0] * n
    norm = (n - 1) * (n - 2) / 2
    return [x / norm for x in out]


FUZZ_ELEMENTS = ("C", "N", "O", "F", "Cl", "Br", "S", "P", "I", "B", "Xe")
FUZZ_BONDS = ("single", "double", "triple")
FUZZ_SUBSTRUCTURES = ("[*1]O", "[*1]C(=O)N", "[*1]c1ccccc1", "[*1]C#N", "OCC", "[*1]N(C)C", "[*1]S(=O)(=O)N")
FUZZ_SMARTS = ("O", "[OX2H]", "C", "N", "c1ccccc1", "C(=O)O", "[#6]", "F", "Cl", "C#N", "*", "[NX3]")
FUZZ_NEW = ("N", "O", "[*1]C", "[*1]OC", "F", "[*1]c1ccccc1", "Cl")


def random_tool_call(rng: np.random.Generator, corpus: list[str]) -> tuple[str, dict]:
    """A random, type-correct call; indices may be out of range on purpose."""
    from molagent.molgraph import parse_cached
    from molagent.toolbox import FUNCTIONAL_GROUPS, TOOL_NAMES

    def pick(seq):
        return seq[int(rng.integers(len(seq)))]

    smiles = pick(corpus)
    n = len(parse_cached(smiles))
    idx = int(rng.integers(-1, n + 1))
    tool = pick(TOOL_NAMES)
    if tool == "add_atom":
        return tool, {"mol": smiles, "idx": idx, "element": pick(FUZZ_ELEMENTS), "bond": pick(FUZZ_BONDS)}
    if tool == "replace_atom":
        return tool, {"mol": smiles, "idx": idx, "element": pick(FUZZ_ELEMENTS)}
    if tool == "add_functional_group":
        groups = sorted(FUNCTIONAL_GROUPS) + ["unobtainium"]
        return tool, {"mol": smiles, "idx": idx, "group": pick(groups), "bond": pick(FUZZ_BONDS)}
    if tool == "add_substructure":
        return tool, {"mol": smiles, "idx": idx, "substructure": pick(FUZZ_SUBSTRUCTURES), "bond": pick(FUZZ_BONDS)}
    if tool == "replace_substructure":
        return tool, {"mol": smiles, "idx": idx, "old_substructure": pick(FUZZ_SMARTS), "new_substructure": pick(FUZZ_NEW)}
    if tool == "remove_substructure":
        return tool, {"mol": smiles, "idx": idx, "substructure": pick(FUZZ_SMARTS)}
    other = pick(corpus)
    m = len(parse_cached(other))
    return tool, {"mol1": smiles, "idx1": idx, "mol2": other, "idx2": int(rng.integers(0, m))}

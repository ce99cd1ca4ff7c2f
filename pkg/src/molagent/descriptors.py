"""Graph-derived descriptors, fingerprints and drug-likeness surrogates.

The QED/SA/logP/TPSA values here are simple documented surrogates, not the
published parameterisations.  Real values can be plugged in through a
descriptor provider (see :mod:`molagent.objectives`).
"""

from __future__ import annotations

import hashlib
import math
from collections import deque
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .molgraph import BondType, Molecule, get_element
from .molgraph.elements import HALOGENS, HYDROGEN_WEIGHT
from .utils.validation import check_molecules

FINGERPRINT_WIDTH = 2048
FINGERPRINT_RADIUS = 2


@dataclass(frozen=True)
class DescriptorSet:
    molecular_weight: float
    heavy_atom_count: int
    ring_count: int
    aromatic_ring_count: int
    h_bond_donors: int
    h_bond_acceptors: int
    rotatable_bonds: int
    logp_proxy: float
    tpsa_proxy: float
    fused_ring_pairs: int = 0
    n_components: int = 1

    def as_dict(self) -> dict:
        return asdict(self)


DESCRIPTOR_NAMES = (
    "molecular_weight",
    "heavy_atom_count",
    "ring_count",
    "aromatic_ring_count",
    "h_bond_donors",
    "h_bond_acceptors",
    "rotatable_bonds",
    "logp_proxy",
    "tpsa_proxy",
)


def molecular_weight(mol: Molecule) -> float:
    return sum(
        get_element(a.element).atomic_weight + HYDROGEN_WEIGHT * mol.hydrogens(i)
        for i, a in enumerate(mol.atoms)
    )


def _cycle_rank(n_atoms: int, edges: list[tuple[int, int]]) -> int:
    """bonds - atoms + components over the given subgraph."""
    if not n_atoms:
        return 0
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = n_atoms
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            components -= 1
    return len(edges) - n_atoms + components


def _is_amide_bond(mol: Molecule, c: int, n: int) -> bool:
    if mol.atoms[c].element != "C" or mol.atoms[n].element != "N":
        return False
    for j, k in mol.incident(c):
        if j != n and mol.atoms[j].element in ("O", "S") and mol.bonds[k].type is BondType.DOUBLE:
            return True
    return False


def _is_pyrrole_type(mol: Molecule, i: int) -> bool:
    """Aromatic N whose lone pair belongs to the ring (no kekule double bond)."""
    atom = mol.atoms[i]
    if atom.element != "N" or not atom.aromatic:
        return False
    return not any(mol.kekule_order(k) == 2 for _, k in mol.incident(i))


def _is_acceptor(mol: Molecule, i: int) -> bool:
    # O with charge <= 0; N with charge <= 0 that is neither pyrrole-type nor amide N
    atom = mol.atoms[i]
    if atom.charge > 0:
        return False
    if atom.element == "O":
        return True
    if atom.element != "N":
        return False
    if _is_pyrrole_type(mol, i):
        return False
    return not any(_is_amide_bond(mol, j, i) for j in mol.neighbors(i))


def _is_rotatable(mol: Molecule, k: int) -> bool:
    bond = mol.bonds[k]
    if bond.type is not BondType.SINGLE or mol.bond_in_ring(k):
        return False
    a, b = bond.begin, bond.end
    if mol.degree(a) < 2 or mol.degree(b) < 2:
        return False
    # a single bond next to a triple bond does not rotate meaningfully
    for x in (a, b):
        if any(mol.bonds[kk].type is BondType.TRIPLE for _, kk in mol.incident(x)):
            return False
    return not (_is_amide_bond(mol, a, b) or _is_amide_bond(mol, b, a))


def _ring_systems(mol: Molecule) -> list[tuple[set[int], list[tuple[int, int]]]]:
    ring_bonds = [(b.begin, b.end) for k, b in enumerate(mol.bonds) if mol.bond_in_ring(k)]
    adj: dict[int, list[int]] = {}
    for a, b in ring_bonds:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen: set[int] = set()
    systems = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.add(v)
                    queue.append(v)
        systems.append((comp, [(a, b) for a, b in ring_bonds if a in comp]))
    return systems


def compute_descriptors(mol: Molecule) -> DescriptorSet:
    """Descriptor set of a molecule; invariant under atom renumbering."""
    n = len(mol)
    edges = [(b.begin, b.end) for b in mol.bonds]
    ring_count = _cycle_rank(n, edges)
    aromatic_edges = [(b.begin, b.end) for b in mol.bonds if b.type is BondType.AROMATIC]
    aromatic_atoms = {i for e in aromatic_edges for i in e}
    aromatic_ring_count = _cycle_rank(len(aromatic_atoms), aromatic_edges)
    # every extra ring in a ring system shares atoms with another ring
    fused = sum(max(0, _cycle_rank(len(atoms), bonds) - 1) for atoms, bonds in _ring_systems(mol))

    donors = acceptors = carbons = hetero = halogens = n_count = o_count = 0
    for i, atom in enumerate(mol.atoms):
        el = atom.element
        if el == "C":
            carbons += 1
        elif el in ("N", "O"):
            hetero += 1
            n_count += el == "N"
            o_count += el == "O"
            if mol.hydrogens(i) >= 1:
                donors += 1
            if _is_acceptor(mol, i):
                acceptors += 1
        elif el in HALOGENS:
            halogens += 1
    rotatable = sum(1 for k in range(len(mol.bonds)) if _is_rotatable(mol, k))
    return DescriptorSet(
        molecular_weight=round(molecular_weight(mol), 3),
        heavy_atom_count=n,
        ring_count=ring_count,
        aromatic_ring_count=aromatic_ring_count,
        h_bond_donors=donors,
        h_bond_acceptors=acceptors,
        rotatable_bonds=rotatable,
        logp_proxy=0.5 * carbons - 0.7 * hetero + 0.3 * halogens,
        tpsa_proxy=20.0 * n_count + 17.0 * o_count,
        fused_ring_pairs=fused,
        n_components=mol.n_components,
    )


def betweenness_centrality(mol: Molecule) -> list[float]:
    """Normalized betweenness of every atom (Brandes, unweighted).

    Values are divided by ``(n-1)(n-2)/2``; graphs with fewer than three
    atoms are all zero.
    """
    n = len(mol)
    cb = [0.0] * n
    if n < 3:
        return cb
    adj = [mol.neighbors(i) for i in range(n)]
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    # each unordered pair was counted from both ends
    scale = 1.0 / ((n - 1) * (n - 2))
    return [c * scale for c in cb]


@dataclass(frozen=True)
class Fingerprint:
    bits: int
    width: int = FINGERPRINT_WIDTH

    def __len__(self) -> int:
        return self.width

    @property
    def count(self) -> int:
        return self.bits.bit_count()

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.width, dtype=bool)
        bits = self.bits
        while bits:
            low = bits & -bits
            out[low.bit_length() - 1] = True
            bits ^= low
        return out


def _stable_hash(*parts) -> int:
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def fingerprint(mol: Molecule, radius: int = FINGERPRINT_RADIUS, width: int = FINGERPRINT_WIDTH) -> Fingerprint:
    """Circular (Morgan-like) environment fingerprint."""
    n = len(mol)
    ids = [
        _stable_hash(a.element, mol.degree(i), a.charge, a.aromatic, mol.atom_in_ring(i))
        for i, a in enumerate(mol.atoms)
    ]
    bits = 0
    for ident in ids:
        bits |= 1 << (ident % width)
    for r in range(1, radius + 1):
        new_ids = []
        for i in range(n):
            env = sorted((mol.bonds[k].type.value, ids[j]) for j, k in mol.incident(i))
            new_ids.append(_stable_hash(r, ids[i], tuple(env)))
        ids = new_ids
        for ident in ids:
            bits |= 1 << (ident % width)
    return Fingerprint(bits, width)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    if a.width != b.width:
        raise ValueError(f"fingerprint width mismatch: {a.width} != {b.width}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def surrogate_qed(d: DescriptorSet) -> float:
    """Geometric mean of four Gaussian desirabilities, in [0, 1]."""
    terms = (
        math.exp(-(((d.molecular_weight - 300.0) / 150.0) ** 2)),
        math.exp(-((d.rotatable_bonds / 10.0) ** 2)),
        math.exp(-(((d.ring_count - 2) / 2.0) ** 2)),
        math.exp(-(((d.h_bond_donors + d.h_bond_acceptors - 4) / 4.0) ** 2)),
    )
    if min(terms) == 0.0:
        return 0.0
    return math.exp(sum(math.log(t) for t in terms) / 4.0)


def surrogate_sa(mol: Molecule, d: DescriptorSet | None = None) -> float:
    """Size/ring-complexity synthetic accessibility proxy, in [1, 10]."""
    if d is None:
        d = compute_descriptors(mol)
    score = (
        1.0
        + 0.04 * d.heavy_atom_count
        + 0.7 * max(0, d.ring_count - 3)
        + 0.5 * d.fused_ring_pairs
        + (1.5 if d.n_components > 1 else 0.0)
    )
    return min(10.0, max(1.0, score))


class DescriptorTransformer(TransformerMixin, BaseEstimator):
    """Map SMILES (or molecules) to a dense descriptor matrix.

    Columns follow ``DESCRIPTOR_NAMES``, optionally followed by the
    surrogate QED and SA scores.
    """

    def __init__(self, include_surrogates: bool = True):
        self.include_surrogates = include_surrogates

    def fit(self, X, y=None):
        check_molecules(X)
        self.n_features_out_ = len(self.get_feature_names_out())
        return self

    def transform(self, X):
        mols = check_molecules(X)
        rows = []
        for m in mols:
            d = compute_descriptors(m)
            row = [float(getattr(d, name)) for name in DESCRIPTOR_NAMES]
            if self.include_surrogates:
                row += [surrogate_qed(d), surrogate_sa(m, d)]
            rows.append(row)
        return np.asarray(rows, dtype=float).reshape(len(rows), -1)

    def get_feature_names_out(self, input_features=None):
        names = list(DESCRIPTOR_NAMES)
        if self.include_surrogates:
            names += ["qed", "sa"]
        return np.asarray(names, dtype=object)


class FingerprintTransformer(TransformerMixin, BaseEstimator):
    """Map SMILES (or molecules) to a boolean fingerprint matrix."""

    def __init__(self, radius: int = FINGERPRINT_RADIUS, n_bits: int = FINGERPRINT_WIDTH):
        self.radius = radius
        self.n_bits = n_bits

    def fit(self, X, y=None):
        check_molecules(X)
        return self

    def transform(self, X):
        mols = check_molecules(X)
        out = np.zeros((len(mols), self.n_bits), dtype=bool)
        for r, m in enumerate(mols):
            out[r] = fingerprint(m, self.radius, self.n_bits).to_array()
        return out

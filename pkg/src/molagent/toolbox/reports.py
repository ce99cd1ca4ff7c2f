"""Per-atom structure and whole-molecule property reports shown to the policy."""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Callable

from ..descriptors import betweenness_centrality, compute_descriptors, surrogate_qed, surrogate_sa
from ..molgraph import Molecule, max_valence, parse_cached

STRUCTURE_FIELDS = (
    "atom_index",
    "element",
    "num_substitutable_hydrogens",
    "num_available_valences",
    "num_neighboring_atoms",
    "neighbor_indices",
    "is_in_ring",
    "centrality",
)

PROPERTY_FIELDS = (
    "QED",
    "SA",
    "molecular_weight",
    "LogP",
    "TPSA",
    "num_HBond_donors",
    "num_HBond_acceptors",
    "num_rotatable_bonds",
    "num_aromatic_rings",
)

# provider(mol) -> mapping with any of PROPERTY_FIELDS, overriding the surrogates
PropertyProvider = Callable[[Molecule], dict]


def _mol(mol) -> Molecule:
    return mol if isinstance(mol, Molecule) else parse_cached(mol)


def get_ligand_structure(mol) -> list[dict]:
    """One row per atom; indices follow the atom order of ``mol`` as given."""
    rows = _rows(mol) if isinstance(mol, Molecule) else _cached_rows(mol)
    return [dict(r, neighbor_indices=list(r["neighbor_indices"])) for r in rows]


@lru_cache(maxsize=8192)
def _cached_rows(smiles: str) -> tuple[dict, ...]:
    return _rows(parse_cached(smiles))


def _rows(m: Molecule) -> tuple[dict, ...]:
    cent = betweenness_centrality(m)
    rows = []
    for i, atom in enumerate(m.atoms):
        nbrs = list(m.neighbors(i))
        rows.append(
            {
                "atom_index": i,
                "element": atom.element,
                "num_substitutable_hydrogens": m.hydrogens(i),
                "num_available_valences": max_valence(atom) - m.bond_order_sum(i),
                "num_neighboring_atoms": len(nbrs),
                "neighbor_indices": nbrs,
                "is_in_ring": m.atom_in_ring(i),
                "centrality": round(cent[i], 4),
            }
        )
    return tuple(rows)


def calculate_properties(mol, provider: PropertyProvider | None = None) -> dict:
    m = _mol(mol)
    d = compute_descriptors(m)
    props = {
        "QED": round(surrogate_qed(d), 4),
        "SA": round(surrogate_sa(m, d), 4),
        "molecular_weight": round(d.molecular_weight, 3),
        "LogP": round(d.logp_proxy, 3),
        "TPSA": round(d.tpsa_proxy, 2),
        "num_HBond_donors": d.h_bond_donors,
        "num_HBond_acceptors": d.h_bond_acceptors,
        "num_rotatable_bonds": d.rotatable_bonds,
        "num_aromatic_rings": d.aromatic_ring_count,
    }
    if provider is not None:
        override = provider(m) or {}
        props.update({k: v for k, v in override.items() if k in PROPERTY_FIELDS})
    return props


def format_structure(rows: list[dict]) -> str:
    return "\n".join(json.dumps(r, separators=(", ", ": ")) for r in rows)


def format_properties(props: dict) -> str:
    return json.dumps(props, separators=(", ", ": "))

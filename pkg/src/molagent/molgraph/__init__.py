"""Molecular graph model: atoms, bonds, SMILES I/O, valence and rings."""

from functools import lru_cache

from .canon import canonical_order, canonical_ranks, write_smiles
from .elements import Element, UnsupportedElementError, allowed_valences, get_element
from .molecule import (
    Atom,
    Bond,
    BondType,
    KekulizeError,
    Molecule,
    MoleculeError,
    RingInfo,
    ValenceError,
    ValenceReport,
    check_valence,
    connected_components,
    max_valence,
    perceive_rings,
)
from .smiles import Fragment, SmilesError, parse_fragment, parse_smiles


@lru_cache(maxsize=16384)
def parse_cached(smiles: str) -> Molecule:
    """Memoized :func:`parse_smiles`; safe because molecules are immutable."""
    return parse_smiles(smiles)


def canonicalize(smiles: str) -> str:
    """Canonical SMILES of a SMILES string."""
    return parse_smiles(smiles).smiles


__all__ = [
    "Atom",
    "Bond",
    "BondType",
    "Element",
    "Fragment",
    "KekulizeError",
    "Molecule",
    "MoleculeError",
    "RingInfo",
    "SmilesError",
    "UnsupportedElementError",
    "ValenceError",
    "ValenceReport",
    "allowed_valences",
    "canonical_order",
    "canonical_ranks",
    "canonicalize",
    "check_valence",
    "connected_components",
    "get_element",
    "max_valence",
    "parse_cached",
    "parse_fragment",
    "parse_smiles",
    "perceive_rings",
    "write_smiles",
]

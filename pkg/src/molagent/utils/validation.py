"""Input validation helpers shared by the estimators."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..molgraph import Molecule, MoleculeError, parse_smiles


def _as_1d(X) -> list:
    if isinstance(X, (str, Molecule)):
        raise TypeError("expected a collection of molecules, got a single value; wrap it in a list")
    if hasattr(X, "to_numpy"):
        X = X.to_numpy()
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single column of SMILES, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValueError(f"expected a 1-D collection of SMILES, got {arr.ndim}-D input")
    return arr.tolist()


def check_molecules(X, *, allow_empty: bool = False) -> list[Molecule]:
    """Validate a collection of SMILES strings or molecules.

    Accepts lists, 1-D arrays, pandas Series and single-column 2-D inputs.
    Raises ``ValueError`` naming the first invalid entry.
    """
    items = _as_1d(X)
    if not items and not allow_empty:
        raise ValueError("found an empty collection of molecules")
    out = []
    for pos, item in enumerate(items):
        if isinstance(item, Molecule):
            out.append(item)
        elif isinstance(item, str):
            try:
                out.append(parse_smiles(item))
            except MoleculeError as exc:
                raise ValueError(f"invalid SMILES at position {pos} ({item!r}): {exc}") from exc
        else:
            raise TypeError(f"entry {pos} is {type(item).__name__}, expected SMILES or Molecule")
    return out


def dedupe(mols: Iterable[Molecule]) -> list[Molecule]:
    """Drop repeated molecules (by canonical SMILES), keeping first occurrence."""
    seen: set[str] = set()
    out = []
    for m in mols:
        if m.smiles not in seen:
            seen.add(m.smiles)
            out.append(m)
    return out


def check_seed(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed is None:
        return np.random.SeedSequence()
    if isinstance(seed, (int, np.integer)) and seed >= 0:
        return np.random.SeedSequence(int(seed))
    raise ValueError(f"random_state must be a non-negative int or None, got {seed!r}")

"""Named functional groups; every fragment attaches through atom 0."""

from __future__ import annotations

from types import MappingProxyType
from typing import NamedTuple


class FunctionalGroup(NamedTuple):
    smiles: str
    attachment: int = 0


_GROUPS = {
    "methyl": "C",
    "ethyl": "CC",
    "propyl": "CCC",
    "isopropyl": "C(C)C",
    "butyl": "CCCC",
    "tert-butyl": "C(C)(C)C",
    "cyclopropyl": "C1CC1",
    "cyclohexyl": "C1CCCCC1",
    "vinyl": "C=C",
    "ethynyl": "C#C",
    "phenyl": "c1ccccc1",
    "benzyl": "Cc1ccccc1",
    "pyridin-2-yl": "c1ccccn1",
    "pyridin-3-yl": "c1cccnc1",
    "pyridin-4-yl": "c1ccncc1",
    "thiophen-2-yl": "c1cccs1",
    "furan-2-yl": "c1ccco1",
    "imidazol-1-yl": "[nH]1ccnc1",
    "methoxy": "OC",
    "ethoxy": "OCC",
    "hydroxyl": "O",
    "amino": "N",
    "methylamino": "NC",
    "dimethylamino": "N(C)C",
    "acetyl": "C(C)=O",
    "acetamido": "NC(C)=O",
    "carboxyl": "C(=O)O",
    "methyl-ester": "C(=O)OC",
    "amide": "C(N)=O",
    "sulfonamide": "S(N)(=O)=O",
    "methylsulfonyl": "S(C)(=O)=O",
    "nitro": "[N+](=O)[O-]",
    "cyano": "C#N",
    "trifluoromethyl": "C(F)(F)F",
    "trifluoromethoxy": "OC(F)(F)F",
    "fluoro": "F",
    "chloro": "Cl",
    "bromo": "Br",
    "iodo": "I",
    "thiol": "S",
    "morpholine": "N1CCOCC1",
    "piperidine": "N1CCCCC1",
    "piperazine": "N1CCNCC1",
    "pyrrolidine": "N1CCCC1",
}

FUNCTIONAL_GROUPS = MappingProxyType({name: FunctionalGroup(s) for name, s in _GROUPS.items()})

_ALIASES = {
    "t-butyl": "tert-butyl",
    "tbutyl": "tert-butyl",
    "hydroxy": "hydroxyl",
    "carboxylic-acid": "carboxyl",
    "carboxy": "carboxyl",
    "carboxamide": "amide",
    "nitrile": "cyano",
    "cf3": "trifluoromethyl",
    "fluorine": "fluoro",
    "chlorine": "chloro",
    "bromine": "bromo",
    "iodine": "iodo",
    "morpholino": "morpholine",
    "morpholinyl": "morpholine",
    "piperidinyl": "piperidine",
    "piperazinyl": "piperazine",
    "pyrrolidinyl": "pyrrolidine",
    "2-pyridyl": "pyridin-2-yl",
    "3-pyridyl": "pyridin-3-yl",
    "4-pyridyl": "pyridin-4-yl",
    "pyridyl": "pyridin-2-yl",
    "methylester": "methyl-ester",
}


def normalize_group_name(name: str) -> str:
    key = "-".join(str(name).strip().lower().replace("_", " ").split())
    return _ALIASES.get(key, key)


def lookup_group(name: str) -> FunctionalGroup | None:
    return FUNCTIONAL_GROUPS.get(normalize_group_name(name))

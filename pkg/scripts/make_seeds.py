"""Regenerate src/molagent/data/seeds.smi.

A list of small drug-like molecules is expanded with seeded random
toolbox edits until the file holds 500 distinct canonical SMILES with
molecular weight between 120 and 420.
"""

from pathlib import Path

import numpy as np

from molagent.descriptors import molecular_weight
from molagent.molgraph import parse_smiles
from molagent.toolbox import FUNCTIONAL_GROUPS, add_atom, add_functional_group, replace_atom

BASE = """
CC(=O)Nc1ccc(O)cc1
CC(C)Cc1ccc(cc1)C(C)C(=O)O
CN1CCN(CC1)c1ccccc1
O=C(O)c1ccccc1O
COc1ccc(CCN)cc1
Nc1ccc(cc1)S(N)(=O)=O
CC(=O)Oc1ccccc1C(=O)O
c1ccc2[nH]ccc2c1
c1ccc2ncccc2c1
O=C1CCCN1
CCN(CC)CC(=O)Nc1c(C)cccc1C
CN1C(=O)N(C)c2ncn(C)c2C1=O
Clc1ccc(cc1)C(=O)N
OC(=O)CCc1ccccc1
NC(=O)c1cccnc1
Cc1ccc(cc1)S(=O)(=O)N
COc1ccccc1OC
c1ccc(cc1)N1CCOCC1
O=C(Nc1ccccc1)c1ccccc1
CC(C)NCC(O)c1ccc(O)cc1
Fc1ccc(cc1)C(=O)N1CCCC1
CCOC(=O)c1ccc(N)cc1
OCc1ccc(o1)C=O
Cc1cc(C)nc(N)n1
c1cnc2ccccc2n1
CC1=CC(=O)CC(C)(C)C1
OC1CCCCC1N
N#Cc1ccc(cc1)C(=O)O
CSc1ccc(C=O)cc1
CC(=O)c1ccc(F)cc1
O=C1NC(=O)c2ccccc12
Nc1nc2ccccc2s1
Cc1nc2ccccc2[nH]1
c1ccc(cc1)C1CCNCC1
COC(=O)C1CCN(C)CC1
CC(C)(C)OC(=O)N1CCCC1
O=S(=O)(N1CCCC1)c1ccccc1
Oc1ccc2ccccc2c1
CN(C)CCOC(c1ccccc1)c1ccccc1
Cn1cnc(c1)C(=O)O
c1ccc(nc1)N1CCNCC1
O=C(O)C1CC1c1ccccc1
NC1=NC(=O)C=CN1
CC(O)C(=O)Nc1ccccc1
Brc1cccnc1
Oc1cccc2ncccc12
CC1CCCCN1C(=O)c1ccccc1
NCc1ccc(Cl)cc1
CCCCOc1ccc(cc1)C(N)=O
O=C(C=Cc1ccccc1)O
c1csc(n1)N
Cc1ccc(o1)C(=O)NC
O=C1CCc2ccccc2N1
CC(=O)N1CCN(CC1)C(=O)c1ccco1
COc1cc(C=O)ccc1O
NC(=O)N1c2ccccc2C=Cc2ccccc12
CNC(=O)Oc1ccccc1
FC(F)(F)c1ccc(cc1)O
CC(C)c1ccc(cc1)C(=O)O
O=C(NCc1ccccc1)C1CC1
c1cc(ccc1C#N)N1CCOCC1
Cc1onc(c1)C(=O)O
CCOc1ccc(NC(C)=O)cc1
O=C(O)c1cccc(c1)N
CN1CCC(CC1)O
Cc1cccc(c1)NC(=O)CCl
OC(=O)Cc1c[nH]c2ccccc12
c1cc(oc1)CNCc1ccccc1
NS(=O)(=O)c1cc(Cl)ccc1N
"""


def main(out: Path, target: int = 500, seed: int = 7) -> None:
    rng = np.random.default_rng(seed)
    pool: list[str] = []
    seen: set[str] = set()

    def keep(smiles: str) -> None:
        mol = parse_smiles(smiles)
        if smiles not in seen and 120 <= molecular_weight(mol) <= 420:
            seen.add(smiles)
            pool.append(smiles)

    for line in BASE.split():
        keep(parse_smiles(line).smiles)
    groups = sorted(FUNCTIONAL_GROUPS)
    elements = ("C", "N", "O", "F", "Cl", "S")
    while len(pool) < target:
        base = pool[int(rng.integers(len(pool)))]
        mol = parse_smiles(base)
        sites = [i for i in range(len(mol)) if mol.hydrogens(i) > 0]
        if not sites:
            continue
        idx = sites[int(rng.integers(len(sites)))]
        roll = rng.random()
        if roll < 0.45:
            result = add_functional_group(base, idx, groups[int(rng.integers(len(groups)))], "single")
        elif roll < 0.75:
            result = add_atom(base, idx, elements[int(rng.integers(len(elements)))], "single")
        else:
            result = replace_atom(base, int(rng.integers(len(mol))), elements[int(rng.integers(len(elements)))])
        if result.success:
            keep(result.smiles)
    out.write_text("\n".join(pool[:target]) + "\n")


if __name__ == "__main__":
    main(Path(__file__).resolve().parents[1] / "src" / "molagent" / "data" / "seeds.smi")

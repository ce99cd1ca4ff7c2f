"""Canonical atom ranking and SMILES writing.

Ranks come from iterated neighbourhood refinement (Morgan style) starting
from ``(element, aromatic, degree, charge, H count, ring membership)``.
Remaining ties are broken by individualizing the lowest-index atom of the
first tied class and refining again.  This is not a certified canonical
labelling, but it is deterministic and, for tied classes that are true
symmetry orbits, independent of input atom order.
"""

from __future__ import annotations

from .elements import allowed_valences
from .molecule import BondType, Molecule

_BOND_CODE = {BondType.SINGLE: 1, BondType.DOUBLE: 2, BondType.TRIPLE: 3, BondType.AROMATIC: 4}


def _dense(keys: list) -> list[int]:
    table = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def canonical_ranks(mol: Molecule) -> list[int]:
    n = len(mol)
    if n == 0:
        return []
    atoms = mol.atoms
    nbrs = [
        [(j, _BOND_CODE[mol.bonds[k].type]) for j, k in mol.incident(i)]
        for i in range(n)
    ]
    ranks = _dense(
        [
            (a.element, a.aromatic, len(nbrs[i]), a.charge, mol.hydrogens(i), mol.atom_in_ring(i))
            for i, a in enumerate(atoms)
        ]
    )
    while True:
        ranks = _refine(ranks, nbrs)
        if len(set(ranks)) == n:
            return ranks
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        tied = min(r for r, c in counts.items() if c > 1)
        chosen = ranks.index(tied)
        ranks = _dense([2 * r + (1 if r == tied and i != chosen else 0) for i, r in enumerate(ranks)])


def _refine(ranks: list[int], nbrs: list[list[tuple[int, int]]]) -> list[int]:
    n_classes = len(set(ranks))
    while True:
        keys = [
            (ranks[i], tuple(sorted((ranks[j], code) for j, code in nbrs[i])))
            for i in range(len(ranks))
        ]
        new = _dense(keys)
        n_new = len(set(new))
        if n_new == n_classes:
            return new
        ranks, n_classes = new, n_new


def canonical_order(mol: Molecule) -> list[int]:
    """Atom indices in the order they appear in :func:`write_smiles`."""
    return _write(mol, canonical_ranks(mol))[1]


def write_smiles(mol: Molecule, ranks: list[int] | None = None) -> str:
    """Deterministic SMILES; identical strings for isomorphic molecules.

    Passing explicit ``ranks`` (lower is written first) gives a valid but
    non-canonical string, useful for generating randomized SMILES.
    """
    if ranks is None:
        ranks = canonical_ranks(mol)
    elif len(ranks) != len(mol):
        raise ValueError("ranks must have one entry per atom")
    return _write(mol, list(ranks))[0]


def _default_h(mol: Molecule, i: int) -> int:
    """Hydrogen count a reader infers for atom ``i`` written without brackets."""
    atom = mol.atoms[i]
    base = sum(mol.bonds[k].type.order for _, k in mol.incident(i))
    for v in allowed_valences(atom.element, 0):
        if v >= base:
            avail = v - base
            return max(0, avail - 1) if atom.aromatic else avail
    return 0


def _atom_text(mol: Molecule, i: int) -> str:
    atom = mol.atoms[i]
    symbol = atom.element.lower() if atom.aromatic else atom.element
    h = mol.hydrogens(i)
    if atom.charge == 0 and h == _default_h(mol, i):
        return symbol
    text = "[" + symbol
    if h:
        text += "H" if h == 1 else f"H{h}"
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        text += sign if abs(atom.charge) == 1 else f"{sign}{abs(atom.charge)}"
    return text + "]"


def _bond_text(mol: Molecule, k: int) -> str:
    bond = mol.bonds[k]
    t = bond.type
    if t is BondType.AROMATIC:
        return ""
    if t is BondType.SINGLE:
        both = mol.atoms[bond.begin].aromatic and mol.atoms[bond.end].aromatic
        return "-" if both else ""
    return "=" if t is BondType.DOUBLE else "#"


def _ring_label(d: int) -> str:
    return str(d) if d < 10 else f"%{d:02d}"


def _write(mol: Molecule, ranks: list[int]) -> tuple[str, list[int]]:
    n = len(mol)
    visited = [False] * n
    order: list[int] = []
    position = [0] * n
    children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    # closures[u] -> list of (partner, bond index); opened at the earlier atom
    opens: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    closes: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    seen_closure: set[int] = set()
    sorted_nbrs = [sorted(mol.incident(i), key=lambda jk: ranks[jk[0]]) for i in range(n)]

    roots = []
    for start in sorted(range(n), key=ranks.__getitem__):
        if visited[start]:
            continue
        roots.append(start)
        visited[start] = True
        position[start] = len(order)
        order.append(start)
        stack = [(start, -1, iter(sorted_nbrs[start]))]
        while stack:
            u, parent_bond, it = stack[-1]
            pushed = False
            for v, k in it:
                if k == parent_bond:
                    continue
                if visited[v]:
                    if k not in seen_closure:
                        seen_closure.add(k)
                        opens[v].append((u, k))
                        closes[u].append((v, k))
                    continue
                visited[v] = True
                position[v] = len(order)
                order.append(v)
                children[u].append((v, k))
                stack.append((v, k, iter(sorted_nbrs[v])))
                pushed = True
                break
            if not pushed:
                stack.pop()

    digits: dict[int, int] = {}
    free: list[int] = []
    next_digit = [1]

    def take_digit() -> int:
        if free:
            free.sort()
            return free.pop(0)
        d = next_digit[0]
        next_digit[0] += 1
        return d

    parts: list[str] = []
    for root in roots:
        out: list[str] = []
        stack2: list = [("atom", root, -1)]
        while stack2:
            item = stack2.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            _, u, via = item
            if via >= 0:
                out.append(_bond_text(mol, via))
            out.append(_atom_text(mol, u))
            for v, k in sorted(closes[u], key=lambda vk: position[vk[0]]):
                d = digits.pop(k)
                out.append(_ring_label(d))
                free.append(d)
            for v, k in sorted(opens[u], key=lambda vk: position[vk[0]]):
                d = take_digit()
                digits[k] = d
                out.append(_bond_text(mol, k) + _ring_label(d))
            kids = children[u]
            # push in reverse so the first child is emitted first
            for idx in range(len(kids) - 1, -1, -1):
                v, k = kids[idx]
                if idx < len(kids) - 1:
                    stack2.append(")")
                    stack2.append(("atom", v, k))
                    stack2.append("(")
                else:
                    stack2.append(("atom", v, k))
        parts.append("".join(out))
    return ".".join(parts), order

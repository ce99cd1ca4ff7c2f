"""A small SMARTS subset for locating substructures to replace or remove.

Atoms: organic symbols (uppercase = aliphatic, lowercase = aromatic), ``*``,
and bracket atoms combining a symbol or ``*`` with ``H<n>``, ``D<n>``,
``X<n>`` and a charge.  Bonds: ``- = # : ~`` (unspecified means single or
aromatic).  Branches and ring closures work as in SMILES.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..molgraph import BondType, Molecule, SmilesError
from ..molgraph.elements import AROMATIC_SYMBOLS, ORGANIC_SUBSET


class SmartsError(SmilesError):
    pass


@dataclass(frozen=True)
class QueryAtom:
    element: str | None = None
    aromatic: bool | None = None
    hydrogens: int | None = None
    degree: int | None = None
    connectivity: int | None = None
    charge: int | None = None

    def matches(self, mol: Molecule, i: int) -> bool:
        atom = mol.atoms[i]
        if self.element is not None and atom.element != self.element:
            return False
        if self.aromatic is not None and atom.aromatic != self.aromatic:
            return False
        if self.hydrogens is not None and mol.hydrogens(i) != self.hydrogens:
            return False
        if self.degree is not None and mol.degree(i) != self.degree:
            return False
        if self.connectivity is not None and mol.degree(i) + mol.hydrogens(i) != self.connectivity:
            return False
        if self.charge is not None and atom.charge != self.charge:
            return False
        return True


# None = "single or aromatic" (SMARTS default), "any" = ~
_BOND_QUERIES = {"-": BondType.SINGLE, "=": BondType.DOUBLE, "#": BondType.TRIPLE, ":": BondType.AROMATIC, "~": "any"}


def _bond_matches(query, actual: BondType) -> bool:
    if query is None:
        return actual in (BondType.SINGLE, BondType.AROMATIC)
    if query == "any":
        return True
    return actual is query


@dataclass
class SmartsPattern:
    text: str
    atoms: list[QueryAtom] = field(default_factory=list)
    bonds: list[tuple[int, int, object]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.atoms)

    def match(self, mol: Molecule) -> list[tuple[int, ...]]:
        """All embeddings, as tuples of molecule atom indices per query atom."""
        return list(_iter_matches(self, mol))

    def match_sets(self, mol: Molecule) -> list[tuple[int, ...]]:
        """Distinct matched atom sets, each sorted, in ascending order."""
        return sorted({tuple(sorted(m)) for m in _iter_matches(self, mol)})


def parse_smarts(text: str) -> SmartsPattern:
    if not isinstance(text, str) or not text.strip():
        raise SmartsError("empty SMARTS", 0, text)
    text = text.strip()
    pat = SmartsPattern(text)
    pos = 0
    prev: int | None = None
    pending = None
    has_pending = False
    branches: list[int] = []
    rings: dict[int, tuple[int, object, bool]] = {}

    def add_bond(a: int, b: int, query) -> None:
        if a == b or any({a, b} == {x, y} for x, y, _ in pat.bonds):
            raise SmartsError("duplicate bond in pattern", pos, text)
        pat.bonds.append((a, b, query))

    while pos < len(text):
        c = text[pos]
        if c == "(":
            if prev is None or has_pending:
                raise SmartsError("misplaced '('", pos, text)
            branches.append(prev)
            pos += 1
        elif c == ")":
            if not branches or has_pending:
                raise SmartsError("misplaced ')'", pos, text)
            prev = branches.pop()
            pos += 1
        elif c in _BOND_QUERIES:
            if prev is None or has_pending:
                raise SmartsError("misplaced bond symbol", pos, text)
            pending, has_pending = _BOND_QUERIES[c], True
            pos += 1
        elif c.isdigit() or c == "%":
            if prev is None:
                raise SmartsError("ring closure without a preceding atom", pos, text)
            if c == "%":
                digits = text[pos + 1 : pos + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise SmartsError("'%' must be followed by two digits", pos, text)
                num, pos = int(digits), pos + 3
            else:
                num, pos = int(c), pos + 1
            if num in rings:
                other, q, had = rings.pop(num)
                add_bond(prev, other, pending if has_pending else q)
            else:
                rings[num] = (prev, pending, has_pending)
            pending, has_pending = None, False
        else:
            atom, pos = _parse_atom(text, pos)
            pat.atoms.append(atom)
            idx = len(pat.atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            pending, has_pending = None, False
            prev = idx
    if has_pending:
        raise SmartsError("dangling bond symbol", pos, text)
    if branches:
        raise SmartsError("unclosed branch", pos, text)
    if rings:
        raise SmartsError(f"unmatched ring closure {min(rings)}", pos, text)
    return pat


def _parse_atom(text: str, pos: int) -> tuple[QueryAtom, int]:
    c = text[pos]
    if c == "*":
        return QueryAtom(), pos + 1
    if c == "[":
        return _parse_bracket(text, pos)
    two = text[pos : pos + 2]
    if two in ("Cl", "Br"):
        return QueryAtom(two, aromatic=False), pos + 2
    if c in ORGANIC_SUBSET:
        return QueryAtom(c, aromatic=False), pos + 1
    if c.islower() and c.upper() in AROMATIC_SYMBOLS:
        return QueryAtom(c.upper(), aromatic=True), pos + 1
    raise SmartsError(f"unsupported SMARTS primitive {c!r}", pos, text)


def _read_int(text: str, pos: int, end: int, default: int) -> tuple[int, int]:
    start = pos
    while pos < end and text[pos].isdigit():
        pos += 1
    return (int(text[start:pos]) if pos > start else default), pos


def _parse_bracket(text: str, pos: int) -> tuple[QueryAtom, int]:
    end = text.find("]", pos)
    if end < 0:
        raise SmartsError("unclosed bracket", pos, text)
    p = pos + 1
    fields: dict = {}
    if p < end and text[p] == "*":
        p += 1
    elif p < end and text[p : p + 2] in ("Cl", "Br"):
        fields.update(element=text[p : p + 2], aromatic=False)
        p += 2
    elif p < end and text[p] in ORGANIC_SUBSET:
        fields.update(element=text[p], aromatic=False)
        p += 1
    elif p < end and text[p].islower() and text[p].upper() in AROMATIC_SYMBOLS:
        fields.update(element=text[p].upper(), aromatic=True)
        p += 1
    else:
        raise SmartsError("bracket atom must start with an element symbol or '*'", p, text)
    while p < end:
        c = text[p]
        if c == "H":
            fields["hydrogens"], p = _read_int(text, p + 1, end, 1)
        elif c == "D":
            fields["degree"], p = _read_int(text, p + 1, end, 1)
        elif c == "X":
            fields["connectivity"], p = _read_int(text, p + 1, end, 1)
        elif c in "+-":
            sign = 1 if c == "+" else -1
            mag, p2 = _read_int(text, p + 1, end, 0)
            if p2 == p + 1:
                mag = 1
                while p2 < end and text[p2] == c:
                    mag += 1
                    p2 += 1
            fields["charge"], p = sign * mag, p2
        else:
            raise SmartsError(f"unsupported SMARTS primitive {c!r}", p, text)
    return QueryAtom(**fields), end + 1


def _iter_matches(pat: SmartsPattern, mol: Molecule):
    n_q = len(pat.atoms)
    if n_q == 0 or n_q > len(mol):
        return
    # query atoms are numbered so each (after the first of a component) has an
    # earlier bonded partner; bonds are checked as soon as both ends are mapped
    back: list[list[tuple[int, object]]] = [[] for _ in range(n_q)]
    for a, b, q in pat.bonds:
        lo, hi = min(a, b), max(a, b)
        back[hi].append((lo, q))
    mapping = [-1] * n_q
    used: set[int] = set()

    def candidates(k: int):
        if back[k]:
            anchor = mapping[back[k][0][0]]
            return [j for j in mol.neighbors(anchor)]
        return range(len(mol))

    def extend(k: int):
        if k == n_q:
            yield tuple(mapping)
            return
        qa = pat.atoms[k]
        for j in candidates(k):
            if j in used or not qa.matches(mol, j):
                continue
            ok = True
            for prev_q, bq in back[k]:
                bk = mol.bond_index(mapping[prev_q], j)
                if bk is None or not _bond_matches(bq, mol.bonds[bk].type):
                    ok = False
                    break
            if not ok:
                continue
            mapping[k] = j
            used.add(j)
            yield from extend(k + 1)
            used.discard(j)
            mapping[k] = -1

    yield from extend(0)

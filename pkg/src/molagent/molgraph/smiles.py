"""SMILES reader for the organic subset.

Supported: organic-subset and lowercase aromatic atoms, bracket atoms with
explicit H and charge, branches, ring closures (digits and ``%nn``), the
bond symbols ``- = # :`` and ``.`` for disconnected parts.  Stereo marks
and isotopes are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .elements import AROMATIC_SYMBOLS, ORGANIC_SUBSET, UnsupportedElementError
from .molecule import Atom, Bond, BondType, Molecule, MoleculeError


class SmilesError(MoleculeError):
    """Syntax error in a SMILES (or SMARTS) string."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(message)

    def __str__(self) -> str:
        if self.position is None:
            return self.message
        return f"{self.message} at position {self.position}"


_PERIODIC = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu
    Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba
    La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi
    Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr""".split()
)
_BOND_SYMBOLS = {"-": BondType.SINGLE, "=": BondType.DOUBLE, "#": BondType.TRIPLE, ":": BondType.AROMATIC}


@dataclass
class Fragment:
    """Parsed but unsanitized graph; ``None`` atoms are ``*`` attachment markers."""

    atoms: list[Atom | None] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    dummy_labels: dict[int, int | None] = field(default_factory=dict)

    @property
    def dummies(self) -> list[int]:
        return sorted(self.dummy_labels)

    def to_molecule(self, *, sanitize: bool = True) -> Molecule:
        if self.dummy_labels:
            raise MoleculeError("fragment still contains attachment markers")
        return Molecule(self.atoms, self.bonds, sanitize=sanitize)


def parse_smiles(text: str) -> Molecule:
    """Parse a SMILES string into a sanitized :class:`Molecule`."""
    return parse_fragment(text, allow_dummy=False).to_molecule()


def parse_fragment(text: str, *, allow_dummy: bool = True) -> Fragment:
    if not isinstance(text, str):
        raise TypeError(f"SMILES must be a string, got {type(text).__name__}")
    text = text.strip()
    if not text:
        raise SmilesError("empty SMILES", 0, text)
    return _Parser(text, allow_dummy).run()


class _Parser:
    def __init__(self, text: str, allow_dummy: bool):
        self.text = text
        self.allow_dummy = allow_dummy
        self.frag = Fragment()
        self.pos = 0

    def error(self, message: str, position: int | None = None) -> SmilesError:
        return SmilesError(message, self.pos if position is None else position, self.text)

    def run(self) -> Fragment:
        text = self.text
        prev: int | None = None
        pending: tuple[BondType, int] | None = None
        branches: list[tuple[int, int]] = []
        rings: dict[int, tuple[int, BondType | None, int]] = {}
        bonded: set[tuple[int, int]] = set()

        def add_bond(a: int, b: int, btype: BondType | None, where: int) -> None:
            key = (min(a, b), max(a, b))
            if a == b:
                raise self.error("ring closure onto the same atom", where)
            if key in bonded:
                raise self.error(f"duplicate bond between atoms {a} and {b}", where)
            bonded.add(key)
            if btype is None:
                btype = BondType.AROMATIC if self._aromatic(a) and self._aromatic(b) else BondType.SINGLE
            self.frag.bonds.append(Bond(a, b, btype))

        while self.pos < len(text):
            c = text[self.pos]
            start = self.pos
            if c == "(":
                if prev is None:
                    raise self.error("branch without a preceding atom")
                if pending is not None:
                    raise self.error("bond symbol before branch")
                branches.append((prev, start))
                self.pos += 1
            elif c == ")":
                if not branches:
                    raise self.error("unmatched ')'")
                if pending is not None:
                    raise self.error("dangling bond symbol before ')'")
                prev = branches.pop()[0]
                self.pos += 1
            elif c in _BOND_SYMBOLS:
                if pending is not None:
                    raise self.error("two consecutive bond symbols")
                if prev is None:
                    raise self.error("bond symbol without a preceding atom")
                pending = (_BOND_SYMBOLS[c], start)
                self.pos += 1
            elif c in "/\\":
                raise self.error("stereo bond marks are not supported")
            elif c == ".":
                if pending is not None:
                    raise self.error("bond symbol before '.'")
                if prev is None:
                    raise self.error("'.' without a preceding atom")
                prev = None
                self.pos += 1
            elif c.isdigit() or c == "%":
                if prev is None:
                    raise self.error("ring closure without a preceding atom")
                num = self._ring_number()
                btype = pending[0] if pending else None
                pending = None
                if num in rings:
                    other, other_type, _ = rings.pop(num)
                    if btype is not None and other_type is not None and btype != other_type:
                        raise self.error(f"conflicting bond types for ring closure {num}", start)
                    add_bond(prev, other, btype or other_type, start)
                else:
                    rings[num] = (prev, btype, start)
            else:
                idx = self._atom()
                if prev is not None:
                    add_bond(prev, idx, pending[0] if pending else None, start)
                elif pending is not None:
                    raise self.error("bond symbol without a preceding atom", pending[1])
                pending = None
                prev = idx

        if pending is not None:
            raise self.error("dangling bond symbol", pending[1])
        if branches:
            raise self.error("unclosed branch '('", branches[-1][1])
        if rings:
            num, (_, _, where) = min(rings.items(), key=lambda kv: kv[1][2])
            raise self.error(f"unmatched ring closure {num}", where)
        return self.frag

    def _aromatic(self, i: int) -> bool:
        atom = self.frag.atoms[i]
        return atom is not None and atom.aromatic

    def _ring_number(self) -> int:
        text = self.text
        if text[self.pos] == "%":
            digits = text[self.pos + 1 : self.pos + 3]
            if len(digits) != 2 or not digits.isdigit():
                raise self.error("'%' must be followed by two digits")
            self.pos += 3
            return int(digits)
        self.pos += 1
        return int(text[self.pos - 1])

    def _new_atom(self, atom: Atom | None, label: int | None = None) -> int:
        self.frag.atoms.append(atom)
        idx = len(self.frag.atoms) - 1
        if atom is None:
            self.frag.dummy_labels[idx] = label
        return idx

    def _atom(self) -> int:
        text = self.text
        c = text[self.pos]
        if c == "[":
            return self._bracket_atom()
        if c == "*":
            if not self.allow_dummy:
                raise self.error("wildcard atom '*' is not a supported element")
            self.pos += 1
            return self._new_atom(None)
        two = text[self.pos : self.pos + 2]
        if two in ("Cl", "Br"):
            self.pos += 2
            return self._new_atom(Atom(two))
        if c in ORGANIC_SUBSET:
            self.pos += 1
            return self._new_atom(Atom(c))
        if c.upper() in AROMATIC_SYMBOLS and c.islower():
            self.pos += 1
            return self._new_atom(Atom(c.upper(), aromatic=True))
        if c == "@":
            raise self.error("chirality marks are not supported")
        if c.isalpha():
            raise self.error(f"unsupported element or atom outside brackets: {c!r}")
        raise self.error(f"unexpected character {c!r}")

    def _bracket_atom(self) -> int:
        text = self.text
        open_pos = self.pos
        close = text.find("]", open_pos)
        if close < 0:
            raise self.error("unclosed bracket atom")
        self.pos += 1
        iso_start = self.pos
        while self.pos < close and text[self.pos].isdigit():
            self.pos += 1
        isotope = text[iso_start : self.pos]

        if self.pos < close and text[self.pos] == "*":
            if not self.allow_dummy:
                raise self.error("wildcard atom '*' is not a supported element")
            self.pos += 1
            label = int(isotope) if isotope else None
            lab_start = self.pos
            while self.pos < close and text[self.pos].isdigit():
                self.pos += 1
            if text[lab_start : self.pos]:
                label = int(text[lab_start : self.pos])
            if self.pos < close and text[self.pos] == ":":
                self.pos += 1
                lab_start = self.pos
                while self.pos < close and text[self.pos].isdigit():
                    self.pos += 1
                if not text[lab_start : self.pos]:
                    raise self.error("atom class requires digits")
                label = int(text[lab_start : self.pos])
            if self.pos != close:
                raise self.error("unexpected content in attachment marker")
            self.pos = close + 1
            return self._new_atom(None, label)

        if isotope:
            raise self.error("isotopes are not supported", iso_start)

        symbol, aromatic = self._bracket_symbol(close)
        if self.pos < close and text[self.pos] == "@":
            raise self.error("chirality marks are not supported")
        hcount = 0
        if self.pos < close and text[self.pos] == "H":
            self.pos += 1
            h_start = self.pos
            while self.pos < close and text[self.pos].isdigit():
                self.pos += 1
            hcount = int(text[h_start : self.pos]) if self.pos > h_start else 1
        charge = 0
        if self.pos < close and text[self.pos] in "+-":
            sign = 1 if text[self.pos] == "+" else -1
            self.pos += 1
            c_start = self.pos
            while self.pos < close and text[self.pos].isdigit():
                self.pos += 1
            if self.pos > c_start:
                charge = sign * int(text[c_start : self.pos])
            else:
                charge = sign
                while self.pos < close and text[self.pos] == text[c_start - 1]:
                    charge += sign
                    self.pos += 1
        if self.pos < close and text[self.pos] == ":":
            self.pos += 1
            while self.pos < close and text[self.pos].isdigit():
                self.pos += 1
        if self.pos != close:
            raise self.error(f"unexpected character {text[self.pos]!r} in bracket atom")
        self.pos = close + 1
        try:
            atom = Atom(symbol, charge=charge, aromatic=aromatic, explicit_h=hcount)
        except UnsupportedElementError:
            raise self.error(f"unsupported element {symbol!r}", open_pos + 1) from None
        return self._new_atom(atom)

    def _bracket_symbol(self, close: int) -> tuple[str, bool]:
        text = self.text
        start = self.pos
        c = text[self.pos] if self.pos < close else ""
        if not c.isalpha():
            raise self.error("bracket atom requires an element symbol")
        if c.islower():
            two = text[self.pos : self.pos + 2]
            if two in ("se", "as", "te"):
                raise self.error(f"unsupported aromatic element {two!r}", start)
            if c.upper() not in AROMATIC_SYMBOLS:
                raise self.error(f"unsupported aromatic element {c!r}", start)
            self.pos += 1
            return c.upper(), True
        two = text[self.pos : self.pos + 2]
        if len(two) == 2 and two[1].islower() and two in _PERIODIC:
            self.pos += 2
            symbol = two
        else:
            self.pos += 1
            symbol = c
        if symbol not in ORGANIC_SUBSET:
            raise self.error(f"unsupported element {symbol!r}", start)
        return symbol, False

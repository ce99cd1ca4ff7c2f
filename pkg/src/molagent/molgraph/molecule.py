"""Immutable attributed molecular graph.

Aromatic systems are stored as written (lowercase atoms, aromatic bonds)
and validated by kekulization: a perfect matching of double bonds over
the aromatic atoms that still have a free valence.  No Hueckel counting
is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .elements import allowed_valences, get_element


class MoleculeError(ValueError):
    """Base class for structural errors in a molecule."""


class KekulizeError(MoleculeError):
    pass


class ValenceError(MoleculeError):
    pass


class BondType(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    AROMATIC = "aromatic"

    @property
    def order(self) -> int:
        """Integer bond order; aromatic bonds count 1 before kekulization."""
        return _ORDERS[self]

    @classmethod
    def from_order(cls, order: int) -> "BondType":
        return {1: cls.SINGLE, 2: cls.DOUBLE, 3: cls.TRIPLE}[order]


_ORDERS = {BondType.SINGLE: 1, BondType.DOUBLE: 2, BondType.TRIPLE: 3, BondType.AROMATIC: 1}


@dataclass(frozen=True)
class Atom:
    element: str
    charge: int = 0
    aromatic: bool = False
    explicit_h: int | None = None

    def __post_init__(self):
        get_element(self.element)
        if self.explicit_h is not None and self.explicit_h < 0:
            raise MoleculeError("explicit hydrogen count must be non-negative")


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    type: BondType = BondType.SINGLE

    def __post_init__(self):
        if self.begin == self.end:
            raise MoleculeError(f"bond endpoints must differ (atom {self.begin})")
        if self.begin > self.end:
            b, e = self.end, self.begin
            object.__setattr__(self, "begin", b)
            object.__setattr__(self, "end", e)
        object.__setattr__(self, "type", BondType(self.type))

    def other(self, i: int) -> int:
        return self.end if i == self.begin else self.begin


class Violation(NamedTuple):
    atom: int
    element: str
    charge: int
    total: int
    allowed: tuple[int, ...]


class ValenceReport(NamedTuple):
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(
            f"atom {v.atom} ({v.element}{v.charge:+d}) has valence {v.total}, allowed {v.allowed}"
            if v.charge
            else f"atom {v.atom} ({v.element}) has valence {v.total}, allowed {v.allowed}"
            for v in self.violations
        )


class Molecule:
    """Immutable molecular graph with derived ring, kekule and H data.

    Parameters
    ----------
    atoms : sequence of Atom
        Atom ``i`` of the molecule is ``atoms[i]``.
    bonds : iterable of Bond
        At most one bond per atom pair.
    sanitize : bool, default True
        When true, kekulization failures and valence violations raise.
        Unsanitized molecules exist so that invalid graphs can be
        constructed and reported on by :func:`check_valence`.
    """

    __slots__ = (
        "_atoms",
        "_bonds",
        "_adj",
        "_bond_lookup",
        "_bond_in_ring",
        "_atom_in_ring",
        "_kekule",
        "_kekulized",
        "_hydrogens",
        "__dict__",
    )

    def __init__(self, atoms: Sequence[Atom], bonds: Iterable[Bond] = (), *, sanitize: bool = True):
        self._atoms = tuple(atoms)
        n = len(self._atoms)
        bonds = list(bonds)
        lookup: dict[tuple[int, int], int] = {}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for k, b in enumerate(bonds):
            if not (0 <= b.begin < n and 0 <= b.end < n):
                raise MoleculeError(f"bond {b.begin}-{b.end} references a missing atom")
            key = (b.begin, b.end)
            if key in lookup:
                raise MoleculeError(f"duplicate bond between atoms {b.begin} and {b.end}")
            lookup[key] = k
            adj[b.begin].append((b.end, k))
            adj[b.end].append((b.begin, k))

        bond_in_ring = _ring_bonds(n, adj, len(bonds))
        # aromatic bonds outside rings are single bonds between aromatic atoms
        for k, b in enumerate(bonds):
            if b.type is BondType.AROMATIC and not bond_in_ring[k]:
                bonds[k] = Bond(b.begin, b.end, BondType.SINGLE)

        self._bonds = tuple(bonds)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._bond_lookup = lookup
        self._bond_in_ring = tuple(bond_in_ring)
        self._atom_in_ring = tuple(any(bond_in_ring[k] for _, k in self._adj[i]) for i in range(n))

        try:
            self._kekule = _kekulize(self._atoms, self._bonds, self._adj)
            self._kekulized = True
        except KekulizeError:
            if sanitize:
                raise
            self._kekule = tuple(b.type.order for b in self._bonds)
            self._kekulized = False

        self._hydrogens = tuple(self._compute_h(i) for i in range(n))
        if sanitize:
            report = check_valence(self)
            if not report.ok:
                raise ValenceError(str(report))

    def _compute_h(self, i: int) -> int:
        atom = self._atoms[i]
        if atom.explicit_h is not None:
            return atom.explicit_h
        s = self.bond_order_sum(i)
        for v in allowed_valences(atom.element, atom.charge):
            if v >= s:
                return v - s
        return 0

    # -- basic accessors --------------------------------------------------

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self._atoms

    @property
    def bonds(self) -> tuple[Bond, ...]:
        return self._bonds

    def __len__(self) -> int:
        return len(self._atoms)

    @property
    def n_atoms(self) -> int:
        return len(self._atoms)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, _ in self._adj[i])

    def incident(self, i: int) -> tuple[tuple[int, int], ...]:
        """``(neighbor, bond_index)`` pairs of atom ``i``, sorted by neighbor."""
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def bond_index(self, i: int, j: int) -> int | None:
        return self._bond_lookup.get((i, j) if i < j else (j, i))

    def kekule_order(self, k: int) -> int:
        return self._kekule[k]

    def bond_order_sum(self, i: int) -> int:
        return sum(self._kekule[k] for _, k in self._adj[i])

    def hydrogens(self, i: int) -> int:
        """Total hydrogen count (explicit or implicit) of atom ``i``."""
        return self._hydrogens[i]

    def atom_in_ring(self, i: int) -> bool:
        return self._atom_in_ring[i]

    def bond_in_ring(self, k: int) -> bool:
        return self._bond_in_ring[k]

    @property
    def kekulized(self) -> bool:
        return self._kekulized

    # -- derived ----------------------------------------------------------

    @cached_property
    def component_labels(self) -> tuple[int, ...]:
        labels = [-1] * len(self._atoms)
        current = 0
        for start in range(len(self._atoms)):
            if labels[start] >= 0:
                continue
            labels[start] = current
            stack = [start]
            while stack:
                u = stack.pop()
                for v, _ in self._adj[u]:
                    if labels[v] < 0:
                        labels[v] = current
                        stack.append(v)
            current += 1
        return tuple(labels)

    @property
    def n_components(self) -> int:
        labels = self.component_labels
        return max(labels) + 1 if labels else 0

    @cached_property
    def smiles(self) -> str:
        """Canonical SMILES, identical for isomorphic molecules."""
        from .canon import write_smiles

        return write_smiles(self)

    def __eq__(self, other):
        if not isinstance(other, Molecule):
            return NotImplemented
        return self.smiles == other.smiles

    def __hash__(self):
        return hash(self.smiles)

    def __repr__(self) -> str:
        try:
            return f"Molecule({self.smiles!r})"
        except Exception:  # pragma: no cover - repr of broken graphs
            return f"Molecule(<{len(self._atoms)} atoms>)"


class RingInfo(NamedTuple):
    atom_in_ring: tuple[bool, ...]
    bond_in_ring: tuple[bool, ...]


def perceive_rings(mol: Molecule) -> RingInfo:
    """Ring membership: a bond is in a ring iff it is not a bridge."""
    return RingInfo(mol._atom_in_ring, mol._bond_in_ring)


def connected_components(mol: Molecule) -> tuple[int, tuple[int, ...]]:
    return mol.n_components, mol.component_labels


def check_valence(mol: Molecule) -> ValenceReport:
    violations = []
    for i, atom in enumerate(mol.atoms):
        allowed = allowed_valences(atom.element, atom.charge)
        total = mol.bond_order_sum(i) + (atom.explicit_h or 0)
        if not allowed or total > max(allowed):
            violations.append(Violation(i, atom.element, atom.charge, total, allowed))
    return ValenceReport(tuple(violations))


def max_valence(atom: Atom) -> int:
    allowed = allowed_valences(atom.element, atom.charge)
    return max(allowed) if allowed else 0


def _ring_bonds(n: int, adj: list[list[tuple[int, int]]], n_bonds: int) -> list[bool]:
    """Mark every non-bridge bond (iterative Tarjan lowlink)."""
    disc = [-1] * n
    low = [0] * n
    in_ring = [True] * n_bonds
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent_edge, it = stack[-1]
            advanced = False
            for v, k in it:
                if k == parent_edge:
                    continue
                if disc[v] < 0:
                    disc[v] = low[v] = t
                    t += 1
                    stack.append((v, k, iter(adj[v])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    in_ring[parent_edge] = False
    return in_ring


def _kekulize(atoms, bonds, adj) -> tuple[int, ...]:
    orders = [b.type.order for b in bonds]
    aromatic_bonds = [k for k, b in enumerate(bonds) if b.type is BondType.AROMATIC]
    if not aromatic_bonds and not any(a.aromatic for a in atoms):
        return tuple(orders)

    for k in aromatic_bonds:
        b = bonds[k]
        if not (atoms[b.begin].aromatic and atoms[b.end].aromatic):
            raise KekulizeError(f"aromatic bond {b.begin}-{b.end} joins a non-aromatic atom")

    need = set()
    for i, atom in enumerate(atoms):
        if not atom.aromatic:
            continue
        if not any(bonds[k].type is BondType.AROMATIC for _, k in adj[i]):
            raise KekulizeError(f"atom {i} is marked aromatic but is not in an aromatic ring")
        base = sum(orders[k] for _, k in adj[i]) + (atom.explicit_h or 0)
        target = next((v for v in allowed_valences(atom.element, atom.charge) if v >= base), None)
        if target is not None and target - base >= 1:
            need.add(i)

    partners = {
        i: [j for j, k in adj[i] if j in need and bonds[k].type is BondType.AROMATIC] for i in need
    }
    mate: dict[int, int] = {}
    remaining = set(need)

    def solve() -> bool:
        if not remaining:
            return True
        best = min(remaining, key=lambda a: (sum(1 for p in partners[a] if p in remaining), a))
        for p in partners[best]:
            if p not in remaining:
                continue
            remaining.discard(best)
            remaining.discard(p)
            mate[best], mate[p] = p, best
            if solve():
                return True
            remaining.add(best)
            remaining.add(p)
            del mate[best], mate[p]
        return False

    if not solve():
        raise KekulizeError("cannot kekulize aromatic system")
    for k in aromatic_bonds:
        b = bonds[k]
        if mate.get(b.begin) == b.end:
            orders[k] = 2
    return tuple(orders)

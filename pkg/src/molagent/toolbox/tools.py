"""The seven graph-editing tools.

Every tool takes molecules as SMILES (or :class:`Molecule`) and returns a
:class:`ToolResult`.  Inputs are never modified; a successful result holds
a freshly parsed molecule whose atom indices follow its canonical SMILES,
so indices reported for the result refer to ``result.smiles``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..descriptors import molecular_weight
from ..molgraph import (
    Atom,
    Bond,
    BondType,
    Molecule,
    MoleculeError,
    UnsupportedElementError,
    get_element,
    max_valence,
    parse_cached,
    parse_fragment,
    parse_smiles,
)
from .groups import FUNCTIONAL_GROUPS, lookup_group
from .smarts import parse_smarts

MW_CAP = 700.0

TOOL_NAMES = (
    "add_atom",
    "replace_atom",
    "add_functional_group",
    "add_substructure",
    "replace_substructure",
    "remove_substructure",
    "crossover_molecules",
)


class ToolFailure(Exception):
    """Raised inside a tool to produce a failed :class:`ToolResult`."""


@dataclass(frozen=True)
class ToolResult:
    tool: str
    parameters: dict
    success: bool
    smiles: str | None = None
    molecule: Molecule | None = field(default=None, compare=False, repr=False)
    message: str = ""
    warning: str | None = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def status(self) -> str:
        return "success" if self.success else "failure"

    def to_dict(self) -> dict:
        out = {"tool": self.tool, "parameters": dict(self.parameters), "status": self.status}
        if self.success:
            out["smiles"] = self.smiles
        else:
            out["message"] = self.message
        if self.warning:
            out["warning"] = self.warning
        return out

    def to_text(self) -> str:
        if self.success:
            text = f"{self.tool} succeeded. New SMILES: {self.smiles}"
            if self.warning:
                text += f"\nWarning: {self.warning}"
            return text
        return f"{self.tool} failed: {self.message}"


def _fail(tool: str, params: dict, message: str) -> ToolResult:
    return ToolResult(tool, params, False, message=message)


def _load(mol, name: str = "mol") -> Molecule:
    if isinstance(mol, Molecule):
        m = mol
    elif isinstance(mol, str):
        try:
            m = parse_cached(mol)
        except MoleculeError as exc:
            raise ToolFailure(f"could not parse {name}: {exc}") from None
    else:
        raise ToolFailure(f"{name} must be a SMILES string")
    if len(m) == 0:
        raise ToolFailure(f"{name} is empty")
    if m.n_components != 1:
        raise ToolFailure(f"{name} must be a single connected molecule")
    return m


def _index(mol: Molecule, idx, name: str = "idx") -> int:
    if isinstance(idx, bool):
        raise ToolFailure(f"{name} must be an integer")
    if isinstance(idx, str):
        idx = idx.strip()
        if not idx.lstrip("-").isdigit():
            raise ToolFailure(f"{name} must be an integer, got {idx!r}")
        idx = int(idx)
    if isinstance(idx, float) and idx.is_integer():
        idx = int(idx)
    if not isinstance(idx, (int, np.integer)):
        raise ToolFailure(f"{name} must be an integer")
    idx = int(idx)
    if not 0 <= idx < len(mol):
        raise ToolFailure(f"index {idx} out of range for a molecule with {len(mol)} atoms")
    return idx


_BOND_NAMES = {
    "single": BondType.SINGLE,
    "double": BondType.DOUBLE,
    "triple": BondType.TRIPLE,
    "-": BondType.SINGLE,
    "=": BondType.DOUBLE,
    "#": BondType.TRIPLE,
    "1": BondType.SINGLE,
    "2": BondType.DOUBLE,
    "3": BondType.TRIPLE,
}


def _bond(bond) -> BondType:
    if isinstance(bond, BondType) and bond is not BondType.AROMATIC:
        return bond
    key = str(bond).strip().lower()
    if key not in _BOND_NAMES:
        raise ToolFailure(f"bond must be one of single, double, triple; got {bond!r}")
    return _BOND_NAMES[key]


def _element(symbol) -> str:
    if not isinstance(symbol, str) or not symbol.strip():
        raise ToolFailure("element must be an element symbol")
    s = symbol.strip()
    s = s[0].upper() + s[1:].lower()
    try:
        get_element(s)
    except UnsupportedElementError:
        raise ToolFailure(f"unsupported element {symbol!r}") from None
    return s


def _available(mol: Molecule, i: int) -> int:
    return max_valence(mol.atoms[i]) - mol.bond_order_sum(i)


def _use_h(atom: Atom, order: int) -> Atom:
    """Attaching a new bond replaces hydrogens written explicitly on the atom."""
    if atom.explicit_h is None:
        return atom
    return replace(atom, explicit_h=max(0, atom.explicit_h - order))


def _give_h(atom: Atom, order: int, current_h: int) -> Atom:
    if atom.explicit_h is None:
        if atom.aromatic and atom.element != "C":
            # aromatic heteroatoms carry no implicit H; a freed pyrrole-type N needs [nH]
            return replace(atom, explicit_h=current_h + order)
        return atom
    return replace(atom, explicit_h=atom.explicit_h + order)


def _finish(tool: str, params: dict, atoms, bonds, mw_cap: float, details=None) -> ToolResult:
    try:
        draft = Molecule(atoms, bonds)
    except MoleculeError as exc:
        raise ToolFailure(f"edit produces an invalid molecule: {exc}") from None
    if len(draft) == 0:
        raise ToolFailure("edit would leave an empty molecule")
    if draft.n_components != 1:
        raise ToolFailure("edit would produce a fragmented molecule")
    smiles = draft.smiles
    mol = parse_smiles(smiles)
    warning = None
    mw = molecular_weight(mol)
    if mw_cap is not None and mw > mw_cap:
        warning = f"molecular weight {mw:.1f} exceeds {mw_cap:g}"
    return ToolResult(tool, params, True, smiles=smiles, molecule=mol, warning=warning, details=details or {})


def _run(tool: str, params: dict, body) -> ToolResult:
    try:
        return body()
    except ToolFailure as exc:
        return _fail(tool, params, str(exc))
    except MoleculeError as exc:
        # e.g. a cut leaves an aromatic ring that no longer kekulizes
        return _fail(tool, params, f"edit gives an invalid molecule: {exc}")


def _graft(
    base: Molecule, site: int, frag_atoms, frag_bonds, frag_site: int, btype: BondType
) -> tuple[list[Atom], list[Bond]]:
    order = btype.order
    atoms = list(base.atoms)
    atoms[site] = _use_h(atoms[site], order)
    offset = len(atoms)
    frag_atoms = list(frag_atoms)
    frag_atoms[frag_site] = _use_h(frag_atoms[frag_site], order)
    atoms.extend(frag_atoms)
    bonds = list(base.bonds)
    bonds.extend(Bond(b.begin + offset, b.end + offset, b.type) for b in frag_bonds)
    bonds.append(Bond(site, frag_site + offset, btype))
    return atoms, bonds


def _check_room(mol: Molecule, i: int, order: int, what: str) -> None:
    room = _available(mol, i)
    if room < order:
        atom = mol.atoms[i]
        raise ToolFailure(
            f"{what} {i} ({atom.element}) has {max(room, 0)} available valence(s); a {BondType.from_order(order).value} bond needs {order}"
        )


# -- single-atom edits ---------------------------------------------------


def add_atom(mol, idx, element, bond="single", *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {"mol": _smiles_param(mol), "idx": idx, "element": element, "bond": _bond_param(bond)}

    def body():
        m = _load(mol)
        i = _index(m, idx)
        sym = _element(element)
        btype = _bond(bond)
        order = btype.order
        if max_valence(Atom(sym)) < order:
            raise ToolFailure(f"{sym} cannot form a {btype.value} bond")
        _check_room(m, i, order, "atom")
        atoms, bonds = _graft(m, i, [Atom(sym)], [], 0, btype)
        return _finish("add_atom", params, atoms, bonds, mw_cap)

    return _run("add_atom", params, body)


def replace_atom(mol, idx, element, *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {"mol": _smiles_param(mol), "idx": idx, "element": element}

    def body():
        m = _load(mol)
        i = _index(m, idx)
        sym = _element(element)
        old = m.atoms[i]
        if old.element == sym and old.charge == 0:
            raise ToolFailure(f"atom {i} is already {sym}; no change")
        if old.aromatic and not get_element(sym).aromatic_ok:
            raise ToolFailure(f"{sym} cannot be part of an aromatic ring")
        new = Atom(sym, aromatic=old.aromatic)
        need = m.bond_order_sum(i)
        if max_valence(new) < need:
            raise ToolFailure(f"{sym} cannot hold the {need} bond order(s) on atom {i}")
        atoms = list(m.atoms)
        atoms[i] = new
        return _finish("replace_atom", params, atoms, m.bonds, mw_cap)

    return _run("replace_atom", params, body)


# -- fragment edits --------------------------------------------------------


def _load_fragment(text, name: str) -> tuple[list[Atom], list[Bond], int]:
    """Fragment atoms/bonds without the marker, and the attachment index."""
    if not isinstance(text, str) or not text.strip():
        raise ToolFailure(f"{name} must be a SMILES string")
    try:
        frag = parse_fragment(text, allow_dummy=True)
    except MoleculeError as exc:
        raise ToolFailure(f"could not parse {name}: {exc}") from None
    dummies = frag.dummies
    if not dummies:
        if len(frag.atoms) == 1:
            return [frag.atoms[0]], [], 0
        raise ToolFailure(f"{name} needs exactly one [*1] attachment point; none found")
    if len(dummies) > 1:
        raise ToolFailure(f"{name} needs exactly one [*1] attachment point; found {len(dummies)}")
    d = dummies[0]
    marker_bonds = [b for b in frag.bonds if d in (b.begin, b.end)]
    if len(marker_bonds) != 1:
        raise ToolFailure(f"the [*1] marker in {name} must be bonded to exactly one atom")
    site = marker_bonds[0].other(d)
    remap = {old: new for new, old in enumerate(i for i in range(len(frag.atoms)) if i != d)}
    atoms = [a for i, a in enumerate(frag.atoms) if i != d]
    bonds = [Bond(remap[b.begin], remap[b.end], b.type) for b in frag.bonds if d not in (b.begin, b.end)]
    try:
        Molecule(atoms, bonds)
    except MoleculeError as exc:
        raise ToolFailure(f"{name} is not a valid fragment: {exc}") from None
    return atoms, bonds, remap[site]


def _attach(tool, params, m: Molecule, i: int, atoms, bonds, site: int, btype: BondType, mw_cap) -> ToolResult:
    order = btype.order
    frag = Molecule(atoms, bonds)
    if frag.atoms[site].aromatic and btype is not BondType.SINGLE:
        raise ToolFailure("aromatic attachment atoms only accept a single bond")
    _check_room(m, i, order, "atom")
    _check_room(frag, site, order, "attachment atom")
    new_atoms, new_bonds = _graft(m, i, atoms, bonds, site, btype)
    return _finish(tool, params, new_atoms, new_bonds, mw_cap)


def add_functional_group(mol, idx, group, bond="single", *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {"mol": _smiles_param(mol), "idx": idx, "group": group, "bond": _bond_param(bond)}

    def body():
        m = _load(mol)
        i = _index(m, idx)
        entry = lookup_group(group) if isinstance(group, str) else None
        if entry is None:
            known = ", ".join(sorted(FUNCTIONAL_GROUPS))
            raise ToolFailure(f"unknown functional group {group!r}; known groups: {known}")
        btype = _bond(bond)
        frag = parse_cached(entry.smiles)
        return _attach("add_functional_group", params, m, i, frag.atoms, frag.bonds, entry.attachment, btype, mw_cap)

    return _run("add_functional_group", params, body)


def add_substructure(mol, idx, substructure, bond="single", *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {"mol": _smiles_param(mol), "idx": idx, "substructure": substructure, "bond": _bond_param(bond)}

    def body():
        m = _load(mol)
        i = _index(m, idx)
        btype = _bond(bond)
        if not isinstance(substructure, str) or "*" not in substructure:
            raise ToolFailure("substructure needs exactly one [*1] attachment point; none found")
        atoms, bonds, site = _load_fragment(substructure, "substructure")
        return _attach("add_substructure", params, m, i, atoms, bonds, site, btype, mw_cap)

    return _run("add_substructure", params, body)


def _anchored_match(m: Molecule, pattern, i: int, name: str) -> tuple[tuple[int, ...], list[tuple[int, int, int]]]:
    """Pick the match containing atom ``i``; return it with its boundary bonds.

    Boundary bonds are ``(inside, outside, bond index)``.  Among matches that
    contain ``i``, terminal ones (one boundary bond) are preferred, then the
    lexicographically smallest atom set.
    """
    if not isinstance(pattern, str):
        raise ToolFailure(f"{name} must be a SMARTS string")
    try:
        query = parse_smarts(pattern)
    except MoleculeError as exc:
        raise ToolFailure(f"could not parse {name}: {exc}") from None
    matches = query.match_sets(m)
    if not matches:
        raise ToolFailure(f"{name} {pattern!r} does not match the molecule")
    anchored = [s for s in matches if i in s]
    if not anchored:
        raise ToolFailure(f"no match of {name} {pattern!r} contains atom {i}")

    def boundary(s):
        inside = set(s)
        out = []
        for a in s:
            for nb, k in m.incident(a):
                if nb not in inside:
                    out.append((a, nb, k))
        return out

    scored = sorted(anchored, key=lambda s: (len(boundary(s)) != 1, s))
    best = scored[0]
    return best, boundary(best)


def _excise(m: Molecule, removed: set[int]) -> tuple[list[Atom], list[Bond], dict[int, int]]:
    atoms = list(m.atoms)
    for k, b in enumerate(m.bonds):
        a_in, e_in = b.begin in removed, b.end in removed
        if a_in != e_in:
            keep = b.end if a_in else b.begin
            atoms[keep] = _give_h(atoms[keep], m.kekule_order(k), m.hydrogens(keep))
    keep_idx = [i for i in range(len(m)) if i not in removed]
    remap = {old: new for new, old in enumerate(keep_idx)}
    new_atoms = [atoms[i] for i in keep_idx]
    new_bonds = [Bond(remap[b.begin], remap[b.end], b.type) for b in m.bonds if b.begin in remap and b.end in remap]
    return new_atoms, new_bonds, remap


def _demote_broken_aromatics(atoms: list[Atom], bonds: list[Bond]) -> list[Atom]:
    # atoms flagged aromatic that no longer sit in any aromatic bond cannot be aromatic
    touched = set()
    for b in bonds:
        if b.type is BondType.AROMATIC:
            touched.update((b.begin, b.end))
    return [a if not a.aromatic or i in touched else replace(a, aromatic=False) for i, a in enumerate(atoms)]


def replace_substructure(mol, idx, old_substructure, new_substructure, *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {
        "mol": _smiles_param(mol),
        "idx": idx,
        "old_substructure": old_substructure,
        "new_substructure": new_substructure,
    }

    def body():
        m = _load(mol)
        i = _index(m, idx)
        match, cut = _anchored_match(m, old_substructure, i, "old_substructure")
        if len(cut) == 0:
            raise ToolFailure("old_substructure covers the whole molecule; nothing to attach to")
        if len(cut) > 1:
            raise ToolFailure(
                f"non-terminal substructure: removing it would break {len(cut)} bonds (only 1 allowed)"
            )
        frag_atoms, frag_bonds, site = _load_fragment(new_substructure, "new_substructure")
        inside, outside, k = cut[0]
        btype = m.bonds[k].type
        if btype is BondType.AROMATIC:
            btype = BondType.SINGLE
        atoms, bonds, remap = _excise(m, set(match))
        atoms = _demote_broken_aromatics(atoms, bonds)
        try:
            rest = Molecule(atoms, bonds)
        except MoleculeError as exc:
            raise ToolFailure(f"removing the matched atoms leaves an invalid molecule: {exc}") from None
        return _attach("replace_substructure", params, rest, remap[outside], frag_atoms, frag_bonds, site, btype, mw_cap)

    return _run("replace_substructure", params, body)


def remove_substructure(mol, idx, substructure, *, mw_cap: float = MW_CAP) -> ToolResult:
    params = {"mol": _smiles_param(mol), "idx": idx, "substructure": substructure}

    def body():
        m = _load(mol)
        i = _index(m, idx)
        match, cut = _anchored_match(m, substructure, i, "substructure")
        if len(match) == len(m):
            raise ToolFailure("removing the substructure would leave an empty molecule")
        atoms, bonds, _ = _excise(m, set(match))
        atoms = _demote_broken_aromatics(atoms, bonds)
        try:
            draft = Molecule(atoms, bonds, sanitize=False)
        except MoleculeError as exc:
            raise ToolFailure(f"removing the substructure leaves an invalid molecule: {exc}") from None
        if draft.n_components != 1:
            raise ToolFailure(
                f"removing a non-terminal substructure would create {draft.n_components} fragments"
            )
        return _finish("remove_substructure", params, atoms, bonds, mw_cap)

    return _run("remove_substructure", params, body)


# -- crossover -------------------------------------------------------------


def eligible_cut_bonds(mol: Molecule, i: int) -> list[tuple[int, int]]:
    """``(neighbour, bond index)`` pairs of acyclic bonds incident to atom ``i``."""
    return [(nb, k) for nb, k in mol.incident(i) if not mol.bond_in_ring(k)]


def _split(mol: Molecule, k: int) -> tuple[list[int], list[int]]:
    b = mol.bonds[k]
    seen = {b.begin}
    stack = [b.begin]
    while stack:
        u = stack.pop()
        for v, kk in mol.incident(u):
            if kk != k and v not in seen:
                seen.add(v)
                stack.append(v)
    left = sorted(seen)
    right = sorted(set(range(len(mol))) - seen)
    return left, right


def _piece(mol: Molecule, keep: list[int], site: int) -> tuple[list[Atom], list[Bond], int]:
    removed = set(range(len(mol))) - set(keep)
    atoms, bonds, remap = _excise(mol, removed)
    return atoms, bonds, remap[site]


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def crossover_molecules(mol1, idx1, mol2, idx2, rng=None, *, mw_cap: float = MW_CAP) -> ToolResult:
    """Cut one acyclic bond at each chosen atom and join one of the 4 pairings.

    ``rng`` (a numpy Generator or seed) picks the cut bond of each parent
    among its eligible bonds and then the pairing, in that order.
    """
    params = {"mol1": _smiles_param(mol1), "idx1": idx1, "mol2": _smiles_param(mol2), "idx2": idx2}

    def body():
        gen = _as_rng(rng)
        pieces = []
        for name, mol, idx in (("mol1", mol1, idx1), ("mol2", mol2, idx2)):
            m = _load(mol, name)
            i = _index(m, idx, "idx" + name[-1])
            if len(m) < 2:
                raise ToolFailure(f"atom {i} in {name} is isolated and cannot be split into 2 fragments")
            options = eligible_cut_bonds(m, i)
            if not options:
                raise ToolFailure(
                    f"splitting {name} at atom {i} does not give 2 distinct fragments (all its bonds are in rings)"
                )
            nb, k = options[int(gen.integers(len(options)))]
            left, right = _split(m, k)
            near, far = (left, right) if i in left else (right, left)
            pieces.append([_piece(m, near, i), _piece(m, far, nb)])
        choice = int(gen.integers(4))
        a_atoms, a_bonds, a_site = pieces[0][choice // 2]
        b_atoms, b_bonds, b_site = pieces[1][choice % 2]
        base = Molecule(a_atoms, a_bonds)
        for which, (atoms, bonds, site) in (("first", (a_atoms, a_bonds, a_site)), ("second", (b_atoms, b_bonds, b_site))):
            frag = Molecule(atoms, bonds)
            if _available(frag, site) < 1:
                raise ToolFailure(f"no free valence at the {which} cut site to rejoin the fragments")
        atoms, bonds = _graft(base, a_site, b_atoms, b_bonds, b_site, BondType.SINGLE)
        details = {"pairing": choice, "fragment_sizes": (len(a_atoms), len(b_atoms))}
        return _finish("crossover_molecules", params, atoms, bonds, mw_cap, details)

    return _run("crossover_molecules", params, body)


def _smiles_param(mol):
    return mol.smiles if isinstance(mol, Molecule) else mol


def _bond_param(bond):
    return bond.value if isinstance(bond, BondType) else bond


_DISPATCH = {
    "add_atom": (add_atom, ("mol", "idx", "element", "bond")),
    "replace_atom": (replace_atom, ("mol", "idx", "element")),
    "add_functional_group": (add_functional_group, ("mol", "idx", "group", "bond")),
    "add_substructure": (add_substructure, ("mol", "idx", "substructure", "bond")),
    "replace_substructure": (replace_substructure, ("mol", "idx", "old_substructure", "new_substructure")),
    "remove_substructure": (remove_substructure, ("mol", "idx", "substructure")),
    "crossover_molecules": (crossover_molecules, ("mol1", "idx1", "mol2", "idx2")),
}


def tool_parameters(name: str) -> tuple[str, ...]:
    return _DISPATCH[name][1]


def dispatch(name, arguments, rng=None, *, mw_cap: float = MW_CAP) -> ToolResult:
    """Run a tool by wire name with a JSON-style argument mapping."""
    if not isinstance(arguments, dict):
        return _fail(str(name), {}, "tool arguments must be a JSON object")
    if name not in _DISPATCH:
        return _fail(str(name), dict(arguments), f"unknown tool {name!r}; available: {', '.join(TOOL_NAMES)}")
    fn, names = _DISPATCH[name]
    missing = [p for p in names if p not in arguments]
    extra = sorted(set(arguments) - set(names))
    if missing or extra:
        problems = []
        if missing:
            problems.append("missing parameter(s) " + ", ".join(missing))
        if extra:
            problems.append("unexpected parameter(s) " + ", ".join(extra))
        return _fail(name, dict(arguments), "; ".join(problems))
    kwargs = {p: arguments[p] for p in names}
    if name == "crossover_molecules":
        return fn(**kwargs, rng=rng, mw_cap=mw_cap)
    return fn(**kwargs, mw_cap=mw_cap)

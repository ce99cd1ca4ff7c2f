"""JSON function-calling schemas for the seven tools."""

from __future__ import annotations

import copy

import jsonschema

from .groups import FUNCTIONAL_GROUPS

_MOL = {"type": "string", "description": "Current molecule as a SMILES string."}
_IDX = {"type": "integer", "minimum": 0, "description": "Atom index in mol, as listed in the ligand structure report."}
_BOND = {
    "type": "string",
    "enum": ["single", "double", "triple"],
    "description": "Bond type between the existing atom and the new atom or group.",
}


def _fn(name: str, description: str, props: dict) -> dict:
    return {
        "name": name,
        "description": description,
        "parameters": {
            "type": "object",
            "properties": props,
            "required": list(props),
            "additionalProperties": False,
        },
    }


TOOL_SCHEMAS = (
    _fn(
        "add_atom",
        "Bond one new atom of the given element to atom idx.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "element": {"type": "string", "description": "Element symbol, e.g. C, N, O, F, Cl."},
            "bond": _BOND,
        },
    ),
    _fn(
        "replace_atom",
        "Change the element of atom idx, keeping all of its bonds.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "element": {"type": "string", "description": "New element symbol."},
        },
    ),
    _fn(
        "add_functional_group",
        "Attach a named functional group or ring to atom idx through the group's fixed attachment atom.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "group": {
                "type": "string",
                "description": "Group name. One of: " + ", ".join(FUNCTIONAL_GROUPS) + ".",
            },
            "bond": _BOND,
        },
    ),
    _fn(
        "add_substructure",
        "Attach a custom SMILES fragment to atom idx. Mark the attachment atom's free bond with [*1], e.g. [*1]C(=O)N.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "substructure": {"type": "string", "description": "SMILES fragment with exactly one [*1] marker."},
            "bond": _BOND,
        },
    ),
    _fn(
        "replace_substructure",
        "Replace the terminal substructure matching old_substructure that contains atom idx. "
        "The match must be attached to the rest of the molecule by exactly one bond.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "old_substructure": {"type": "string", "description": "SMARTS pattern of the part to replace."},
            "new_substructure": {
                "type": "string",
                "description": "SMILES of the replacement with one [*1] marker (a single atom needs no marker).",
            },
        },
    ),
    _fn(
        "remove_substructure",
        "Delete the substructure matching the SMARTS pattern that contains atom idx. "
        "The remaining molecule must stay in one piece.",
        {
            "mol": _MOL,
            "idx": _IDX,
            "substructure": {"type": "string", "description": "SMARTS pattern of the part to remove."},
        },
    ),
    _fn(
        "crossover_molecules",
        "Cut each molecule at a non-ring bond of the given atom and join a fragment of mol1 to a fragment of mol2.",
        {
            "mol1": {"type": "string", "description": "First molecule as SMILES."},
            "idx1": {"type": "integer", "minimum": 0, "description": "Atom index in mol1 to cut at."},
            "mol2": {"type": "string", "description": "Second molecule as SMILES."},
            "idx2": {"type": "integer", "minimum": 0, "description": "Atom index in mol2 to cut at."},
        },
    ),
)

_BY_NAME = {s["name"]: s for s in TOOL_SCHEMAS}


def tool_schemas() -> list[dict]:
    return copy.deepcopy(list(TOOL_SCHEMAS))


def validate_arguments(name: str, arguments) -> str | None:
    """None when ``arguments`` fit the tool's schema, else an error message."""
    schema = _BY_NAME.get(name)
    if schema is None:
        return f"unknown tool {name!r}"
    try:
        jsonschema.validate(arguments, schema["parameters"])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path)
        return f"invalid arguments for {name}" + (f" ({where})" if where else "") + f": {exc.message}"
    return None

"""Valence-safe molecule editing tools, reports and wire schemas."""

from .groups import FUNCTIONAL_GROUPS, FunctionalGroup, lookup_group, normalize_group_name
from .smarts import QueryAtom, SmartsError, SmartsPattern, parse_smarts
from .tools import (
    MW_CAP,
    TOOL_NAMES,
    ToolResult,
    add_atom,
    add_functional_group,
    add_substructure,
    crossover_molecules,
    dispatch,
    eligible_cut_bonds,
    remove_substructure,
    replace_atom,
    replace_substructure,
    tool_parameters,
)
from .reports import (
    PROPERTY_FIELDS,
    STRUCTURE_FIELDS,
    calculate_properties,
    format_properties,
    format_structure,
    get_ligand_structure,
)
from .schemas import TOOL_SCHEMAS, tool_schemas, validate_arguments

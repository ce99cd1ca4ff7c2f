"""Prompt text for the editing agent."""

from __future__ import annotations

from ..toolbox import calculate_properties, format_properties, format_structure, get_ligand_structure

SYSTEM_PROMPT = (
    "You are a molecular design agent.\n"
    "You may ONLY modify molecules using tools.\n"
    "Only make one modification at a time.\n"
    "Read the parameter descriptions for the tools very carefully.\n"
    "Always ensure that your modifications don't break valence rules and do not result in a fragmented molecule."
)

DEFAULT_GOAL = (
    "Goal: I want to improve Binding Affinity against [PROTEIN_TARGET], minimize SA (Synthetic Accessibility), "
    "and maximize QED. Recall that a more negative binding affinity is better, and a more positive binding "
    "affinity is worse. Please propose a new molecule better than the current molecule. I have given you two "
    "candidate ligands. Please propose a new molecule that binds better to [PROTEIN_TARGET]. You are encouraged "
    "to make a crossover between the candidate molecules on the first step, then mutate the resulting molecule. "
    "Only make a few modifications (at most 3), then respond with FINAL_ANSWER. Do not let molecular weight "
    "exceed 700."
)

_LIGAND = (
    "{n}. {smiles}\n"
    "Binding Affinity against [PROTEIN_TARGET]: {dG}\n"
    "SA (Synthetic Accessibility): {sa}\n"
    "QED: {qed}"
)


def _num(x: float) -> str:
    return f"{x:.3f}"


def initial_prompt(parent1, parent2, target: str, goal: str | None = None, provider=None) -> str:
    """First user message; parents are :class:`~molagent.objectives.ScoredMolecule`."""
    parts = [goal or DEFAULT_GOAL, ""]
    for n, p in ((1, parent1), (2, parent2)):
        parts.append(_LIGAND.format(n=n, smiles=p.smiles, dG=_num(p.dG), sa=_num(p.sa), qed=_num(p.qed)))
        parts.append("")
    for n, p in ((1, parent1), (2, parent2)):
        parts.append(
            f"Ligand structure and possible attachment points for ligand {n}:\n"
            + format_structure(get_ligand_structure(p.smiles))
        )
    for n, p in ((1, parent1), (2, parent2)):
        parts.append(
            f"Molecule properties for ligand {n}: " + format_properties(calculate_properties(p.smiles, provider))
        )
    return "\n".join(parts).replace("[PROTEIN_TARGET]", target)


def intermediate_prompt(smiles: str | None, provider=None) -> str:
    head = (
        "Output FINAL_ANSWER if you have made sufficient modifications (make at most 3). "
        "Ensure that desired properties are maintained."
    )
    if smiles is None:
        return head + "\nNo modification has succeeded yet; the candidate ligands are unchanged."
    return (
        f"{head}\n"
        f"Current SMILES: {smiles}\n\n"
        "Ligand structure and possible attachment points:\n"
        + format_structure(get_ligand_structure(smiles))
        + "\nMolecule properties: "
        + format_properties(calculate_properties(smiles, provider))
    )

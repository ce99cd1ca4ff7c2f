"""Element table for the supported organic subset."""

from __future__ import annotations

from dataclasses import dataclass


class UnsupportedElementError(KeyError):
    """Raised when an element symbol is outside the supported subset."""

    def __str__(self) -> str:
        return f"unsupported element: {self.args[0]!r}"


@dataclass(frozen=True)
class Element:
    symbol: str
    default_valences: tuple[int, ...]
    atomic_weight: float
    aromatic_ok: bool = False


_ELEMENTS = {
    e.symbol: e
    for e in (
        Element("B", (3,), 10.81, aromatic_ok=True),
        Element("C", (4,), 12.011, aromatic_ok=True),
        Element("N", (3, 5), 14.007, aromatic_ok=True),
        Element("O", (2,), 15.999, aromatic_ok=True),
        Element("P", (3, 5), 30.974, aromatic_ok=True),
        Element("S", (2, 4, 6), 32.06, aromatic_ok=True),
        Element("F", (1,), 18.998),
        Element("Cl", (1,), 35.45),
        Element("Br", (1,), 79.904),
        Element("I", (1,), 126.904),
    )
}

HYDROGEN_WEIGHT = 1.008

# charged states follow the isoelectronic neighbour (N+ ~ C, O- ~ F, ...)
_CHARGED_VALENCES: dict[tuple[str, int], tuple[int, ...]] = {
    ("B", -1): (4,),
    ("C", -1): (3,),
    ("C", 1): (3,),
    ("N", 1): (4,),
    ("N", -1): (2,),
    ("O", 1): (3,),
    ("O", -1): (1,),
    ("P", 1): (4,),
    ("P", -1): (2,),
    ("S", 1): (3,),
    ("S", -1): (1,),
    ("F", -1): (0,),
    ("Cl", -1): (0,),
    ("Br", -1): (0,),
    ("I", -1): (0,),
}

ORGANIC_SUBSET = frozenset(_ELEMENTS)
AROMATIC_SYMBOLS = frozenset(s for s, e in _ELEMENTS.items() if e.aromatic_ok)
HALOGENS = frozenset({"F", "Cl", "Br", "I"})


def get_element(symbol: str) -> Element:
    try:
        return _ELEMENTS[symbol]
    except KeyError:
        raise UnsupportedElementError(symbol) from None


def allowed_valences(symbol: str, charge: int = 0) -> tuple[int, ...]:
    """Allowed total bond orders (bonds + hydrogens) for a charged atom.

    An empty tuple means the charge state is not modelled; every such
    atom is reported as a valence violation.
    """
    element = get_element(symbol)
    if charge == 0:
        return element.default_valences
    return _CHARGED_VALENCES.get((symbol, charge), ())

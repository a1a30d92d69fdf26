"""Field models, species, kernel kinds and the contraction channels each model allows."""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

from ..errors import UnknownSpecies


class Model(str, Enum):
    TWO_SCALAR = "TwoScalar"
    MSR = "MSR"
    DIRAC = "Dirac"


class Kind(str, Enum):
    TWO_POINT = "TwoPoint"
    FEYNMAN = "Feynman"
    ANTI_FEYNMAN = "AntiFeynman"
    RETARDED = "Retarded"
    ADVANCED = "Advanced"
    # symmetric Hadamard part; only produced by reduce_kernels
    HADAMARD = "Hadamard"


# canonical species order per model
SPECIES: dict[Model, tuple[str, ...]] = {
    Model.TWO_SCALAR: ("phi1", "phi2"),
    Model.MSR: ("phi", "phiTilde"),
    Model.DIRAC: ("psi", "psiBar"),
}

ODD_SPECIES = frozenset({"psi", "psiBar"})

_SPECIES_RANK = {s: i for species in SPECIES.values() for i, s in enumerate(species)}


class Channel(NamedTuple):
    """An allowed contraction between a left species and a right species.

    ``name`` identifies the propagator and ``sign`` is the factor the
    deformation attaches to this orientation.
    """

    name: tuple[str, str]
    sign: int


def model_of(value) -> Model:
    if isinstance(value, Model):
        return value
    try:
        return Model(value)
    except ValueError:
        aliases = {"two_scalar": Model.TWO_SCALAR, "twoscalar": Model.TWO_SCALAR,
                   "msr": Model.MSR, "dirac": Model.DIRAC}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        raise UnknownSpecies(f"unknown model {value!r}") from None


def check_species(model: Model, species: str) -> str:
    if species not in SPECIES[model]:
        raise UnknownSpecies(f"species {species!r} does not belong to model {model.value}")
    return species


def is_odd(model: Model) -> bool:
    return model is Model.DIRAC


def species_rank(species: str) -> int:
    return _SPECIES_RANK[species]


def channel_between(model: Model, left: str, right: str) -> Channel | None:
    """Contraction channel for a left factor of species ``left`` and a right one of ``right``."""
    if model is Model.TWO_SCALAR:
        if left == right:
            return Channel((left, left), 1)
        return None
    if model is Model.MSR:
        if {left, right} == {"phi", "phiTilde"}:
            return Channel(("phi", "phiTilde"), 1)
        return None
    # Dirac: psi on the left gives +Delta_psi, psiBar on the left gives -Delta_psiBar
    if left == "psi" and right == "psiBar":
        return Channel(("psi", "psiBar"), 1)
    if left == "psiBar" and right == "psi":
        return Channel(("psiBar", "psi"), -1)
    return None


_PARTNER = {"phi1": "phi1", "phi2": "phi2", "phi": "phiTilde", "phiTilde": "phi",
            "psi": "psiBar", "psiBar": "psi"}


def partner_species(model: Model, species: str) -> str:
    """The unique species a factor of ``species`` can be contracted with."""
    return _PARTNER[species]


def allowed_channels(model: Model) -> tuple[tuple[str, str], ...]:
    if model is Model.TWO_SCALAR:
        return (("phi1", "phi1"), ("phi2", "phi2"))
    if model is Model.MSR:
        return (("phi", "phiTilde"),)
    return (("psi", "psiBar"), ("psiBar", "psi"))


def kind_is_directed(model: Model, kind: Kind, oriented_two_point: bool = False) -> bool:
    """Whether a kernel of this kind keeps the order of its endpoints.

    Spinor propagators always do. For the even models the Feynman-type kernels
    and the symmetric Hadamard part are symmetric; the causal propagators are
    not, and the two-point function is symmetric unless an oriented treatment
    is requested.
    """
    if model is Model.DIRAC:
        return True
    if kind in (Kind.RETARDED, Kind.ADVANCED):
        return True
    if kind is Kind.TWO_POINT:
        return oriented_two_point
    return False

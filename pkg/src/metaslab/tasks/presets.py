"""
Parameter sets of the metamaterial slab studies: transmission and I-V for
slabs of 5, 15, 30 and 34 nm, and the traversal time cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from metaslab.physics.structure import (
    BiasKind,
    Heterostructure,
    StructureVariant,
    paper_structure,
)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    thickness: float
    variant: StructureVariant = StructureVariant.STANDARD
    # Mode used when neither the file nor the flags select one.
    mode: str = "transmission"
    # Extra section keys applied below the file values.
    defaults: dict[str, dict] = field(default_factory=dict)

    def structure(self) -> Heterostructure:
        return paper_structure(self.thickness, self.variant)

    def as_dict(self) -> dict:
        s = self.structure()
        return {
            "description": self.description,
            "mode": self.mode,
            "left_mass": s.left_lead.mass,
            "left_potential": s.left_lead.potential,
            "right_mass": s.right_lead.mass,
            "right_potential": s.right_lead.potential,
            "masses": [layer.mass for layer in s.interior],
            "potentials": [layer.potential for layer in s.interior],
            "thicknesses": [layer.thickness for layer in s.interior],
        }


_PRESETS = [
    Preset("fig1a-5nm", "Transmission and I-V, d = 5 nm", 5.0),
    Preset("fig1a-15nm", "Transmission and I-V, d = 15 nm", 15.0),
    Preset("fig1b-30nm", "Transmission and I-V, d = 30 nm", 30.0),
    Preset("fig1b-34nm", "Transmission and I-V, d = 34 nm", 34.0),
    Preset("fig3a", "Traversal times vs energy, d = 5 nm", 5.0, mode="traversal"),
    Preset("fig3b", "Traversal times vs energy, d = 30 nm", 30.0, mode="traversal"),
    Preset(
        "fig3c",
        "Traversal times vs energy, d = 5 nm, m1 = m3 = |m2| = 0.02 m0",
        5.0,
        variant=StructureVariant.EQUAL_MASS,
        mode="traversal",
    ),
    Preset(
        "fig3d",
        "Traversal times vs bias at E = 0.2 eV, d = 5 nm",
        5.0,
        mode="traversal_bias",
        defaults={
            "grid": {"energy": 0.2},
            "bias": {"kind": BiasKind.MIDPOINT.value},
        },
    ),
]

PRESETS: dict[str, Preset] = {p.name: p for p in _PRESETS}


def get_preset(name: str) -> Preset:
    if not (preset := PRESETS.get(name)):
        raise KeyError(name)
    return preset

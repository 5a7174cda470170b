"""
Layered heterostructures: semi-infinite leads around an ordered stack of
interior layers, the presets of the metamaterial slab and the bias models
deforming the potential profile.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from metaslab.errors import StructureError

# Sanity window for |mass| in units of m0.
MASS_MIN = 1e-4
MASS_MAX = 1e2

# Slab parameters of the negative mass barrier.
LEAD_MASS = 0.4
LEAD_MASS_EQUAL = 0.02
SLAB_MASS = -0.02
SLAB_POTENTIAL = 0.5


class StructureVariant(Enum):
    STANDARD = "standard"
    EQUAL_MASS = "equal_mass"


class BiasKind(Enum):
    NONE = "none"
    MIDPOINT = "midpoint"
    STEPPED = "stepped"


@dataclass(frozen=True)
class Layer:
    """
    One homogeneous region. mass in m0 (may be negative), potential in eV,
    thickness in nm. Leads ignore the thickness.
    """

    mass: float
    potential: float
    thickness: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mass) or self.mass == 0:
            raise StructureError(f"layer mass must be finite and non zero: {self.mass}")
        if not MASS_MIN < abs(self.mass) < MASS_MAX:
            raise StructureError(
                f"|mass| {abs(self.mass)} outside ({MASS_MIN}, {MASS_MAX})"
            )
        if not math.isfinite(self.potential):
            raise StructureError(f"layer potential not finite: {self.potential}")
        if not math.isfinite(self.thickness) or self.thickness < 0:
            raise StructureError(f"layer thickness invalid: {self.thickness}")


@dataclass(frozen=True)
class Heterostructure:
    left_lead: Layer
    interior: tuple[Layer, ...]
    right_lead: Layer

    def __post_init__(self):
        # Lists are accepted for convenience, but the stack is stored immutable.
        object.__setattr__(self, "interior", tuple(self.interior))

        if len(self.interior) == 0:
            raise StructureError("interior layer list is empty")

        for i, layer in enumerate(self.interior):
            if layer.thickness <= 0:
                raise StructureError(
                    f"interior layer {i} has non positive thickness {layer.thickness}"
                )

    @property
    def layers(self) -> tuple[Layer, ...]:
        """Left lead, interior layers and right lead in order."""
        return (self.left_lead, *self.interior, self.right_lead)

    @property
    def total_thickness(self) -> float:
        return float(sum(layer.thickness for layer in self.interior))

    def interfaces(self) -> np.ndarray:
        """Interface positions in nm, starting with z = 0."""
        thicknesses = [layer.thickness for layer in self.interior]
        return np.concatenate(([0.0], np.cumsum(thicknesses)))

    @property
    def is_single_slab(self) -> bool:
        return len(self.interior) == 1


@dataclass(frozen=True)
class BiasModel:
    kind: BiasKind = BiasKind.NONE
    voltage: float = 0.0
    n_steps: int = 1

    def __post_init__(self):
        if not isinstance(self.n_steps, int) or self.n_steps < 1:
            raise StructureError(f"n_steps must be a positive integer: {self.n_steps}")
        if not math.isfinite(self.voltage):
            raise StructureError(f"bias voltage not finite: {self.voltage}")

    def at(self, voltage: float) -> BiasModel:
        """Same profile kind at another voltage."""
        return replace(self, voltage=voltage)


def paper_structure(
    d: float, variant: StructureVariant = StructureVariant.STANDARD
) -> Heterostructure:
    """
    Negative mass slab of thickness d between positive mass leads. The
    equal_mass variant uses |m2| for both leads.
    """

    if not d > 0:
        raise StructureError(f"slab thickness must be positive: {d}")

    lead_mass = LEAD_MASS if variant is StructureVariant.STANDARD else LEAD_MASS_EQUAL
    lead = Layer(mass=lead_mass, potential=0.0)

    return Heterostructure(
        left_lead=lead,
        interior=(Layer(mass=SLAB_MASS, potential=SLAB_POTENTIAL, thickness=d),),
        right_lead=lead,
    )


def homogeneous_structure(d: float, mass: float, potential: float) -> Heterostructure:
    """Identical media everywhere; the slab region is free flight."""

    medium = Layer(mass=mass, potential=potential)
    return Heterostructure(
        left_lead=medium,
        interior=(replace(medium, thickness=d),),
        right_lead=medium,
    )


def split_interior(s: Heterostructure, n: int) -> Heterostructure:
    """Splits every interior layer into n equal sublayers with equal parameters."""

    if n < 1:
        raise StructureError(f"number of sublayers must be positive: {n}")

    interior = tuple(
        replace(layer, thickness=layer.thickness / n)
        for layer in s.interior
        for _ in range(n)
    )
    return replace(s, interior=interior)


def apply_bias(s: Heterostructure, b: BiasModel) -> Heterostructure:
    """
    Deforms the potential profile for an applied bias V_a. The electron
    potential energy drops by e*V_a from the left lead to the right lead;
    the drop is confined to the interior.
    """

    if b.kind is BiasKind.NONE or b.voltage == 0:
        return s

    drop = b.voltage
    right_lead = replace(s.right_lead, potential=s.right_lead.potential - drop)

    if b.kind is BiasKind.MIDPOINT:
        interior = tuple(
            replace(layer, potential=layer.potential - drop / 2) for layer in s.interior
        )
        return replace(s, interior=interior, right_lead=right_lead)

    # Stepped: piecewise constant sampling of the linear drop at the sublayer
    # midpoints.
    total = s.total_thickness
    sublayers: list[Layer] = []
    z_left = 0.0
    for layer in s.interior:
        t = layer.thickness / b.n_steps
        for i in range(b.n_steps):
            z_mid = z_left + (i + 0.5) * t
            sublayers.append(
                replace(
                    layer, potential=layer.potential - drop * z_mid / total, thickness=t
                )
            )
        z_left += layer.thickness

    logging.debug(
        f"Stepped bias applied; voltage {b.voltage}; sublayers {len(sublayers)}"
    )
    return replace(s, interior=tuple(sublayers), right_lead=right_lead)

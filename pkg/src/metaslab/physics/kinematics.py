"""
Wavenumbers of the homogeneous layers.

The branch follows the optical convention for left handed media: in a
negative mass layer the propagating wavenumber is the negative root, so that
the phase velocity and the probability current point in opposite
directions. Evanescent waves use the branch with Im(k) > 0, which decays
towards +z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from metaslab.errors import DomainError, StructureError

from .quantities import constants

if TYPE_CHECKING:
    from .structure import Layer


class Regime(Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"
    CRITICAL = "critical"


@dataclass(frozen=True)
class Wavenumber:
    value: complex
    regime: Regime

    @property
    def is_propagating(self) -> bool:
        return self.regime is Regime.PROPAGATING


def _q_squared(energy, layer: Layer):
    if layer.mass == 0:
        raise StructureError("zero effective mass")
    return layer.mass * (energy - layer.potential) / constants().hbar_sq_over_2m0


def wavenumber(energy: float, layer: Layer) -> Wavenumber:
    """Wavenumber in 1/nm of a plane wave with the given energy in the layer."""

    if not math.isfinite(energy):
        raise DomainError(f"energy not finite: {energy}")

    q2 = _q_squared(energy, layer)

    if q2 > 0:
        root = math.sqrt(q2)
        value = root if layer.mass > 0 else -root
        return Wavenumber(complex(value, 0.0), Regime.PROPAGATING)

    if q2 < 0:
        return Wavenumber(complex(0.0, math.sqrt(-q2)), Regime.EVANESCENT)

    return Wavenumber(0j, Regime.CRITICAL)


def wavenumber_array(energies: np.ndarray, layer: Layer) -> np.ndarray:
    """
    Vectorized wavenumber with the same branch rules. Critical entries are
    exactly 0.
    """

    q2 = _q_squared(np.asarray(energies, dtype=float), layer)
    sign = 1.0 if layer.mass > 0 else -1.0

    k = np.zeros(q2.shape, dtype=complex)
    prop = q2 > 0
    evan = q2 < 0
    k[prop] = sign * np.sqrt(q2[prop])
    k[evan] = 1j * np.sqrt(-q2[evan])
    return k


def probability_current(k: complex, mass: float, amplitude: complex = 1.0) -> float:
    """
    Probability current in nm/fs of the single plane wave amplitude*exp(ikz).
    Evanescent waves carry no current.
    """

    c = constants()
    return c.hbar * k.real * abs(amplitude) ** 2 / (mass * c.m0)

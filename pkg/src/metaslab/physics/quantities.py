"""
Unit system and physical constants.

All physics modules work in eV, nm, fs and masses in units of the free
electron mass m0. The values derive from CODATA 2018 and are kept as literals
so the math core never depends on the installed scipy's constant tables.
"""

from __future__ import annotations

import hashlib
from dataclasses import astuple, dataclass

# CODATA 2018, SI
HBAR_SI = 1.054571817e-34  # J s
M0_SI = 9.1093837015e-31  # kg
E_CHARGE = 1.602176634e-19  # C
KB_SI = 1.380649e-23  # J/K

# Derived in the {eV, nm, fs, m0} system.
HBAR = 0.658211956547607  # eV fs
M0 = 5.68563010356572  # eV fs^2 / nm^2
HBAR_SQ_OVER_2M0 = 0.0380998211148596  # eV nm^2
KB = 8.61733326214518e-05  # eV / K


@dataclass(frozen=True)
class PhysicalConstants:
    hbar_sq_over_2m0: float
    hbar: float
    kB: float
    m0: float
    e_charge: float
    hbar_si: float
    m0_si: float

    def thermal_energy(self, temperature: float) -> float:
        """kB*T in eV."""
        return self.kB * temperature

    def check(self, rel: float = 1e-9) -> bool:
        """True if hbar^2/(2 m0) matches the stored combination to rel."""

        recomputed = self.hbar**2 / (2 * self.m0)
        return abs(recomputed - self.hbar_sq_over_2m0) <= rel * self.hbar_sq_over_2m0


_CONSTANTS = PhysicalConstants(
    hbar_sq_over_2m0=HBAR_SQ_OVER_2M0,
    hbar=HBAR,
    kB=KB,
    m0=M0,
    e_charge=E_CHARGE,
    hbar_si=HBAR_SI,
    m0_si=M0_SI,
)


def constants() -> PhysicalConstants:
    """Returns the canonical constant set."""
    return _CONSTANTS


def constant_set_hash() -> str:
    """Short fingerprint of the constant set, echoed into sweep metadata."""

    text = ";".join(repr(v) for v in astuple(_CONSTANTS))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

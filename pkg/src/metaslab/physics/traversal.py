"""
Traversal times of ballistic electrons through the slab.

tau is the integral of 1/v_g over the slab with v_g = J/|psi|^2. It is
compared with two references over the same distance: free flight in the
right lead medium (tau_no_slab) and flight through an unbounded slab medium
without reflections (tau_no_refl). With alpha = k3 m2 / (m3 k2) the closed
form reads

    tau = (m3 / 2 hbar k3) [(1 + alpha^2) d + (1 - alpha^2) sin(2 k2 d) / (2 k2)]

so tau - tau_no_slab has the sign of alpha^2 - 1: electrons below the equal
time energy are fast, above it slow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from metaslab.errors import DomainError, UnsupportedConfiguration

from .kinematics import wavenumber
from .quantities import constants
from .scattering import solve_n_layer, wavefunction_in_region
from .structure import apply_bias

if TYPE_CHECKING:
    from .structure import BiasModel, Heterostructure

# Relative band around tau_no_slab classified as equal.
EQUAL_TOLERANCE = 1e-9

DEFAULT_N_QUAD = 4096


class TimeRegime(Enum):
    FAST = "fast"
    SLOW = "slow"
    EQUAL = "equal"


@dataclass(frozen=True)
class TraversalReport:
    energy: float
    tau: float
    tau_no_slab: float
    tau_no_refl: float
    alpha: float
    regime: TimeRegime


def classify(tau: float, tau_no_slab: float) -> TimeRegime:
    if abs(tau - tau_no_slab) <= EQUAL_TOLERANCE * abs(tau_no_slab):
        return TimeRegime.EQUAL
    return TimeRegime.FAST if tau < tau_no_slab else TimeRegime.SLOW


def reference_times(energy: float, s: Heterostructure) -> tuple[float, float, float]:
    """
    (tau_no_slab, tau_no_refl, alpha) in fs. tau_no_slab covers the total
    interior thickness in the right lead medium, tau_no_refl sums the
    reflectionless flight times of the interior layers and alpha is their
    ratio, k3 m2 / (m3 k2) for a single slab.
    """

    c = constants()

    k3 = wavenumber(energy, s.right_lead)
    if not k3.is_propagating:
        raise DomainError(f"right lead not propagating at E={energy} eV")
    tau_no_slab = (
        s.total_thickness * s.right_lead.mass * c.m0 / (c.hbar * k3.value.real)
    )

    tau_no_refl = 0.0
    for layer in s.interior:
        k = wavenumber(energy, layer)
        if not k.is_propagating:
            raise DomainError(
                f"interior layer {k.regime.value} at E={energy} eV; no reflectionless "
                "reference time"
            )
        tau_no_refl += layer.thickness * layer.mass * c.m0 / (c.hbar * k.value.real)

    return tau_no_slab, tau_no_refl, tau_no_refl / tau_no_slab


def traversal_closed(energy: float, s: Heterostructure) -> TraversalReport:
    """Closed form traversal time of a single propagating slab."""

    if not s.is_single_slab:
        raise DomainError("closed form requires exactly one interior layer")

    slab = s.interior[0]
    k2 = wavenumber(energy, slab)
    if not k2.is_propagating:
        raise DomainError(
            f"slab is {k2.regime.value} at E={energy} eV; use traversal_numeric"
        )

    c = constants()
    tau_no_slab, tau_no_refl, _ = reference_times(energy, s)

    k2r = k2.value.real
    k3 = wavenumber(energy, s.right_lead).value.real
    m2, m3, d = slab.mass, s.right_lead.mass, slab.thickness
    alpha = k3 * m2 / (m3 * k2r)

    tau = (
        m3
        * c.m0
        / (2 * c.hbar * k3)
        * ((1 + alpha**2) * d + (1 - alpha**2) * math.sin(2 * k2r * d) / (2 * k2r))
    )

    return TraversalReport(
        energy=energy,
        tau=tau,
        tau_no_slab=tau_no_slab,
        tau_no_refl=tau_no_refl,
        alpha=alpha,
        regime=classify(tau, tau_no_slab),
    )


def traversal_numeric(
    energy: float, s: Heterostructure, n_quad: int = DEFAULT_N_QUAD
) -> float:
    """
    tau in fs by Simpson quadrature of |psi|^2 / J over every interior layer.
    J is the transmitted flux, which is constant through the stack.
    """

    if n_quad < 64:
        raise ValueError(f"n_quad must be at least 64: {n_quad}")

    c = constants()
    sol = solve_n_layer(energy, s)

    a_out = sol.amplitudes[-1][0]
    k_out = sol.wavenumbers[-1].value.real
    flux = c.hbar * k_out * abs(a_out) ** 2 / (s.right_lead.mass * c.m0)
    if flux == 0:
        raise DomainError(f"no transmitted flux at E={energy} eV")

    interfaces = s.interfaces()
    tau = 0.0
    for index in range(1, len(s.interior) + 1):
        z = np.linspace(interfaces[index - 1], interfaces[index], n_quad + 1)
        psi, _ = wavefunction_in_region(sol, s, index, z)
        tau += float(simpson(np.abs(psi) ** 2, x=z)) / flux

    return tau


def traversal_report(
    energy: float, s: Heterostructure, n_quad: int = DEFAULT_N_QUAD
) -> TraversalReport:
    """Closed form for a propagating single slab, quadrature otherwise."""

    if s.is_single_slab and wavenumber(energy, s.interior[0]).is_propagating:
        return traversal_closed(energy, s)

    tau_no_slab, tau_no_refl, alpha = reference_times(energy, s)
    tau = traversal_numeric(energy, s, n_quad)
    return TraversalReport(
        energy=energy,
        tau=tau,
        tau_no_slab=tau_no_slab,
        tau_no_refl=tau_no_refl,
        alpha=alpha,
        regime=classify(tau, tau_no_slab),
    )


def traversal_vs_energy(
    energies: Iterable[float], s: Heterostructure
) -> list[TraversalReport]:
    return [traversal_report(float(e), s) for e in energies]


def _slab_potentials(s: Heterostructure) -> tuple[float, float, float]:
    if not s.is_single_slab:
        raise DomainError("equal time energy requires exactly one interior layer")
    return s.left_lead.potential, s.interior[0].potential, s.right_lead.potential


def equal_time_energy(s: Heterostructure) -> float:
    """Energy where alpha = 1, V2 m3 / (m3 - m2), for leads at zero potential."""

    v1, v2, v3 = _slab_potentials(s)
    if v1 != 0 or v3 != 0:
        raise UnsupportedConfiguration(
            f"equal time energy needs V1 = V3 = 0, got V1={v1}, V3={v3}; "
            "see equal_time_energy_root"
        )

    m2, m3 = s.interior[0].mass, s.right_lead.mass
    if m3 == m2:
        raise UnsupportedConfiguration("m3 equals m2")
    return v2 * m3 / (m3 - m2)


def equal_time_energy_root(s: Heterostructure) -> float:
    """
    alpha(E) = 1 by root finding for arbitrary lead potentials. The search
    interval is the window where both the slab and the right lead propagate.
    """

    _, v2, v3 = _slab_potentials(s)
    slab = s.interior[0]
    if slab.mass > 0:
        raise UnsupportedConfiguration("root search implemented for negative mass")

    lo, hi = v3, v2
    if not lo < hi:
        raise DomainError("no energy window with propagating slab and lead")

    span = hi - lo
    a = lo + 1e-12 * span
    b = hi - 1e-12 * span

    def g(energy: float) -> float:
        return reference_times(energy, s)[2] - 1

    return float(brentq(g, a, b, xtol=1e-15))


def traversal_vs_bias(
    energy: float,
    s: Heterostructure,
    voltages: Iterable[float],
    bias: BiasModel,
) -> list[TraversalReport]:
    """
    Traversal times at a fixed energy over a bias sweep. Every time uses the
    biased layer parameters.
    """

    res = []
    for v in voltages:
        biased = apply_bias(s, bias.at(float(v)))
        res.append(traversal_report(energy, biased))
    logging.debug(f"Traversal vs bias finished; E={energy} eV; {len(res)} points")
    return res


def crossing_bias(
    energy: float,
    s: Heterostructure,
    bias: BiasModel,
    v_min: float,
    v_max: float,
) -> float:
    """Bias in [v_min, v_max] where alpha = 1, i.e. tau = tau_no_slab."""

    def g(v: float) -> float:
        return reference_times(energy, apply_bias(s, bias.at(v)))[2] - 1

    return float(brentq(g, v_min, v_max, xtol=1e-14))

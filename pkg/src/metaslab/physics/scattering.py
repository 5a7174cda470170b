"""
Stationary scattering through a layer stack.

Two routes to the transmission coefficient are provided: the closed form for
a single slab between two leads and a transfer matrix engine for any number
of interior layers. The engine works in the amplitude basis (A, B) of each
region. At every interface psi and (1/m) dpsi/dz are continuous, which is
what the matching matrices below express.

Amplitude convention: the plane waves of each region are referenced to its
left edge, i.e. psi = A exp(ik(z - z_l)) + B exp(-ik(z - z_l)). The left lead
uses z_l = 0 and the right lead the last interface. A region at its critical
energy (k = 0) holds the linear solution psi = A + B (z - z_l).
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.signal import find_peaks

from metaslab.errors import DomainError, NumericalRangeError

from .kinematics import Regime, Wavenumber, wavenumber, wavenumber_array
from .quantities import constants

if TYPE_CHECKING:
    from .structure import Heterostructure, Layer

# Largest |Im(k)| * thickness accepted in one layer.
GROWTH_LIMIT = 200.0


@dataclass(frozen=True)
class ScatteringSolution:
    energy: float
    # (A, B) per region: left lead, interior layers, right lead.
    amplitudes: tuple[tuple[complex, complex], ...]
    wavenumbers: tuple[Wavenumber, ...]
    transmission: float
    reflection: float


def _check_leads(s: Heterostructure) -> None:
    # The flux normalization of the transmission assumes positive lead masses.
    if s.left_lead.mass <= 0 or s.right_lead.mass <= 0:
        raise DomainError("leads with negative effective mass are not supported")


def _propagating_leads(energy: float, s: Heterostructure) -> tuple[complex, complex]:
    k_l = wavenumber(energy, s.left_lead)
    k_r = wavenumber(energy, s.right_lead)
    if not (k_l.is_propagating and k_r.is_propagating):
        raise DomainError(
            f"no propagating state in the leads at E={energy} eV "
            f"(left {k_l.regime.value}, right {k_r.regime.value})"
        )
    return k_l.value, k_r.value


def transmission_closed_form(energy: float, s: Heterostructure) -> float:
    """
    Transmission of a single slab from the analytic three region solution.
    An evanescent slab is handled by the hyperbolic continuation of cos and
    sin, which complex arithmetic gives for free.
    """

    if not s.is_single_slab:
        raise DomainError("closed form requires exactly one interior layer")

    _check_leads(s)
    k1, k3 = _propagating_leads(energy, s)

    slab = s.interior[0]
    k2 = wavenumber(energy, slab)
    if k2.regime is Regime.CRITICAL:
        raise DomainError(
            f"slab is critical at E={energy} eV; use solve_n_layer for the k2 -> 0 "
            "limit"
        )

    m1, m2, m3 = s.left_lead.mass, slab.mass, s.right_lead.mass
    d = slab.thickness

    ratio = k3 * m1 / (m3 * k1)
    cos2 = cmath.cos(k2.value * d) ** 2
    sin2 = cmath.sin(k2.value * d) ** 2
    mix = k3 * m2 / (m3 * k2.value) + k2.value * m1 / (m2 * k1)

    t = 4 * ratio / (cos2 * (1 + ratio) ** 2 + sin2 * mix**2)
    return float(t.real)


def _matching(k: np.ndarray, mass: float, critical: np.ndarray) -> np.ndarray:
    """Maps region amplitudes at the region origin onto (psi, psi'/m)."""

    w = np.empty(k.shape + (2, 2), dtype=complex)
    w[..., 0, 0] = 1
    w[..., 0, 1] = 1
    w[..., 1, 0] = 1j * k / mass
    w[..., 1, 1] = -1j * k / mass
    w[critical] = np.array([[1, 0], [0, 1 / mass]])
    return w


def _matching_inverse(k: np.ndarray, mass: float, critical: np.ndarray) -> np.ndarray:
    k_safe = np.where(critical, 1.0, k)
    w = np.empty(k.shape + (2, 2), dtype=complex)
    w[..., 0, 0] = 0.5
    w[..., 1, 0] = 0.5
    w[..., 0, 1] = mass / (2j * k_safe)
    w[..., 1, 1] = -mass / (2j * k_safe)
    w[critical] = np.array([[1, 0], [0, mass]])
    return w


def _propagator_inverse(
    k: np.ndarray, thickness: float, critical: np.ndarray
) -> np.ndarray:
    """Maps amplitudes referenced to the right edge back to the left edge."""

    p = np.zeros(k.shape + (2, 2), dtype=complex)
    p[..., 0, 0] = np.exp(-1j * k * thickness)
    p[..., 1, 1] = np.exp(1j * k * thickness)
    p[critical] = np.array([[1, -thickness], [0, 1]])
    return p


def _solve_batch(
    energies: np.ndarray, s: Heterostructure
) -> tuple[np.ndarray, list[np.ndarray]]:
    """
    Amplitudes for energies with propagating leads. Returns an array of shape
    (n_energies, n_regions, 2) normalized to A = 1 in the left lead, together
    with the wavenumbers per region.
    """

    layers: tuple[Layer, ...] = s.layers
    ks = [wavenumber_array(energies, layer) for layer in layers]
    criticals = [k == 0 for k in ks]

    for layer, k in zip(s.interior, ks[1:-1]):
        growth = np.abs(k.imag) * layer.thickness
        if np.any(growth > GROWTH_LIMIT):
            raise NumericalRangeError(
                f"evanescent growth {growth.max():.1f} exceeds {GROWTH_LIMIT} in a "
                f"layer of {layer.thickness} nm"
            )

    n_regions = len(layers)
    amps = np.zeros((energies.size, n_regions, 2), dtype=complex)

    # Pure outgoing wave in the right lead, then back through the stack.
    amps[:, -1, 0] = 1
    for j in range(n_regions - 2, -1, -1):
        w_right = _matching(ks[j + 1], layers[j + 1].mass, criticals[j + 1])
        w_inv = _matching_inverse(ks[j], layers[j].mass, criticals[j])
        m = w_inv @ w_right
        if j > 0:
            m = _propagator_inverse(ks[j], layers[j].thickness, criticals[j]) @ m
        amps[:, j, :] = np.einsum("nij,nj->ni", m, amps[:, j + 1, :])

    if not np.all(np.isfinite(amps)):
        raise NumericalRangeError("transfer matrix amplitudes overflowed")

    amps /= amps[:, 0, 0][:, None, None]
    return amps, ks


def _flux_ratio(k_l: np.ndarray, k_r: np.ndarray, s: Heterostructure) -> np.ndarray:
    return (k_r.real / s.right_lead.mass) / (k_l.real / s.left_lead.mass)


def solve_n_layer(energy: float, s: Heterostructure) -> ScatteringSolution:
    """Solves the scattering problem for an incident wave of unit amplitude."""

    _check_leads(s)
    _propagating_leads(energy, s)

    amps, ks = _solve_batch(np.array([energy], dtype=float), s)
    a = amps[0]

    t = float(_flux_ratio(ks[0], ks[-1], s)[0] * abs(a[-1, 0]) ** 2)
    r = float(abs(a[0, 1]) ** 2)

    return ScatteringSolution(
        energy=energy,
        amplitudes=tuple((complex(p[0]), complex(p[1])) for p in a),
        wavenumbers=tuple(wavenumber(energy, layer) for layer in s.layers),
        transmission=t,
        reflection=r,
    )


def transmission_spectrum(energies, s: Heterostructure) -> np.ndarray:
    """
    Transmission over an energy grid from the transfer matrix engine.
    Energies without a propagating state in both leads give T = 0.
    """

    _check_leads(s)
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    t = np.zeros(energies.shape)

    k_l = wavenumber_array(energies, s.left_lead)
    k_r = wavenumber_array(energies, s.right_lead)
    open_ = (k_l.real != 0) & (k_r.real != 0)
    if not np.any(open_):
        return t

    amps, ks = _solve_batch(energies[open_], s)
    t[open_] = _flux_ratio(ks[0], ks[-1], s) * np.abs(amps[:, -1, 0]) ** 2
    return t


def _region_origin(s: Heterostructure, index: int) -> float:
    interfaces = s.interfaces()
    if index == 0:
        return 0.0
    return float(interfaces[index - 1])


def wavefunction_in_region(sol: ScatteringSolution, s: Heterostructure, index: int, z):
    """
    Evaluates psi and dpsi/dz of region `index` (0 = left lead) at z, which
    may be a scalar or an array. Points outside the region are extrapolated.
    """

    a, b = sol.amplitudes[index]
    k = sol.wavenumbers[index].value
    x = np.asarray(z, dtype=float) - _region_origin(s, index)

    if k == 0:
        psi = a + b * x
        dpsi = b * np.ones_like(x, dtype=complex)
        return psi, dpsi

    forward = a * np.exp(1j * k * x)
    backward = b * np.exp(-1j * k * x)
    return forward + backward, 1j * k * (forward - backward)


def wavefunction_at(
    sol: ScatteringSolution, s: Heterostructure, z: float
) -> tuple[complex, complex]:
    """psi and dpsi/dz at z. An interface point belongs to the region on its right."""

    index = int(np.searchsorted(s.interfaces(), z, side="right"))
    psi, dpsi = wavefunction_in_region(sol, s, index, z)
    return complex(psi), complex(dpsi)


def resonance_energies(s: Heterostructure, e_max: float | None = None) -> list[float]:
    """
    Energies where the slab holds an integer number of half wavelengths,
    |k2| d = n pi, and both leads propagate. For symmetric leads T = 1 there.
    A positive mass slab has an unbounded series, so e_max is required then.
    """

    if not s.is_single_slab:
        raise DomainError("resonance energies are defined for a single slab")

    slab = s.interior[0]
    c = constants().hbar_sq_over_2m0
    floor = max(s.left_lead.potential, s.right_lead.potential)

    if slab.mass > 0 and e_max is None:
        raise DomainError("e_max required for a positive mass slab")

    res = []
    n = 1
    while True:
        shift = c * (n * np.pi / slab.thickness) ** 2 / abs(slab.mass)
        energy = slab.potential - shift if slab.mass < 0 else slab.potential + shift
        if energy <= floor or (e_max is not None and energy > e_max):
            break
        res.append(float(energy))
        n += 1

    logging.debug(f"Found {len(res)} resonances for slab of {slab.thickness} nm")
    return res


def count_local_maxima(values) -> int:
    """
    Number of local maxima of a sampled curve. A flat top counts once, as
    long as it is bounded by strictly lower samples on both sides.
    """

    peaks, _ = find_peaks(np.asarray(values, dtype=float))
    return len(peaks)

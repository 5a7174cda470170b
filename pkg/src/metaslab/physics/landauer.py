"""
Current-voltage characteristic from the bias dependent transmission.

The default is the Tsu-Esaki form for planar structures, where the
transverse electron gas of the emitter enters through the logarithmic supply
function

    J(V) = C int T(E, V) ln[(1 + e^((E_F - E)/kT)) / (1 + e^((E_F - E - eV)/kT))] dE

with C = e m kT / (2 pi^2 hbar^3). The one dimensional two terminal form
J = (2e/h) int T (f_L - f_R) dE is available for comparison.
"""

from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import simpson
from scipy.special import expit

from metaslab.utils import GenericConf

from .quantities import constants
from .scattering import transmission_spectrum
from .structure import apply_bias

if TYPE_CHECKING:
    from .structure import BiasModel, Heterostructure

# Margin above the band edges in units of kT for the default energy grid.
THERMAL_TAIL = 10

# Smallest current drop, relative to the largest current, counted as NDC.
NDC_MIN_DROP = 1e-3


class LandauerVariant(Enum):
    TSU_ESAKI = "tsu_esaki"
    ONE_DIMENSIONAL = "one_dimensional"


@dataclass
class LandauerConfig(GenericConf):
    temperature: float = 300.0
    fermi_level: float = 0.0
    e_min: float = 0.0
    # None: V2 + 10 kT + e |V|max
    e_max: float | None = None
    n_points: int = 4000
    # None: mass of the left lead
    supply_mass: float | None = None
    variant: str = LandauerVariant.TSU_ESAKI.value

    def validate(self) -> None:
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive: {self.temperature}")
        if self.n_points < 100:
            raise ValueError(f"n_points must be at least 100: {self.n_points}")
        if self.e_min < 0:
            raise ValueError(f"e_min must not be negative: {self.e_min}")
        if self.e_max is not None and self.e_max <= self.e_min:
            raise ValueError(f"e_max {self.e_max} must exceed e_min {self.e_min}")
        LandauerVariant(self.variant)


@dataclass(frozen=True)
class IvPoint:
    voltage: float
    # A/m^2 for the Tsu-Esaki form, A for the one dimensional form.
    current_density: float
    # current_density / C, in eV.
    normalized: float


def energy_grid(s: Heterostructure, cfg: LandauerConfig, v_max: float) -> np.ndarray:
    if cfg.e_max is not None:
        e_max = cfg.e_max
    else:
        barrier = max(layer.potential for layer in s.interior)
        kt = constants().thermal_energy(cfg.temperature)
        e_max = barrier + THERMAL_TAIL * kt + abs(v_max)
    return np.linspace(cfg.e_min, e_max, cfg.n_points)


def _prefactor(s: Heterostructure, cfg: LandauerConfig) -> float:
    """C in A/m^2 per eV of the integral (Tsu-Esaki), or 2e/h in A/eV (1D)."""

    c = constants()
    if LandauerVariant(cfg.variant) is LandauerVariant.ONE_DIMENSIONAL:
        return 2 * c.e_charge**2 / (2 * math.pi * c.hbar_si)

    mass = cfg.supply_mass if cfg.supply_mass is not None else s.left_lead.mass
    kt_j = c.kB * cfg.temperature * c.e_charge
    return (
        c.e_charge
        * mass
        * c.m0_si
        * kt_j
        / (2 * math.pi**2 * c.hbar_si**3)
        * c.e_charge
    )


def _supply(energies: np.ndarray, voltage: float, cfg: LandauerConfig) -> np.ndarray:
    kt = constants().thermal_energy(cfg.temperature)
    mu = cfg.fermi_level

    if LandauerVariant(cfg.variant) is LandauerVariant.ONE_DIMENSIONAL:
        return expit((mu - energies) / kt) - expit((mu - energies - voltage) / kt)

    return np.logaddexp(0.0, (mu - energies) / kt) - np.logaddexp(
        0.0, (mu - energies - voltage) / kt
    )


def current(
    voltage: float,
    s: Heterostructure,
    bias: BiasModel,
    cfg: LandauerConfig,
    v_max: float | None = None,
) -> IvPoint:
    """
    Current at one bias. The transmission is taken from the transfer matrix
    engine on the biased structure; v_max fixes the energy grid for sweeps.
    """

    energies = energy_grid(s, cfg, abs(voltage) if v_max is None else v_max)
    biased = apply_bias(s, bias.at(voltage))

    integrand = transmission_spectrum(energies, biased) * _supply(
        energies, voltage, cfg
    )
    normalized = float(simpson(integrand, x=energies))

    return IvPoint(
        voltage=voltage,
        current_density=_prefactor(s, cfg) * normalized,
        normalized=normalized,
    )


def iv_sweep(
    v_min: float,
    v_max: float,
    n_points: int,
    s: Heterostructure,
    bias: BiasModel,
    cfg: LandauerConfig,
    threads: int = 1,
    stopped: threading.Event | None = None,
) -> list[IvPoint]:
    """
    Currents on a uniform bias grid. Bias points run in a thread pool; the
    result is in grid order for any number of threads. Points which have not
    started when stopped is set are left out.
    """

    if n_points < 2:
        raise ValueError(f"n_points must be at least 2: {n_points}")
    cfg.validate()

    voltages = np.linspace(v_min, v_max, n_points)
    v_abs = float(max(abs(v_min), abs(v_max)))

    def f(v: float) -> IvPoint | None:
        if stopped is not None and stopped.is_set():
            return None
        return current(float(v), s, bias, cfg, v_max=v_abs)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        res = [p for p in pool.map(f, voltages) if p is not None]

    logging.debug(f"IV sweep finished; {len(res)} points in [{v_min}, {v_max}] V")
    return res


def ndc_regions(
    voltages, currents, min_drop: float = NDC_MIN_DROP
) -> list[tuple[int, int]]:
    """
    Maximal index intervals [start, end] on which the 3-point slope dI/dV is
    negative. Regions whose current drop is below min_drop times the largest
    |I| of the curve are numerical ripple and are left out.
    """

    v = np.asarray(voltages, dtype=float)
    i = np.asarray(currents, dtype=float)
    if v.size < 3:
        return []

    negative = np.gradient(i, v) < 0
    scale = float(np.abs(i).max())

    regions = []
    start = None
    for idx, neg in enumerate(np.append(negative, False)):
        if neg and start is None:
            start = idx
        elif not neg and start is not None:
            end = idx - 1
            drop = i[max(start - 1, 0) : end + 1].max() - i[start : end + 2].min()
            if drop > min_drop * scale:
                regions.append((start, end))
            start = None
    return regions


def peak_to_valley(voltages, currents) -> list[float]:
    """
    Peak to valley ratio per NDC region: the largest current right before or
    inside the region over the smallest current at its end. A vanishing
    valley yields inf.
    """

    i = np.asarray(currents, dtype=float)
    res = []
    for start, end in ndc_regions(voltages, currents):
        peak = float(i[max(start - 1, 0) : end + 1].max())
        valley = float(i[start : end + 2].min())
        res.append(math.inf if valley <= 0 else peak / valley)
    return res

"""
Brute force verifier for the transmission coefficient.

The first order system d/dz (psi, phi) = (phi, -q^2 psi), q^2 = 2m(E-V)/hbar^2,
is integrated with fixed step RK4 from a pure outgoing wave in the right lead
back to the left lead. At each interface psi is continuous and phi jumps by
the mass ratio. The state in the left lead is then split into incident and
reflected waves. Nothing here shares code with the transfer matrix engine.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np

from metaslab.errors import DomainError, NumericalRangeError

from .kinematics import wavenumber
from .quantities import constants

if TYPE_CHECKING:
    from .structure import Heterostructure, Layer

# Minimum number of RK4 steps per layer.
MIN_STEPS_PER_LAYER = 16


@dataclass(frozen=True)
class OdeState:
    psi: complex
    phi: complex

    def __post_init__(self):
        if not (_is_finite(self.psi) and _is_finite(self.phi)):
            raise NumericalRangeError("ode state is not finite")


def _is_finite(value: complex) -> bool:
    return math.isfinite(value.real) and math.isfinite(value.imag)


@dataclass
class OracleResult:
    energy: float
    step: float
    transmission: float
    reflection: float
    # State on both sides of each interface, keyed by (z, side).
    interface_states: dict[tuple[float, str], OdeState] = field(default_factory=dict)
    # Full trajectory (z, state), right to left, only if requested.
    trajectory: list[tuple[float, OdeState]] = field(default_factory=list)


def rk4_step(
    f: Callable[[float, np.ndarray], np.ndarray], z: float, y: np.ndarray, h: float
) -> np.ndarray:
    """One classic Runge-Kutta step of size h (negative h integrates backward)."""

    k1 = f(z, y)
    k2 = f(z + h / 2, y + h / 2 * k1)
    k3 = f(z + h / 2, y + h / 2 * k2)
    k4 = f(z + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _rhs(energy: float, layer: Layer) -> Callable[[float, np.ndarray], np.ndarray]:
    q2 = layer.mass * (energy - layer.potential) / constants().hbar_sq_over_2m0

    def f(z: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], -q2 * y[0]], dtype=complex)

    return f


def _step_matrix(f: Callable[[float, np.ndarray], np.ndarray], h: float) -> np.ndarray:
    """
    The coefficients are constant inside a layer, so one RK4 step is a fixed
    linear map. It is read off by stepping the two unit states.
    """

    e0 = rk4_step(f, 0.0, np.array([1, 0], dtype=complex), h)
    e1 = rk4_step(f, 0.0, np.array([0, 1], dtype=complex), h)
    return np.column_stack([e0, e1])


def integrate_through(
    energy: float, s: Heterostructure, step: float, keep_trajectory: bool = False
) -> OracleResult:
    """
    Transmission by backward RK4 integration with a nominal step in nm. Each
    layer is divided into the smallest number of equal steps not larger than
    `step`.
    """

    if not step > 0:
        raise DomainError(f"step must be positive: {step}")

    thinnest = min(layer.thickness for layer in s.interior)
    if step > thinnest / MIN_STEPS_PER_LAYER:
        raise NumericalRangeError(
            f"step {step} nm too coarse for a {thinnest} nm layer; at most "
            f"{thinnest / MIN_STEPS_PER_LAYER} nm"
        )

    k_l = wavenumber(energy, s.left_lead)
    k_r = wavenumber(energy, s.right_lead)
    if not (k_l.is_propagating and k_r.is_propagating):
        raise DomainError(f"leads not propagating at E={energy} eV")
    k1, k3 = k_l.value, k_r.value

    interfaces = s.interfaces()
    z = float(interfaces[-1])

    # Outgoing wave exp(i k3 z) in the right lead.
    y = np.array([np.exp(1j * k3 * z), 1j * k3 * np.exp(1j * k3 * z)], dtype=complex)
    res = OracleResult(energy=energy, step=step, transmission=0.0, reflection=0.0)
    res.interface_states[(z, "right")] = OdeState(complex(y[0]), complex(y[1]))

    mass_right = s.right_lead.mass
    for index in range(len(s.interior) - 1, -1, -1):
        layer = s.interior[index]

        # psi continuous, phi scaled by the mass ratio.
        y = np.array([y[0], layer.mass / mass_right * y[1]], dtype=complex)
        res.interface_states[(z, "left")] = OdeState(complex(y[0]), complex(y[1]))

        n_steps = math.ceil(layer.thickness / step - 1e-9)
        h = -layer.thickness / n_steps
        f = _rhs(energy, layer)

        if keep_trajectory:
            for i in range(n_steps):
                y = rk4_step(f, z + i * h, y, h)
                res.trajectory.append(
                    (z + (i + 1) * h, OdeState(complex(y[0]), complex(y[1])))
                )
        else:
            y = np.linalg.matrix_power(_step_matrix(f, h), n_steps) @ y

        z = float(interfaces[index])
        res.interface_states[(z, "right")] = OdeState(complex(y[0]), complex(y[1]))
        mass_right = layer.mass

    y = np.array([y[0], s.left_lead.mass / mass_right * y[1]], dtype=complex)
    res.interface_states[(z, "left")] = OdeState(complex(y[0]), complex(y[1]))

    # At z = 0: psi = A + B, phi = i k1 (A - B).
    a = (y[0] + y[1] / (1j * k1)) / 2
    b = (y[0] - y[1] / (1j * k1)) / 2

    flux = (k3.real / s.right_lead.mass) / (k1.real / s.left_lead.mass)
    res.transmission = float(flux / abs(a) ** 2)
    res.reflection = float(abs(b) ** 2 / abs(a) ** 2)

    logging.debug(
        f"Oracle at E={energy} eV with step {step} nm; T={res.transmission}"
    )
    return res


def convergence_order(
    energy: float, s: Heterostructure, steps: list[float], reference: float
) -> list[float]:
    """
    Observed orders log2(err_i / err_{i+1}) of the oracle transmission over a
    step halving sequence against a reference value.
    """

    errors = [
        abs(integrate_through(energy, s, h).transmission - reference) for h in steps
    ]
    return [
        math.log(errors[i] / errors[i + 1]) / math.log(steps[i] / steps[i + 1])
        for i in range(len(errors) - 1)
    ]

import numpy as np
import pytest

from metaslab.errors import DomainError
from metaslab.physics.kinematics import (
    Regime,
    probability_current,
    wavenumber,
    wavenumber_array,
)
from metaslab.physics.quantities import constants
from metaslab.physics.structure import Layer

LEAD = Layer(0.4, 0.0)
SLAB = Layer(-0.02, 0.5, 5.0)


def test_lead_wavenumber():
    k = wavenumber(0.2, LEAD)
    assert k.regime is Regime.PROPAGATING
    assert k.value.real == pytest.approx(1.449051, abs=1e-6)
    assert k.value.imag == 0


def test_negative_mass_branch():
    # Below the barrier top, yet propagating with the negative root.
    k = wavenumber(0.2, SLAB)
    assert k.regime is Regime.PROPAGATING
    assert k.value.real == pytest.approx(-0.3968388, abs=1e-6)
    assert k.value.imag == 0


def test_critical_and_evanescent():
    k = wavenumber(0.5, SLAB)
    assert k.regime is Regime.CRITICAL
    assert k.value == 0

    k = wavenumber(0.7, SLAB)
    assert k.regime is Regime.EVANESCENT
    assert k.value.real == 0
    assert k.value.imag > 0


@pytest.mark.parametrize("energy", [0.01, 0.2, 0.49, 0.51, 0.9])
def test_regimes_by_mass_sign(energy):
    negative = wavenumber(energy, Layer(-0.02, 0.5))
    positive = wavenumber(energy, Layer(0.02, 0.5))

    if energy < 0.5:
        assert negative.is_propagating
        assert positive.regime is Regime.EVANESCENT
    else:
        assert negative.regime is Regime.EVANESCENT
        assert positive.is_propagating


@pytest.mark.parametrize("layer", [LEAD, SLAB, Layer(1.0, 0.3), Layer(-0.5, -0.1)])
def test_dispersion_identity(layer):
    c = constants()
    for energy in (-0.3, 0.05, 0.2, 0.45, 0.8):
        if energy == layer.potential:
            continue
        k = wavenumber(energy, layer).value
        lhs = abs(k) ** 2 * c.hbar_sq_over_2m0 / abs(layer.mass)
        assert lhs == pytest.approx(abs(energy - layer.potential), rel=1e-12)


def test_current_positive_for_both_mass_signs():
    for layer, energy in ((LEAD, 0.2), (SLAB, 0.2), (Layer(-0.3, 1.0), 0.4)):
        k = wavenumber(energy, layer)
        assert k.is_propagating
        assert probability_current(k.value, layer.mass) > 0

    # No current in an evanescent wave.
    k = wavenumber(0.7, SLAB)
    assert probability_current(k.value, SLAB.mass) == 0


def test_current_scales_with_amplitude():
    k = wavenumber(0.2, LEAD).value
    j1 = probability_current(k, LEAD.mass)
    j2 = probability_current(k, LEAD.mass, amplitude=2j)
    assert j2 == pytest.approx(4 * j1, rel=1e-14)


def test_wavenumber_array_matches_scalar():
    energies = np.array([-0.1, 0.0, 0.2, 0.5, 0.7])
    for layer in (LEAD, SLAB):
        k = wavenumber_array(energies, layer)
        expected = [wavenumber(float(e), layer).value for e in energies]
        assert k == pytest.approx(np.array(expected), abs=1e-15)

    assert wavenumber_array(energies, SLAB)[3] == 0


def test_wavenumber_continuous_near_top():
    below = wavenumber(0.5 - 1e-9, SLAB).value
    above = wavenumber(0.5 + 1e-9, SLAB).value
    assert abs(below - above) < 1e-3


def test_energy_not_finite():
    with pytest.raises(DomainError):
        wavenumber(float("nan"), LEAD)

    with pytest.raises(DomainError):
        wavenumber(float("inf"), LEAD)

import numpy as np
import pytest

from metaslab.errors import DomainError, NumericalRangeError
from metaslab.physics.oracle import (
    OdeState,
    convergence_order,
    integrate_through,
    rk4_step,
)
from metaslab.physics.scattering import (
    resonance_energies,
    solve_n_layer,
    transmission_closed_form,
)
from metaslab.physics.structure import (
    BiasKind,
    BiasModel,
    apply_bias,
    homogeneous_structure,
    paper_structure,
)

STEP = 1e-3


def test_rk4_step_taylor():
    y = rk4_step(lambda z, y: y, 0.0, np.array([1.0]), 0.1)
    assert y[0] == pytest.approx(1 + 0.1 + 0.1**2 / 2 + 0.1**3 / 6 + 0.1**4 / 24)


def test_identical_media():
    s = homogeneous_structure(5.0, 0.4, 0.0)
    res = integrate_through(0.2, s, STEP)

    assert res.transmission == pytest.approx(1.0, abs=1e-8)
    assert res.reflection == pytest.approx(0.0, abs=1e-8)


def test_resonance():
    s = paper_structure(15.0)
    energy = resonance_energies(s)[0]
    assert energy == pytest.approx(0.416437, abs=1e-6)

    res = integrate_through(energy, s, STEP)
    assert res.transmission == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("d", [5.0, 15.0, 30.0, 34.0])
def test_oracle_equals_closed_form(d):
    rng = np.random.default_rng(int(d))
    s = paper_structure(d)

    for energy in rng.uniform(0.01, 0.49, 200):
        oracle = integrate_through(float(energy), s, STEP)
        closed = transmission_closed_form(float(energy), s)
        assert abs(oracle.transmission - closed) <= 1e-6
        assert oracle.transmission + oracle.reflection == pytest.approx(1.0, abs=1e-6)


def test_transmission_d5_at_0_2_ev():
    s = paper_structure(5.0)

    closed = transmission_closed_form(0.2, s)
    assert closed == pytest.approx(0.145405527025, abs=1e-9)
    assert solve_n_layer(0.2, s).transmission == pytest.approx(closed, abs=1e-12)
    assert abs(integrate_through(0.2, s, STEP).transmission - closed) <= 1e-6


def test_oracle_equals_engine_stepped_bias():
    s = apply_bias(paper_structure(5.0), BiasModel(BiasKind.STEPPED, 0.1, n_steps=8))

    for energy in (0.05, 0.2, 0.35):
        oracle = integrate_through(energy, s, STEP)
        engine = solve_n_layer(energy, s)
        assert abs(oracle.transmission - engine.transmission) <= 1e-6


def test_fourth_order_convergence():
    s = paper_structure(5.0)
    reference = transmission_closed_form(0.2, s)

    orders = convergence_order(0.2, s, [5 / 16, 5 / 32, 5 / 64], reference)

    assert len(orders) == 2
    for order in orders:
        assert 3.5 <= order <= 4.5


def test_interface_states():
    s = paper_structure(5.0)
    res = integrate_through(0.2, s, 0.01)

    for z, (m_left, m_right) in ((0.0, (0.4, -0.02)), (5.0, (-0.02, 0.4))):
        left = res.interface_states[(z, "left")]
        right = res.interface_states[(z, "right")]
        assert left.psi == right.psi
        assert left.phi == pytest.approx(m_left / m_right * right.phi)


def test_trajectory():
    s = paper_structure(5.0)

    kept = integrate_through(0.2, s, 0.05, keep_trajectory=True)
    plain = integrate_through(0.2, s, 0.05)

    assert len(kept.trajectory) == 100
    assert kept.trajectory[-1][0] == pytest.approx(0.0, abs=1e-12)
    assert kept.transmission == pytest.approx(plain.transmission, rel=1e-10)
    assert plain.trajectory == []


def test_resolution_guard():
    s = paper_structure(5.0)

    with pytest.raises(NumericalRangeError):
        integrate_through(0.2, s, 1.0)

    with pytest.raises(DomainError):
        integrate_through(0.2, s, 0.0)

    with pytest.raises(DomainError):
        integrate_through(-0.1, s, STEP)


def test_ode_state_finite():
    with pytest.raises(NumericalRangeError):
        OdeState(complex(float("nan"), 0.0), 0j)

    assert OdeState(1 + 1j, 0j).psi == 1 + 1j

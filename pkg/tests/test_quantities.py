from dataclasses import FrozenInstanceError

import pytest

from metaslab.physics.quantities import (
    E_CHARGE,
    HBAR_SI,
    KB_SI,
    M0_SI,
    constant_set_hash,
    constants,
)


def test_constant_values():
    c = constants()

    assert c.hbar_sq_over_2m0 == pytest.approx(0.0380998, abs=1e-7)
    assert c.hbar == pytest.approx(0.6582120, abs=1e-7)
    assert c.thermal_energy(300) == pytest.approx(0.0258520, abs=1e-7)


def test_constants_consistent():
    c = constants()

    assert c.check()
    assert c.hbar**2 / (2 * c.m0) == pytest.approx(c.hbar_sq_over_2m0, rel=1e-9)

    # The literals in eV, nm, fs follow from the SI values.
    assert c.hbar == pytest.approx(HBAR_SI / E_CHARGE * 1e15, rel=1e-12)
    assert c.m0 == pytest.approx(M0_SI / E_CHARGE * 1e12, rel=1e-12)
    assert c.kB == pytest.approx(KB_SI / E_CHARGE, rel=1e-12)


def test_constants_positive():
    c = constants()
    for value in (c.hbar_sq_over_2m0, c.hbar, c.kB, c.m0, c.e_charge, c.hbar_si):
        assert value > 0


def test_constants_single_instance():
    assert constants() is constants()

    with pytest.raises(FrozenInstanceError):
        constants().hbar = 1.0  # type: ignore


def test_constant_set_hash():
    h = constant_set_hash()

    assert len(h) == 16
    assert h == constant_set_hash()
    int(h, 16)

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from metaslab.physics.landauer import (
    LandauerConfig,
    LandauerVariant,
    current,
    energy_grid,
    iv_sweep,
    ndc_regions,
    peak_to_valley,
)
from metaslab.physics.quantities import constants
from metaslab.physics.scattering import solve_n_layer
from metaslab.physics.structure import (
    BiasKind,
    BiasModel,
    apply_bias,
    paper_structure,
)

MIDPOINT = BiasModel(BiasKind.MIDPOINT)


def sweep(d: float, n_points: int = 121, cfg: LandauerConfig | None = None):
    points = iv_sweep(
        0.0, 1.2, n_points, paper_structure(d), MIDPOINT, cfg or LandauerConfig()
    )
    voltages = np.array([p.voltage for p in points])
    currents = np.array([p.normalized for p in points])
    return voltages, currents


def test_zero_bias_current():
    s = paper_structure(5.0)

    for variant in LandauerVariant:
        cfg = LandauerConfig(variant=variant.value)
        p = current(0.0, s, MIDPOINT, cfg)
        assert p.normalized == 0.0
        assert p.current_density == 0.0


def test_zero_range_sweep():
    points = iv_sweep(0.0, 0.0, 5, paper_structure(5.0), MIDPOINT, LandauerConfig())
    assert [p.normalized for p in points] == [0.0] * 5


def test_sweep_order_and_threads():
    s = paper_structure(15.0)
    cfg = LandauerConfig(n_points=1000)

    single = iv_sweep(0.0, 1.0, 11, s, MIDPOINT, cfg, threads=1)
    pooled = iv_sweep(0.0, 1.0, 11, s, MIDPOINT, cfg, threads=4)

    assert single == pooled
    voltages = [p.voltage for p in single]
    assert voltages == sorted(voltages)


def test_forward_current_positive():
    s = paper_structure(5.0)
    for variant in LandauerVariant:
        cfg = LandauerConfig(variant=variant.value)
        p = current(0.5, s, MIDPOINT, cfg)
        assert p.normalized > 0
        assert p.current_density > 0


def test_ndc_d5():
    points = iv_sweep(0.0, 1.6, 161, paper_structure(5.0), MIDPOINT, LandauerConfig())
    voltages = np.array([p.voltage for p in points])
    currents = np.array([p.normalized for p in points])

    regions = ndc_regions(voltages, currents)
    assert len(regions) == 1

    # The peak lies below 2 V2 / e and the current falls behind it.
    peak = int(np.argmax(currents))
    assert 0.85 <= voltages[peak] <= 0.95
    assert regions[0][0] <= peak + 1

    ratios = peak_to_valley(voltages, currents)
    assert len(ratios) == 1
    assert ratios[0] > 10
    assert ratios[0] == pytest.approx(77.8, rel=0.05)


def test_no_ndc_below_peak_d5():
    points = iv_sweep(0.0, 0.6, 61, paper_structure(5.0), MIDPOINT, LandauerConfig())
    voltages = np.array([p.voltage for p in points])
    currents = np.array([p.normalized for p in points])

    assert ndc_regions(voltages, currents) == []
    assert int(np.argmax(currents)) == len(currents) - 1


def test_low_bias_concentration():
    voltages, currents = sweep(5.0)
    assert currents[voltages < 1.0].max() >= 0.9 * currents.max()


def test_ndc_d30():
    voltages, currents = sweep(30.0)
    assert len(ndc_regions(voltages, currents)) >= 2


def test_ndc_count_grows_with_thickness():
    counts = []
    for d in (5.0, 15.0, 30.0, 34.0):
        voltages, currents = sweep(d)
        counts.append(len(ndc_regions(voltages, currents)))

    assert counts == [1, 3, 3, 4]
    assert counts == sorted(counts)


def _staircase_integrand(energy: float, voltage: float, s, kt: float) -> float:
    # No propagating state in the left lead at its band edge.
    if energy <= 0:
        return 0.0
    supply = math.log1p(math.exp(-energy / kt)) - math.log1p(
        math.exp(-(energy + voltage) / kt)
    )
    return solve_n_layer(energy, s).transmission * supply


def test_stepped_bias_current():
    s = paper_structure(5.0)
    stepped = BiasModel(BiasKind.STEPPED, n_steps=8)
    cfg = LandauerConfig()
    kt = constants().thermal_energy(cfg.temperature)

    assert current(0.0, s, stepped, cfg).normalized == 0.0

    # Trapezoid sum of T f over single energy solutions of the staircase.
    for v in (0.3, 0.6, 0.9):
        energies = energy_grid(s, cfg, v)
        biased = apply_bias(s, stepped.at(v))
        integrand = [_staircase_integrand(float(e), v, biased, kt) for e in energies]
        expected = float(trapezoid(integrand, x=energies))

        p = current(v, s, stepped, cfg)
        assert p.normalized > 0
        assert p.normalized == pytest.approx(expected, rel=1e-3)


def test_energy_grid_convergence():
    s = paper_structure(5.0)
    coarse = LandauerConfig(n_points=4000)
    fine = LandauerConfig(n_points=8000)

    for v in (0.2, 0.6, 0.9, 1.1):
        a = current(v, s, MIDPOINT, coarse, v_max=1.2).normalized
        b = current(v, s, MIDPOINT, fine, v_max=1.2).normalized
        assert abs(a - b) < 5e-3 * abs(b)


def test_energy_grid():
    s = paper_structure(5.0)
    cfg = LandauerConfig()
    grid = energy_grid(s, cfg, 1.2)

    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(0.5 + 10 * 0.0258520 + 1.2, abs=1e-6)
    assert grid.size == 4000

    cfg = LandauerConfig(e_min=0.1, e_max=0.8, n_points=200)
    grid = energy_grid(s, cfg, 1.2)
    assert grid[0] == 0.1
    assert grid[-1] == 0.8


def test_ndc_regions_synthetic():
    voltages = np.arange(7, dtype=float)

    currents = [0.0, 1.0, 2.0, 1.0, 0.5, 1.0, 2.0]
    assert ndc_regions(voltages, currents) == [(3, 3)]
    assert peak_to_valley(voltages, currents) == [4.0]

    currents = [0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]
    assert peak_to_valley(voltages, currents) == [math.inf]

    # Ripple far below the current scale is no NDC.
    currents = [0.0, 1.0, 2.0, 3.0, 3.0 - 1e-6, 3.0 - 2e-6, 5.0]
    assert ndc_regions(voltages, currents) == []

    assert ndc_regions([0.0, 1.0], [0.0, 1.0]) == []


@pytest.mark.parametrize(
    "kwargs",
    [
        {"temperature": 0.0},
        {"n_points": 50},
        {"e_min": -0.1},
        {"e_min": 0.5, "e_max": 0.4},
        {"variant": "two_dimensional"},
    ],
)
def test_config_invalid(kwargs):
    with pytest.raises(ValueError):
        LandauerConfig(**kwargs).validate()


def test_sweep_requires_two_points():
    with pytest.raises(ValueError):
        iv_sweep(0.0, 1.0, 1, paper_structure(5.0), MIDPOINT, LandauerConfig())

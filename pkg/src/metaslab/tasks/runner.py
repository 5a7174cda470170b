from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import CancelledError, Future, ThreadPoolExecutor
from typing import TYPE_CHECKING, Callable

import numpy as np

from metaslab import __version__
from metaslab.config import Mode, SweepConfig
from metaslab.errors import DomainError, NumericalRangeError, StructureError
from metaslab.physics.landauer import iv_sweep
from metaslab.physics.oracle import MIN_STEPS_PER_LAYER, integrate_through
from metaslab.physics.quantities import constant_set_hash
from metaslab.physics.scattering import solve_n_layer
from metaslab.physics.structure import apply_bias
from metaslab.physics.traversal import TraversalReport, traversal_report
from metaslab.tasks.models import COLUMNS, SweepResult

if TYPE_CHECKING:
    from metaslab.physics.structure import Heterostructure

# Every VERIFY_STRIDE-th row is checked against the RK4 oracle.
VERIFY_STRIDE = 100
VERIFY_STEP = 1e-3
VERIFY_TOLERANCE = 1e-6

Row = tuple


def _finite(row: Row) -> bool:
    return all(math.isfinite(v) for v in row if isinstance(v, float))


class SweepRunner:
    def __init__(self, config: SweepConfig):
        self.config = config
        self.structure = config.heterostructure()
        self.bias = config.bias_model()

        # stop() may run in a signal handler on the thread which is submitting
        # the points, so it must not wait for run().
        self.stopped = threading.Event()
        self._futures: list[Future] = []

        # I-V sweeps are run as a whole by iv_sweep.
        self._point: Callable[[float], Row] | None = {
            Mode.TRANSMISSION: self._transmission_point,
            Mode.TRAVERSAL: self._traversal_point,
            Mode.TRAVERSAL_BIAS: self._traversal_bias_point,
        }.get(config.mode)

    def _biased(self, voltage: float | None = None) -> Heterostructure:
        b = self.bias if voltage is None else self.bias.at(voltage)
        return apply_bias(self.structure, b)

    def _transmission_point(self, energy: float) -> Row:
        sol = solve_n_layer(energy, self._biased())
        k2 = sol.wavenumbers[1].value
        return energy, sol.transmission, sol.reflection, k2.real, k2.imag

    @staticmethod
    def _time_columns(r: TraversalReport) -> Row:
        return r.tau, r.tau_no_slab, r.tau_no_refl, r.alpha, r.regime.value

    def _traversal_point(self, energy: float) -> Row:
        report = traversal_report(energy, self._biased())
        return energy, *self._time_columns(report)

    def _traversal_bias_point(self, voltage: float) -> Row:
        report = traversal_report(self.config.grid.energy, self._biased(voltage))
        return voltage, *self._time_columns(report)

    def _evaluate(self, x: float) -> Row | None:
        """
        Evaluates one grid point. Points outside the domain of the mode are
        logged and dropped, a NumericalRangeError ends the sweep.
        """

        if self.stopped.is_set() or self._point is None:
            return None

        try:
            row = self._point(x)
        except (DomainError, StructureError) as e:
            logging.warning(f"Dropped grid point {x:.12g}; {e}")
            return None

        if not _finite(row):
            logging.warning(f"Dropped grid point {x:.12g}; non finite result {row}")
            return None
        return row

    def _verify_target(self, row: Row) -> tuple[float, Heterostructure, float | None]:
        """
        Energy and structure whose transmission backs a row, and the
        transmission stated in the row if there is one.
        """

        mode = self.config.mode
        if mode is Mode.TRANSMISSION:
            return row[0], self._biased(), row[1]
        if mode is Mode.TRAVERSAL:
            return row[0], self._biased(), None
        if mode is Mode.TRAVERSAL_BIAS:
            return self.config.grid.energy, self._biased(row[0]), None

        # I-V rows are checked at the barrier top of the biased stack.
        s = self._biased(row[0])
        return max(layer.potential for layer in s.interior), s, None

    def verify(self, rows: list[Row]) -> int:
        """
        Re-runs the RK4 oracle on every VERIFY_STRIDE-th row, at least one.
        Raises NumericalRangeError if a transmission deviates by more than
        VERIFY_TOLERANCE.
        """

        checked = 0
        for row in rows[::VERIFY_STRIDE]:
            energy, s, stated = self._verify_target(row)
            thinnest = min(layer.thickness for layer in s.interior)
            step = min(VERIFY_STEP, thinnest / MIN_STEPS_PER_LAYER)

            try:
                expected = solve_n_layer(energy, s).transmission
                oracle = integrate_through(energy, s, step).transmission
            except DomainError as e:
                logging.warning(f"Verify skipped row {row[0]:.12g}; {e}")
                continue

            if stated is not None:
                expected = stated
            if abs(oracle - expected) > VERIFY_TOLERANCE:
                raise NumericalRangeError(
                    f"verify failed at row {row[0]:.12g}: T={expected}, "
                    f"oracle T={oracle}"
                )
            checked += 1

        logging.info(f"Verified {checked} rows against the RK4 oracle")
        return checked

    def _iv_rows(self, grid: np.ndarray, threads: int) -> list[Row]:
        points = iv_sweep(
            float(grid[0]),
            float(grid[-1]),
            grid.size,
            self.structure,
            self.bias,
            self.config.landauer,
            threads=threads,
            stopped=self.stopped,
        )

        rows: list[Row] = []
        for p in points:
            row = (p.voltage, p.normalized, p.current_density)
            if not _finite(row):
                logging.warning(f"Dropped bias {p.voltage:.12g}; non finite current")
                continue
            rows.append(row)
        return rows

    def _point_rows(self, grid: np.ndarray, threads: int) -> list[Row]:
        rows: list[Row] = []
        futures: list[Future] = []
        self._futures = futures

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for x in grid:
                if self.stopped.is_set():
                    break
                futures.append(pool.submit(self._evaluate, float(x)))

            # Collection in grid order makes the output independent of threads.
            try:
                for fut in futures:
                    try:
                        row = fut.result()
                    except CancelledError:
                        continue
                    if row is not None:
                        rows.append(row)
            except NumericalRangeError:
                self.stop()
                raise

        return rows

    def run(self) -> SweepResult:
        config = self.config
        grid = config.grid_values()
        threads = config.n_threads()

        logging.info(
            f"Starting {config.mode.value} sweep; {grid.size} points; "
            f"{threads} threads"
        )

        if config.mode is Mode.IV:
            rows = self._iv_rows(grid, threads)
        else:
            rows = self._point_rows(grid, threads)

        if self.stopped.is_set():
            logging.warning(f"Sweep stopped; {len(rows)} of {grid.size} points done")

        dropped = grid.size - len(rows)
        if config.output.verify and rows:
            self.verify(rows)

        metadata = [
            f"metaslab {__version__}",
            f"mode: {config.mode.value}",
            f"constants: {constant_set_hash()}",
            f"points: {len(rows)} of {grid.size}; dropped {dropped}",
        ]
        metadata += [f"override {o}" for o in config.overrides]

        logging.info(f"Finished {config.mode.value} sweep; {len(rows)} rows")
        return SweepResult(
            header=list(COLUMNS[config.mode.value]),
            rows=rows,
            metadata=metadata,
            config_echo=config.echo(),
        )

    def stop(self) -> None:
        """Cancels all points which have not been started yet. Never blocks."""

        self.stopped.set()
        cancelled = sum(fut.cancel() for fut in list(self._futures))
        logging.info(f"Sweep runner stopped; {cancelled} pending points cancelled")

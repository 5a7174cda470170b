from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime

import pandas as pd
import pytz

# Twelve significant digits; the same text on every platform.
FLOAT_FORMAT = "%.12g"

CONFIG_BEGIN = "# --- config ---"
CONFIG_END = "# --- end config ---"
TIMESTAMP_PREFIX = "# timestamp: "

COLUMNS = {
    "transmission": ["E_eV", "T", "R", "k2_re", "k2_im"],
    "iv": ["V_volt", "J_norm", "J_abs"],
    "traversal": [
        "E_eV",
        "tau_fs",
        "tau_no_slab_fs",
        "tau_no_refl_fs",
        "alpha",
        "regime",
    ],
    "traversal_bias": [
        "V_volt",
        "tau_fs",
        "tau_no_slab_fs",
        "tau_no_refl_fs",
        "alpha",
        "regime",
    ],
}


@dataclass
class SweepResult:
    header: list[str]
    rows: list[tuple] = field(default_factory=list)
    # Metadata lines without the leading '#': version, constant hash, overrides.
    metadata: list[str] = field(default_factory=list)
    # Resolved config as TOML.
    config_echo: str = ""
    timestamp: datetime = field(default_factory=lambda: datetime.now(pytz.utc))

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.header)

    def to_csv(self) -> str:
        """
        '#' prefixed metadata block followed by the table. Apart from the
        timestamp line the text only depends on the config.
        """

        lines = [f"# {m}" for m in self.metadata]
        lines.append(CONFIG_BEGIN)
        lines += [f"# {line}".rstrip() for line in self.config_echo.splitlines()]
        lines.append(CONFIG_END)
        lines.append(f"{TIMESTAMP_PREFIX}{self.timestamp.isoformat()}")

        body = self.frame().to_csv(
            index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
        return "\n".join(lines) + "\n" + body

    def write(self, path: str) -> None:
        with open(os.path.expanduser(path), "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())


def read_echo(csv_text: str) -> str:
    """Extracts the config echo from the metadata block of a CSV."""

    res: list[str] = []
    inside = False
    for line in csv_text.splitlines():
        if line == CONFIG_BEGIN:
            inside = True
        elif line == CONFIG_END:
            break
        elif inside:
            res.append(line[2:] if line.startswith("# ") else line[1:])
    return "\n".join(res) + "\n"


def strip_timestamp(csv_text: str) -> str:
    return "\n".join(
        line for line in csv_text.splitlines() if not line.startswith(TIMESTAMP_PREFIX)
    )


def gnuplot_script(result: SweepResult, csv_path: str) -> str:
    """Plot script for the numeric columns over the first column."""

    x = result.header[0]
    columns = [
        (i + 1, name)
        for i, name in enumerate(result.header)
        if i > 0 and name != "regime"
    ]
    data = os.path.basename(csv_path)
    plots = ", \\\n     ".join(f"'{data}' using 1:{i} with lines" for i, _ in columns)

    return (
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{x}'\n"
        "set key outside\n"
        "set grid\n"
        f"plot {plots}\n"
    )


def write_gnuplot(result: SweepResult, csv_path: str) -> str:
    path = f"{os.path.expanduser(csv_path)}.gp"
    with open(path, "w", encoding="utf-8") as f:
        f.write(gnuplot_script(result, csv_path))
    return path

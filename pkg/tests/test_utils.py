import os
import signal
from dataclasses import dataclass, field

import pytest

from metaslab.errors import ConfigError
from metaslab.utils import (
    GenericConf,
    SignalHandler,
    read_config_file,
    section_from_dict,
)


@dataclass
class SampleConf(GenericConf):
    level: str = "INFO"
    n_points: int = 10
    values: list[float] = field(default_factory=lambda: [1.0])


def test_section_from_dict():
    defaults = SampleConf()

    res = section_from_dict(defaults, {"n_points": 20})
    assert res == SampleConf(n_points=20)
    assert defaults.n_points == 10

    res = section_from_dict(defaults, None)
    assert res == defaults
    res.values.append(2.0)
    assert defaults.values == [1.0]

    values = [3.0]
    res = section_from_dict(defaults, {"values": values})
    values.append(4.0)
    assert res.values == [3.0]

    with pytest.raises(KeyError) as e:
        section_from_dict(defaults, {"level": "DEBUG", "levels": "DEBUG"})
    assert e.value.args[0] == "levels"


def test_read_config_file(tmp_path):
    path = tmp_path / "metaslab.toml"
    path.write_text('[structure]\npreset = "fig3a"\n', encoding="utf-8")

    assert read_config_file(str(path)) == '[structure]\npreset = "fig3a"\n'

    with pytest.raises(FileNotFoundError):
        read_config_file(str(tmp_path / "missing.toml"))

    with pytest.raises(FileNotFoundError):
        read_config_file(str(tmp_path))

    latin = tmp_path / "latin.toml"
    latin.write_bytes("# Größe\n".encode("latin-1"))
    with pytest.raises(ConfigError):
        read_config_file(str(latin))


def test_signal_handler_runs_once():
    calls = []

    with SignalHandler() as sig_handler:
        sig_handler.add_handler(lambda: calls.append("stop"))
        sig_handler.add_handler(lambda: calls.append("flush"))

        sig_handler.call_handlers()
        assert calls == ["stop", "flush"]

        sig_handler.call_handlers()
        assert calls == ["stop", "flush"]


def test_signal_handler_receives_signal():
    calls = []

    with SignalHandler() as sig_handler:
        sig_handler.add_handler(lambda: calls.append("stop"))
        os.kill(os.getpid(), signal.SIGTERM)

    assert calls == ["stop"]


def test_signal_handler_restores_previous():
    before = {sig: signal.getsignal(sig) for sig in (signal.SIGINT, signal.SIGTERM)}

    with SignalHandler() as sig_handler:
        assert signal.getsignal(signal.SIGINT) == sig_handler._receive_signal

    assert {sig: signal.getsignal(sig) for sig in before} == before

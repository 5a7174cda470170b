from __future__ import annotations

import logging
import os
import signal
import threading
from copy import deepcopy
from dataclasses import dataclass, fields, replace
from types import FrameType
from typing import Callable, TypeVar

from metaslab.errors import ConfigError

STOP_SIGNALS = (signal.SIGINT, signal.SIGTERM)


# Base of all config sections, for typing only
@dataclass
class GenericConf:
    pass


T = TypeVar("T", bound=GenericConf)


def section_from_dict(defaults: T, conf: dict | None) -> T:
    """
    Returns a copy of the section defaults with the keys of conf applied.
    The first key without a field raises a KeyError with the key as argument.
    """

    if not conf:
        return deepcopy(defaults)

    names = {f.name for f in fields(defaults)}
    for key in conf:
        if key not in names:
            raise KeyError(key)

    return replace(deepcopy(defaults), **deepcopy(conf))


def read_config_file(file_name: str) -> str:
    """Returns the UTF-8 text of the config file, parsing is up to the caller."""

    config_path = os.path.expanduser(file_name)

    if not os.path.isfile(config_path):
        raise FileNotFoundError(f"Config file '{file_name}' does not exist")

    with open(config_path, "rb") as config_file:
        raw = config_file.read()

    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError(f"config file '{file_name}' is not UTF-8: {e.reason}")


class SignalHandler:
    """
    Runs the added callables once when SIGINT or SIGTERM is received while
    the handler is entered, e.g. to cancel the pending points of a sweep.
    The previous signal handlers are restored on exit.
    """

    def __init__(self) -> None:
        self.handlers: list[Callable[[], None]] = []
        self.lock = threading.Lock()
        self._previous: dict[int, object] = {}

    def __enter__(self) -> SignalHandler:
        for sig in STOP_SIGNALS:
            self._previous[sig] = signal.getsignal(sig)
            signal.signal(sig, self._receive_signal)
        return self

    def __exit__(self, *exc) -> None:
        for sig, handler in self._previous.items():
            signal.signal(sig, handler)  # type: ignore[arg-type]
        self._previous = {}

    def add_handler(self, handler: Callable[[], None]) -> None:
        self.handlers.append(handler)

    def _receive_signal(self, signum: int, frame: FrameType | None) -> None:
        logging.warning(f"Signal {signal.Signals(signum).name} received; stopping")
        self.call_handlers()

    def call_handlers(self) -> None:
        with self.lock:
            handlers, self.handlers = self.handlers, []

        for h in handlers:
            h()

"""
Exceptions raised by metaslab. The CLI maps ConfigError to exit code 2 and
NumericalRangeError to exit code 3.
"""

from __future__ import annotations


class MetaslabError(Exception):
    def __init__(self, message="metaslab error"):
        self.message = message
        super().__init__(self.message)


class StructureError(MetaslabError, ValueError):
    def __init__(self, message="Invalid layer stack"):
        super().__init__(message)


class DomainError(MetaslabError, ValueError):
    def __init__(self, message="Input outside the domain of the operation"):
        super().__init__(message)


class UnsupportedConfiguration(DomainError):
    def __init__(self, message="Configuration not supported by this operation"):
        super().__init__(message)


class NumericalRangeError(MetaslabError, ArithmeticError):
    def __init__(self, message="Result outside the representable numerical range"):
        super().__init__(message)


class ConfigError(MetaslabError, ValueError):
    def __init__(self, message="Invalid configuration", line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

"""Exceptions raised by the library. The runner turns them into error results, see
result.py.
"""
from typing import Any

from .codes import (
    ERROR_CONFIGURATION,
    ERROR_DEGENERATE_INPUT,
    ERROR_INGESTION,
    ERROR_NUMERIC,
    ERROR_QUBIT_INDEX,
)
from .sentinels import NODATA


class VqcError(Exception):
    code = ERROR_CONFIGURATION

    def __init__(self, message: str, data: Any = NODATA):
        super().__init__(message)
        self.message, self.data = (message, data)


class ConfigurationError(VqcError):
    code = ERROR_CONFIGURATION


class QubitIndexError(VqcError, IndexError):
    code = ERROR_QUBIT_INDEX


class NumericError(VqcError, ValueError):
    code = ERROR_NUMERIC


class DegenerateInputError(VqcError, ValueError):
    code = ERROR_DEGENERATE_INPUT


class IngestionError(VqcError):
    code = ERROR_INGESTION

"""Result data types - the outcome of a run, or of one stage of it.

A stage either succeeds with a value, or fails with an ErrorResult naming the stage, so
the command line can report "vqcremap: <stage>: <message>".
"""
from typing import Any, NamedTuple

from oslash.either import Either, Left, Right  # type: ignore

from .codes import ERROR_INTERNAL
from .sentinels import NODATA


class SuccessResult(NamedTuple):
    result: Any = None

    def __repr__(self) -> str:
        return f"SuccessResult({self.result!r})"


class ErrorResult(NamedTuple):
    stage: str
    code: int
    message: str
    data: Any = NODATA

    def __str__(self) -> str:
        return f"{self.stage}: {self.message}"


Result = Either[ErrorResult, Any]


def InternalErrorResult(stage: str, message: str) -> ErrorResult:
    return ErrorResult(stage, ERROR_INTERNAL, f"Internal error: {message}")


# Helpers


def Success(*args: Any, **kwargs: Any) -> Either[ErrorResult, SuccessResult]:
    return Right(SuccessResult(*args, **kwargs))


def Error(*args: Any, **kwargs: Any) -> Either[ErrorResult, SuccessResult]:
    return Left(ErrorResult(*args, **kwargs))

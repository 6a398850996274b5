from __future__ import annotations

from typing import Any


class CDGKitError(RuntimeError):
    """Base class for every error raised by cdgkit."""


class OutOfWindow(CDGKitError):
    def __init__(self, *, what: str, degree: int, window: Any) -> None:
        super().__init__(f"{what}: degree {degree} lies outside the exact window {window}")
        self.what = what
        self.degree = degree
        self.window = window


class DegreeMismatch(CDGKitError):
    def __init__(self, *, what: str, expected: int, actual: int) -> None:
        super().__init__(f"{what}: expected degree {expected}, got {actual}")
        self.what = what
        self.expected = expected
        self.actual = actual


class NotClosed(CDGKitError):
    def __init__(self, *, name: str, witness: Any = None) -> None:
        super().__init__(f"{name} is not closed (witness={witness!r})")
        self.name = name
        self.witness = witness


class InvalidConnection(CDGKitError):
    def __init__(self, *, witness: Any, residual: Any) -> None:
        super().__init__(f"connection violates (d + a)^2 = h at {witness!r}: residual {residual!r}")
        self.witness = witness
        self.residual = residual


class NotExact(CDGKitError):
    def __init__(self, *, stage: str, witness: Any = None) -> None:
        super().__init__(f"sequence is not exact at {stage} (witness={witness!r})")
        self.stage = stage
        self.witness = witness


class NotFiniteDimensional(CDGKitError):
    def __init__(self, *, what: str) -> None:
        super().__init__(f"{what} is not finite dimensional")
        self.what = what


class VerificationFailed(CDGKitError):
    def __init__(self, *, check: str, witness: Any = None) -> None:
        super().__init__(f"verification failed: {check} (witness={witness!r})")
        self.check = check
        self.witness = witness


class ManifestError(CDGKitError):
    def __init__(self, message: str, *, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.message = message
        self.path = path


class ManifestSyntaxError(ManifestError):
    def __init__(self, message: str, *, line: int, col: int) -> None:
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnknownName(ManifestError):
    def __init__(self, *, name: str, path: str) -> None:
        super().__init__(f"unknown name {name!r}", path=path)
        self.name = name


class DimensionMismatch(ManifestError):
    def __init__(self, *, obj: str, degree: int, expected: tuple[int, int], actual: tuple[int, int]) -> None:
        super().__init__(
            f"block of {obj} in degree {degree} has shape {actual[0]}x{actual[1]}, "
            f"expected {expected[0]}x{expected[1]}",
            path=obj,
        )
        self.obj = obj
        self.degree = degree
        self.expected = expected
        self.actual = actual

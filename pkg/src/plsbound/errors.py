"""Exception hierarchy shared by every module of the package."""

import numpy as np


class PlsError(Exception):
    """Base class for all errors raised by plsbound."""


# numerics
class NonSymmetricError(PlsError, ValueError):
    pass


class NoConvergenceError(PlsError, np.linalg.LinAlgError):
    pass


class RankDeficientError(PlsError, np.linalg.LinAlgError):
    pass


class SingularError(PlsError, np.linalg.LinAlgError):
    pass


# model / estimators
class NotCenteredError(PlsError, ValueError):
    pass


class DegenerateResponseError(PlsError, ValueError):
    pass


# nipals / krylov
class DegenerateDirectionError(PlsError, ArithmeticError):
    """Raised by strict NIPALS fits when the Krylov space stops growing."""


class ZeroVectorError(PlsError, ValueError):
    pass


class BreakdownError(PlsError, ArithmeticError):
    """Raised by strict CG runs on a direction with non-positive curvature."""


# bounds
class DegenerateOLSError(PlsError, ArithmeticError):
    pass


class IllConditionedError(PlsError, np.linalg.LinAlgError):
    pass


class ConstraintViolatedError(PlsError, ValueError):
    pass


# synth
class ResampleExhaustedError(PlsError, RuntimeError):
    pass


# ingest
class MissingFileError(PlsError, FileNotFoundError):
    pass


class MissingColumnError(PlsError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class EmptyTableError(PlsError, ValueError):
    pass


class DegenerateColumnError(PlsError, ValueError):
    pass

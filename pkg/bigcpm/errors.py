"""
Error types for bigcpm
Every error derives from CpmError and from the closest builtin
"""
from typing import Optional


class CpmError(Exception):
    """Base class for all bigcpm errors"""


class LinkDomainError(CpmError, ValueError):
    """Link function evaluated at a non-finite argument"""


class InvalidDatasetError(CpmError, ValueError):
    """Dataset violates shape or finiteness requirements"""


class DegenerateOutcomeError(CpmError, ValueError):
    """Outcome has fewer than two distinct values"""


class PreconditionError(CpmError, ValueError):
    """Parameters passed to the likelihood are malformed"""


class ArgumentError(CpmError, ValueError):
    """An argument is outside its allowed range"""


class SeparationError(CpmError, ArithmeticError):
    """Parameter estimates drift without bound"""

    def __init__(self, message: str, parameter: Optional[int] = None):
        super().__init__(message)
        self.parameter = parameter


class SingularHessianError(CpmError, ArithmeticError):
    """Negative Hessian is not positive definite"""

    def __init__(self, message: str, block: str):
        super().__init__(f"{message} (block: {block})")
        self.block = block


class ConsistencyError(CpmError, ValueError):
    """Subset outcome grid is not contained in the global grid"""


class UnconvergedSubsetError(CpmError, ArithmeticError):
    """A subset fit did not converge and cannot be combined"""

    def __init__(self, subset: int):
        super().__init__(f"Subset {subset} fit did not converge")
        self.subset = subset


class InestimableCoefficientError(CpmError, ValueError):
    """A predictor is constant inside a subset"""

    def __init__(self, column: str, subset: Optional[int] = None):
        where = f" in subset {subset}" if subset is not None else ""
        super().__init__(f"Coefficient for '{column}' is not estimable{where}: predictor is constant")
        self.column = column
        self.subset = subset


class IngestError(CpmError, ValueError):
    """Input CSV cannot be turned into a dataset"""


class ModelFitError(CpmError, ArithmeticError):
    """Scaling regression cannot be fit"""

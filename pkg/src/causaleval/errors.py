"""
Exception hierarchy for CausalEval

Every error raised by the library derives from CausalEvalError and carries
the CLI exit code it maps to: 1 for usage errors, 2 for data/model errors.
Data and model errors are also ValueErrors so callers validating input the
usual way keep working.
"""

from typing import Optional


class CausalEvalError(Exception):
    """Base class for all CausalEval errors"""

    kind = "error"
    exit_code = 2


class UsageError(CausalEvalError):
    """Invalid invocation: bad flags, invalid run configuration, bad formula"""

    kind = "usage"
    exit_code = 1


class FormulaError(UsageError, ValueError):
    """Formula that parses but is semantically invalid"""


class FormulaSyntaxError(FormulaError):
    """Formula text that does not match the grammar"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class DataError(CausalEvalError, ValueError):
    """Input data that cannot be ingested or encoded"""

    kind = "data"


class ModelError(CausalEvalError, ValueError):
    """A model that cannot be fitted or analysed on the given data"""

    kind = "model"


class RankDeficiencyError(ModelError):
    """Perfect multicollinearity in the design matrix"""

    def __init__(self, column: str, message: Optional[str] = None):
        super().__init__(
            message or f"rank deficiency: column '{column}' is a linear combination of preceding columns"
        )
        self.column = column


class SeparationError(ModelError):
    """Complete or quasi-complete separation: the logit MLE does not exist"""


class ConvergenceError(ModelError):
    """An iterative fit that did not converge"""

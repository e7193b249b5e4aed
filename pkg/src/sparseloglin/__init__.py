"""Log-linear models for sparse contingency tables.

Detects when the MLE of a hierarchical log-linear model fails to exist
(the sufficient statistic falls on a proper face of the marginal cone),
computes the facial set via repeated linear programming, and fits the
extended MLE on it with the correct effective dimension, degrees of
freedom, and information criteria.
"""

from .design import DesignMatrix, SufficientStatistic, build_design, matrix_rank, sufficient_statistic
from .faces import FacialSet, find_facial_set, mle_exists, per_cell_oracle
from .fit import FitError, FitResult, bic, cbic, deviance, fit, loglik, standard_errors
from .formula import FormulaError, ModelFormula, parse_formula, parse_generators
from .lp import LinearProgram, LpSolution, SimplexError, solve
from .table import ContingencyTable, FactorSpec, TableError, binarize, marginal, parse_table, serialize_table

__version__ = "0.1.0"

__all__ = [
    "ContingencyTable",
    "FactorSpec",
    "TableError",
    "parse_table",
    "serialize_table",
    "marginal",
    "binarize",
    "ModelFormula",
    "FormulaError",
    "parse_formula",
    "parse_generators",
    "DesignMatrix",
    "SufficientStatistic",
    "build_design",
    "sufficient_statistic",
    "matrix_rank",
    "LinearProgram",
    "LpSolution",
    "SimplexError",
    "solve",
    "FacialSet",
    "find_facial_set",
    "per_cell_oracle",
    "mle_exists",
    "FitResult",
    "FitError",
    "fit",
    "loglik",
    "deviance",
    "bic",
    "cbic",
    "standard_errors",
    "__version__",
]

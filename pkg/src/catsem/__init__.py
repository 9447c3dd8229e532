"""Finite categorical semantics: exact, exhaustive checks of categorical and bicategorical laws."""
from .config import Budget, DEFAULT_BUDGET
from .errors import BudgetError, CatsemError
from .report import Report

__version__ = "0.1.0"

__all__ = ["Budget", "DEFAULT_BUDGET", "BudgetError", "CatsemError", "Report", "__version__"]

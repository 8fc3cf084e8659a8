"""ldlab: a numerical laboratory for noise operators, orthogonal-polynomial
bases, low-degree likelihood ratios, and total-variation indistinguishability
experiments on boolean strings, Gaussian vectors, and Wigner matrices."""

__version__ = "0.1.0"

from .errors import BudgetError, ConfigError

__all__ = ["BudgetError", "ConfigError", "__version__"]

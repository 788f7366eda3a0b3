"""
Lab constants and enums.
Centralizes magic numbers and strings.
"""
from enum import Enum


class OutputFormat(str, Enum):
    """Report output formats."""
    CSV = "csv"
    JSON = "json"
    TEXT = "text"


class LValueMethod(str, Enum):
    """Evaluator that produced an L-value."""
    REFERENCE = "reference"
    AFE = "afe"


class PrimeSumKind(str, Enum):
    """Mertens-type prime sums."""
    RECIPROCAL = "reciprocal"
    LOG_OVER_P = "log_over_p"
    COSINE = "cosine"


class SurrogateVariant(str, Enum):
    """Range of the prime-square sum in the log|L| surrogate."""
    GENERAL = "general"
    NONQUADRATIC = "nonquadratic"


class CoefficientFlavor(str, Enum):
    """Coefficient systems of the mollifier polynomials."""
    G = "g"
    H = "h"
    F = "f"
    C = "c"
    B = "b"
    B_PRIME = "b_prime"
    B_DOUBLE_PRIME = "b_double_prime"
    Q = "q"
    R = "r"


# Meissel-Mertens constant b_1
MEISSEL_MERTENS = 0.26149721284764278375

# Prime counting oracle pi(10^6)
PRIME_COUNT_1E6 = 78498

# Abscissa of the shifted contour used for small arguments of the AFE weight
WEIGHT_SMALL_X_ABSCISSA = -0.25

# Chebyshev panels used to tabulate the AFE weight in log x
WEIGHT_PANEL_WIDTH = 0.5
WEIGHT_PANEL_DEGREE = 28

# Decimal digits in every rendered float
FLOAT_DIGITS = 17

# Numerical slack of the Hoelder inequality, relative to the right-hand side
HOLDER_SLACK = 1e-9

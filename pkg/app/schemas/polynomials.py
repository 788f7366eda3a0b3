"""
Schemas for prime tables, mollifier schedules and coefficient vectors.
"""
import math
from typing import List, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import CoefficientFlavor, PrimeSumKind, SurrogateVariant


class PrimeTable(BaseModel):
    """All primes up to `limit`, ascending."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    limit: int = Field(..., ge=0)
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def upto(self, x: float) -> np.ndarray:
        """Primes p <= x (x may be below the table limit)."""
        return self.primes[: int(np.searchsorted(self.primes, math.floor(x), side="right"))]

    def between(self, low: float, high: float) -> np.ndarray:
        """Primes p with low < p <= high."""
        lo = int(np.searchsorted(self.primes, math.floor(low), side="right"))
        hi = int(np.searchsorted(self.primes, math.floor(high), side="right"))
        return self.primes[lo:hi]


class PrimeSumResult(BaseModel):
    """A direct prime sum next to its main term."""
    kind: PrimeSumKind
    x: float
    alpha: float = 0.0
    value: float
    main_term: float
    residual: float


class MollifierSchedule(BaseModel):
    """
    Scale parameters of the mollifier.

    c[j] = e^j / (log log q)^2 for j >= 1 with c[0] = 0, P_j = q^{c_j},
    K_j = c_j^{-3/4} and R the largest index with P_R <= q^delta. `c` holds
    c_0..c_{R+1}; `K`, `thresholds` and `degrees` hold entries for j = 1..R.
    """
    model_config = ConfigDict(frozen=True)

    q: int
    log_delta: float = Field(..., lt=0, description="log of the exponent delta")
    a_star: float = Field(..., gt=0)
    loglog_sq: float = Field(..., gt=0, description="(log log q)^2")
    c: Tuple[float, ...]
    K: Tuple[float, ...]
    thresholds: Tuple[float, ...]
    degrees: Tuple[int, ...]
    R: int = Field(..., ge=0)
    theoretical_regime: bool = Field(..., description="True when delta < exp(-1000 a_star)")

    @model_validator(mode="after")
    def check_scales(self) -> "MollifierSchedule":
        if len(self.c) != self.R + 2 or self.c[0] != 0.0:
            raise ValueError("c must hold c_0 = 0 through c_{R+1}")
        if any(b <= a for a, b in zip(self.c, self.c[1:])):
            raise ValueError("c_j must be strictly increasing")
        if not (len(self.K) == len(self.degrees) == len(self.thresholds) == self.R):
            raise ValueError("K, thresholds and degrees need one entry per j <= R")
        if any(d < 1 for d in self.degrees):
            raise ValueError("degrees must be >= 1")
        return self

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    def log_P(self, j: int) -> float:
        """log P_j = c_j log q."""
        return self.c[j] * self.log_q

    def P(self, j: int) -> float:
        """P_j = q^{c_j} (inf on overflow)."""
        try:
            return math.exp(self.log_P(j))
        except OverflowError:
            return math.inf

    def degree(self, j: int) -> int:
        return self.degrees[j - 1]


class CoefficientVector(BaseModel):
    """Dense coefficients f(1..length) of a Dirichlet polynomial; values[0] is unused."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    flavor: CoefficientFlavor
    j: int = Field(..., ge=1)
    length: int = Field(..., ge=1)
    values: np.ndarray

    @model_validator(mode="after")
    def check_shape(self) -> "CoefficientVector":
        if self.values.shape != (self.length + 1,):
            raise ValueError("values must have length + 1 entries")
        return self

    def __getitem__(self, n: int) -> complex:
        return complex(self.values[n]) if 1 <= n <= self.length else 0j

    def support(self) -> np.ndarray:
        """Indices n >= 1 with a nonzero coefficient."""
        idx = np.flatnonzero(self.values)
        return idx[idx >= 1]


class MollifierCheckRow(BaseModel):
    """Outcome of one mollifier law check."""
    check: str
    cases: int
    worst: float
    bound: float
    passed: bool
    note: Optional[str] = None


class SurrogateRow(BaseModel):
    """Surrogate bound for sum_j a_j log|L(1/2 + i t_j, chi)| at one character."""
    q: int
    index: int
    x: float
    surrogate: float
    log_l_sum: float
    gap: float


class SurrogateCensus(BaseModel):
    """Distribution of the surrogate gap over the primitive characters of a modulus."""
    q: int
    x: float
    variant: SurrogateVariant
    count: int
    min_gap: float
    max_gap: float
    mean_gap: float
    median_gap: float
    rows: List[SurrogateRow] = []

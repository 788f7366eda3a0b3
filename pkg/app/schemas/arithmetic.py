"""
Schemas for integer arithmetic and Dirichlet characters.
"""
from typing import Tuple, List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Factorization(BaseModel):
    """Prime factorization of a positive integer as sorted (prime, exponent) pairs."""
    model_config = ConfigDict(frozen=True)

    factors: Tuple[Tuple[int, int], ...] = Field(default=(), description="(prime, exponent) pairs sorted by prime")

    @model_validator(mode="after")
    def check_pairs(self) -> "Factorization":
        """Primes strictly increasing, exponents at least 1."""
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous:
                raise ValueError("primes must be strictly increasing")
            if exponent < 1:
                raise ValueError("exponents must be >= 1")
            previous = prime
        return self

    @property
    def n(self) -> int:
        """The factored integer."""
        value = 1
        for prime, exponent in self.factors:
            value *= prime ** exponent
        return value

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def as_dict(self) -> dict:
        return {p: e for p, e in self.factors}

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


class CharacterRow(BaseModel):
    """One line of a character table report."""
    q: int
    index: int = Field(..., description="Position in the lexicographic enumeration")
    exponents: str = Field(..., description="Exponent vector joined by ':'")
    conductor: int
    primitive: bool
    parity: int = Field(..., ge=0, le=1)
    order: int


class GaussRow(BaseModel):
    """Gauss sum of one character with the magnitude check."""
    q: int
    index: int
    primitive: bool
    tau: complex
    abs_squared_minus_q: Optional[float] = None
    conjugation_residual: Optional[float] = None


class KloostermanRow(BaseModel):
    """Hyper-Kloosterman sum against its Weil bound."""
    q: int
    k: int
    v: int
    value: complex
    weil_bound: float
    within_bound: bool

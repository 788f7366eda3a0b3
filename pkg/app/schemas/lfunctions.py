"""
Schemas for shifts, L-values and the approximate functional equation.
"""
import math
from typing import Tuple, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.constants import LValueMethod


class EvalOptions(BaseModel):
    """Accuracy controls of the Euler-Maclaurin evaluation of zeta and Hurwitz zeta."""
    model_config = ConfigDict(frozen=True)

    shift: int = Field(default=30, ge=10, description="Euler-Maclaurin shift N")
    bernoulli_terms: int = Field(default=12, ge=2, le=30, description="Bernoulli correction terms M")

    @classmethod
    def from_settings(cls) -> "EvalOptions":
        """Options carrying the configured defaults."""
        from app.core.config import settings
        return cls(shift=settings.EM_SHIFT, bernoulli_terms=settings.EM_BERNOULLI_TERMS)


class ShiftSpec(BaseModel):
    """
    Shifts t and exponents a of a shifted moment.

    a_star is sum(max(1, a_j)); the bound exponent A caps |t_j| by q^A once a
    modulus is fixed.
    """
    model_config = ConfigDict(frozen=True)

    t: Tuple[float, ...] = Field(..., min_length=1, description="Shifts t_1..t_k")
    a: Tuple[float, ...] = Field(..., min_length=1, description="Exponents a_1..a_k")
    bound_exponent: float = Field(default=1.0, gt=0, description="Exponent A in |t_j| <= q^A")

    @field_validator("a")
    @classmethod
    def validate_exponents(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Exponents must be positive."""
        if any(not a > 0 for a in v):
            raise ValueError("exponents a_j must be > 0")
        return v

    @field_validator("t")
    @classmethod
    def validate_shifts(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not math.isfinite(t) for t in v):
            raise ValueError("shifts must be finite")
        return v

    @model_validator(mode="after")
    def check_lengths(self) -> "ShiftSpec":
        if len(self.t) != len(self.a):
            raise ValueError(f"t has {len(self.t)} entries but a has {len(self.a)}")
        return self

    @property
    def k(self) -> int:
        return len(self.t)

    @property
    def a_star(self) -> float:
        return sum(max(1.0, a) for a in self.a)

    @property
    def a_total(self) -> float:
        return sum(self.a)

    @property
    def a_squares(self) -> float:
        return sum(a * a for a in self.a)

    def pairs(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.t, self.a))

    def negated(self) -> "ShiftSpec":
        """Same spec with every shift negated."""
        return ShiftSpec(t=tuple(-t for t in self.t), a=self.a, bound_exponent=self.bound_exponent)

    def fits_modulus(self, q: int) -> bool:
        """True when every |t_j| <= q^A."""
        limit = float(q) ** self.bound_exponent
        return all(abs(t) <= limit for t in self.t)


class LValueResult(BaseModel):
    """An L-value (or product of L-values) with provenance."""
    model_config = ConfigDict(frozen=True)

    value: complex
    method: LValueMethod
    truncation_error_estimate: float = Field(..., ge=0)

    @field_validator("truncation_error_estimate")
    @classmethod
    def validate_estimate(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("truncation error estimate must be finite")
        return v


class AfeWeightSpec(BaseModel):
    """
    Parameters of the smoothing weight W of the approximate functional equation.

    sign selects W_{a,+t} or W_{a,-t}; the quadrature runs on Re s = abscissa with
    step `step` up to |Im s| = height.
    """
    model_config = ConfigDict(frozen=True)

    parity: int = Field(..., ge=0, le=1)
    sign: int = Field(default=1)
    shifts: Tuple[float, ...] = Field(..., min_length=1)
    abscissa: float = Field(default=3.0, gt=0)
    step: float = Field(default=0.02, gt=0)
    height: float = Field(default=10.0, ge=8)

    @field_validator("sign")
    @classmethod
    def validate_sign(cls, v: int) -> int:
        if v not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return v

    @property
    def k(self) -> int:
        return len(self.shifts)

    @classmethod
    def from_settings(cls, parity: int, sign: int, shifts: Tuple[float, ...]) -> "AfeWeightSpec":
        from app.core.config import settings
        return cls(
            parity=parity,
            sign=sign,
            shifts=tuple(shifts),
            abscissa=settings.WEIGHT_ABSCISSA,
            step=settings.WEIGHT_STEP,
            height=settings.WEIGHT_HEIGHT
        )


class AfeCheckRow(BaseModel):
    """Cross-method agreement of one character at one X."""
    q: int
    index: int
    X: float
    afe: complex
    reference: complex
    deviation: float
    relative: bool = Field(..., description="True when deviation is relative, False when absolute")
    terms: int


class FunctionalEquationRow(BaseModel):
    """Functional-equation residual at one point."""
    q: int
    index: int
    parity: int
    s: complex
    residual: float
    root_number: complex


class LValueRow(BaseModel):
    """A single L-value."""
    q: int
    index: int
    s: complex
    value: complex
    method: LValueMethod
    error_estimate: float
    primitive: bool
    growth_exponent: Optional[float] = None

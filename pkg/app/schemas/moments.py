"""
Schemas for shifted moments and their Hoelder decomposition.
"""
from typing import Tuple, Optional, List
from pydantic import BaseModel, ConfigDict, Field

from app.schemas.lfunctions import ShiftSpec


class HolderExponents(BaseModel):
    """Exponents u, v, r_1..r_k of the Hoelder split."""
    model_config = ConfigDict(frozen=True)

    u: float = Field(..., gt=1)
    v: float = Field(..., gt=1)
    r: Tuple[float, ...]


class ProofSplit(BaseModel):
    """S_0, J and S_m summed over the good set, with the Hoelder residual."""
    q: int
    R: int
    members: int = Field(..., description="Size of the good set")
    primitive_count: int
    s0: complex
    j_sum: float
    s_m: Tuple[float, ...]
    moment: float
    holder: HolderExponents
    holder_rhs: float
    holder_residual: float
    euler_majorant: Optional[float] = None
    telescoped: Tuple[complex, ...] = ()


class MomentReport(BaseModel):
    """One modulus of a moment computation."""
    q: int
    spec: ShiftSpec
    phi: int
    phi_star: int
    moment: float = Field(..., ge=0)
    main_term: float = Field(..., gt=0)
    ratio: float
    split: Optional[ProofSplit] = None
    skipped_reason: Optional[str] = None
    elapsed: float = 0.0


class SweepSummary(BaseModel):
    """Ratio window of a sweep."""
    count: int
    skipped: List[int] = []
    min_ratio: Optional[float] = None
    max_ratio: Optional[float] = None
    spread: Optional[float] = Field(default=None, description="max ratio / min ratio")


class PowerMomentRow(BaseModel):
    """Power-moment diagnostic at one (q, x, k)."""
    q: int
    x: float
    k: int
    lhs: float
    rhs: float
    ratio: float

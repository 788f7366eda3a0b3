"""
Pydantic schemas for domain records and report rows.
"""
from app.schemas.common import ErrorResponse, ReportMeta, Report
from app.schemas.arithmetic import Factorization, CharacterRow, GaussRow, KloostermanRow
from app.schemas.lfunctions import (
    EvalOptions,
    ShiftSpec,
    LValueResult,
    AfeWeightSpec,
    AfeCheckRow,
    FunctionalEquationRow,
    LValueRow
)
from app.schemas.polynomials import (
    PrimeTable,
    PrimeSumResult,
    MollifierSchedule,
    CoefficientVector,
    MollifierCheckRow
)
from app.schemas.moments import (
    HolderExponents,
    ProofSplit,
    MomentReport,
    SweepSummary,
    PowerMomentRow
)

__all__ = [
    "ErrorResponse",
    "ReportMeta",
    "Report",
    "Factorization",
    "CharacterRow",
    "GaussRow",
    "KloostermanRow",
    "EvalOptions",
    "ShiftSpec",
    "LValueResult",
    "AfeWeightSpec",
    "AfeCheckRow",
    "FunctionalEquationRow",
    "LValueRow",
    "PrimeTable",
    "PrimeSumResult",
    "MollifierSchedule",
    "CoefficientVector",
    "MollifierCheckRow",
    "HolderExponents",
    "ProofSplit",
    "MomentReport",
    "SweepSummary",
    "PowerMomentRow",
]

"""
Common schemas shared across features.
"""
from typing import Optional, Any, Dict, List
from pydantic import BaseModel, Field


class ErrorResponse(BaseModel):
    """Error document written to stderr."""
    message: str
    success: bool = False
    details: Optional[Dict[str, Any]] = None


class ReportMeta(BaseModel):
    """Metadata block of a JSON report."""
    version: str
    invocation: List[str] = Field(default_factory=list, description="Command line that produced the report")
    timing: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per phase")
    notes: List[str] = Field(default_factory=list)


class Report(BaseModel):
    """
    Output of one subcommand.

    Rows are flat mappings of column name to scalar; `columns` fixes the CSV
    header and column order.
    """
    command: str
    columns: List[str]
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    failed_checks: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failed_checks

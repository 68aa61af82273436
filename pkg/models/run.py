"""
Run configuration and the JSON envelope every command writes
"""
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field


class OutputFormat(str, Enum):
    """Rendering of the envelope on stdout or --out"""
    JSON = "json"
    TEXT = "text"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


class RunConfig(BaseModel):
    """Effective configuration of one command run"""
    command: str
    d: Optional[int] = Field(None, description="Dimension")
    seed: Optional[int] = None
    levels: Optional[int] = Field(None, description="Level budget K")
    eps: Optional[str] = Field(None, description="Epsilon as exact text")
    out: Optional[str] = Field(None, description="JSON output path; stdout when absent")
    svg: Optional[str] = Field(None, description="SVG output path")
    format: OutputFormat = OutputFormat.JSON
    options: Dict[str, Any] = Field(default_factory=dict, description="Command specific options")

    model_config = ConfigDict(frozen=True)


class ErrorModel(BaseModel):
    name: str
    detail: str


class CommandResult(BaseModel):
    """Envelope written once at the end of a successful run"""
    schema_version: int = Field(..., alias="schema")
    command: str
    config: RunConfig
    verdict: Verdict
    result: Any

    model_config = ConfigDict(populate_by_name=True)


class ErrorResult(BaseModel):
    """Envelope written when a command fails with a toolkit error"""
    schema_version: int = Field(..., alias="schema")
    command: str
    error: ErrorModel

    model_config = ConfigDict(populate_by_name=True)

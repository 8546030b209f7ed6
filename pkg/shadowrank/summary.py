"""Run summary model and its published JSON schema."""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from jsonschema import Draft202012Validator
from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import SummaryError

SCHEMA_PATH = Path(__file__).parent / "schemas" / "run_summary.schema.json"


class CaseSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    case_id: str
    geometry: Dict[str, Any]
    ka: float
    shadow: Dict[str, Any]
    closed_form: Optional[Dict[str, Any]] = None
    knee_pred: float
    knee_detected: Optional[int] = None
    ranks: Dict[str, Optional[int]]
    remainder_width: Dict[str, int]
    spectrum_method: str
    n_sigmas: int
    analysis: Dict[str, Any] = {}


class ScalingSummary(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: str
    tau: float
    slope: Optional[float] = None
    rows: List[Dict[str, Any]]


class RunSummary(BaseModel):
    """Scalar results of one experiment run."""
    model_config = ConfigDict(extra="forbid")

    experiment: str
    version: str
    seed: int
    full: bool
    wavelength: float
    cases: List[CaseSummary]
    scaling: List[ScalingSummary] = []
    checks: Dict[str, Any] = {}


def load_schema() -> Dict[str, Any]:
    """The JSON schema shipped with the package."""
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_summary(data: Dict[str, Any]) -> RunSummary:
    """Validate a summary mapping against the published schema and the model.

    Raises:
        SummaryError: If the data does not conform.
    """
    validator = Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: e.json_path)
    if errors:
        details = "; ".join(f"{e.json_path}: {e.message}" for e in errors)
        raise SummaryError(f"Summary does not match the schema: {details}")
    try:
        return RunSummary.model_validate(data)
    except ValidationError as e:
        raise SummaryError(f"Invalid run summary: {e}") from e

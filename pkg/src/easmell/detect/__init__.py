"""Detection pipeline: prompts, backends, output parsing, run orchestration."""

from .backends import (
    LexicalBaselineBackend,
    RemoteChatBackend,
    ReplayBackend,
    lexical_baseline_analyze,
    make_backend,
)
from .parsing import dedup_findings, extract_json_array, normalize_quote, parse_model_output
from .prompts import PromptBundle, PromptCall, PromptConfig, assemble_prompt, prompt_version, system_text
from .runner import run_detection
from .types import (
    BackendProfile,
    DetectionProtocol,
    DetectionReport,
    DetectionRequest,
    Finding,
    OVER_CAP_TAG,
    ParseDiagnostic,
    Severity,
    Transcript,
)

__all__ = [
    "BackendProfile",
    "DetectionProtocol",
    "DetectionReport",
    "DetectionRequest",
    "Finding",
    "LexicalBaselineBackend",
    "OVER_CAP_TAG",
    "ParseDiagnostic",
    "PromptBundle",
    "PromptCall",
    "PromptConfig",
    "RemoteChatBackend",
    "ReplayBackend",
    "Severity",
    "Transcript",
    "assemble_prompt",
    "dedup_findings",
    "extract_json_array",
    "lexical_baseline_analyze",
    "make_backend",
    "normalize_quote",
    "parse_model_output",
    "prompt_version",
    "run_detection",
    "system_text",
]

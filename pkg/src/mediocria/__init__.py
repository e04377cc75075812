"""Rule-based author obfuscation toward corpus-average style."""

from .lexicons import LexiconBundle, default_bundle, load_bundle
from .metrics import (
    CONTROLLED_METRICS,
    RATIO_METRICS,
    Budget,
    CalibrationProfile,
    StyleMetrics,
    calibrate,
    compute_metrics,
    load_profile,
    metric_delta,
    save_profile,
    update_budget,
)
from .pipeline import (
    ObfuscationConfig,
    ObfuscationResult,
    obfuscate_document,
    obfuscate_text,
    plan,
    write_result,
)
from .textmodel import Document, Segment, Sentence, Token, parse_text, render
from .transforms import TransformKind, TransformRecord

__version__ = "0.1.0"

__all__ = [
    "LexiconBundle",
    "default_bundle",
    "load_bundle",
    "CONTROLLED_METRICS",
    "RATIO_METRICS",
    "Budget",
    "CalibrationProfile",
    "StyleMetrics",
    "calibrate",
    "compute_metrics",
    "load_profile",
    "metric_delta",
    "save_profile",
    "update_budget",
    "ObfuscationConfig",
    "ObfuscationResult",
    "obfuscate_document",
    "obfuscate_text",
    "plan",
    "write_result",
    "Document",
    "Segment",
    "Sentence",
    "Token",
    "parse_text",
    "render",
    "TransformKind",
    "TransformRecord",
    "__version__",
]

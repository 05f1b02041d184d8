"""Bias measurement for static and contextualized word embeddings."""

__version__ = "0.1.0"

from .ceat import CeatResult, EffectSample, run_ceat, sample_effect
from .detect import (
    DetectionConfig,
    DetectionResult,
    GroupGrid,
    ThresholdChoice,
    detect_emergent,
    detect_intersectional,
    evaluate,
    score_attributes,
    select_threshold,
)
from .embed_store import EmbeddingBank, EmbeddingTable, load_bank, load_swe, lookup, write_bank
from .meta import MetaResult, combine, combined_pvalue
from .report import HistogramReport, histogram, render_report
from .stimuli import builtin_grid, builtin_test, load_spec, validation_set
from .weat import (
    PValueMode,
    WeatOutcome,
    WeatSpec,
    cosine,
    diff_assoc,
    effect_size,
    permutation_pvalue,
    run_weat,
    std_assoc,
    test_statistic,
)

__all__ = [
    "CeatResult",
    "DetectionConfig",
    "DetectionResult",
    "EffectSample",
    "EmbeddingBank",
    "EmbeddingTable",
    "GroupGrid",
    "HistogramReport",
    "MetaResult",
    "PValueMode",
    "ThresholdChoice",
    "WeatOutcome",
    "WeatSpec",
    "builtin_grid",
    "builtin_test",
    "combine",
    "combined_pvalue",
    "cosine",
    "detect_emergent",
    "detect_intersectional",
    "diff_assoc",
    "effect_size",
    "evaluate",
    "histogram",
    "load_bank",
    "load_spec",
    "load_swe",
    "lookup",
    "permutation_pvalue",
    "render_report",
    "run_ceat",
    "run_weat",
    "sample_effect",
    "score_attributes",
    "select_threshold",
    "std_assoc",
    "test_statistic",
    "validation_set",
    "write_bank",
]

"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``category`` used by the CLI
for its ``E:<category>:`` stderr prefix and exit-code mapping.
"""

from __future__ import annotations


class BiaslensError(Exception):
    """Base class for all package errors."""

    category = "internal"


class FormatError(BiaslensError):
    """Malformed input file (embedding text file, manifest, spec JSON)."""

    category = "format"


class CorruptionError(BiaslensError):
    """On-disk bytes inconsistent with the manifest."""

    category = "corruption"


class ValidationError(BiaslensError):
    """A domain-type invariant does not hold."""

    category = "validation"


class MissingWordError(BiaslensError):
    """Lookup of a word absent from a table or bank."""

    category = "missing-word"

    def __init__(self, words):
        if isinstance(words, str):
            words = [words]
        self.words = list(words)
        super().__init__("missing word(s): " + ", ".join(self.words))


class DegenerateVectorError(BiaslensError):
    """Zero-norm vector fed to cosine similarity."""

    category = "degenerate-vector"


class DegenerateAssociationError(BiaslensError):
    """Zero standard deviation in the association-score denominator."""

    category = "degenerate-association"


class DegenerateEffectError(BiaslensError):
    """Zero standard deviation in the effect-size denominator."""

    category = "degenerate-effect"


class BudgetExceededError(BiaslensError):
    """Exact permutation enumeration would exceed the partition budget."""

    category = "budget-exceeded"


class ParameterError(BiaslensError):
    """Invalid parameter value (sample counts, standard errors, formats)."""

    category = "parameter"


class InvalidVarianceError(BiaslensError):
    """A sample variance is non-positive, so meta-analysis weights are undefined."""

    category = "invalid-variance"


class UndefinedRocError(BiaslensError):
    """ROC threshold selection attempted with a single-class label set."""

    category = "undefined-roc"


class CoverageError(BiaslensError):
    """Ground-truth labels do not cover a word being evaluated."""

    category = "coverage"

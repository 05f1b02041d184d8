"""Errors raised while building embedding banks."""

from __future__ import annotations


class ExtractorError(Exception):
    """Base class for all extraction errors."""

    category = "internal"


class JobError(ExtractorError):
    """Malformed job file or violated job invariant."""

    category = "job"


class ModelError(ExtractorError):
    """The model or tokenizer cannot support extraction (e.g. no offsets)."""

    category = "model"


class EmptyStimulusError(ExtractorError):
    """One or more stimuli ended up with zero vectors."""

    category = "empty-stimulus"

    def __init__(self, stimuli):
        self.stimuli = list(stimuli)
        super().__init__(
            "no vectors extracted for stimuli: " + ", ".join(self.stimuli)
        )

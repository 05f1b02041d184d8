"""Corpus-to-embedding-bank extraction pipeline."""

from .build import BANK_FORMAT_VERSION, build_bank
from .encode import StimulusEncoder
from .errors import EmptyStimulusError, ExtractorError, JobError, ModelError
from .job import ExtractionJob, load_job
from .retrieve import RetrievedSentence, retrieve_sentences, sentence_id, word_pattern

__version__ = "0.1.0"

__all__ = [
    "BANK_FORMAT_VERSION",
    "EmptyStimulusError",
    "ExtractionJob",
    "ExtractorError",
    "JobError",
    "ModelError",
    "RetrievedSentence",
    "StimulusEncoder",
    "build_bank",
    "load_job",
    "retrieve_sentences",
    "sentence_id",
    "word_pattern",
    "__version__",
]

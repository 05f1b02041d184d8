"""Sentence retrieval: word-boundary matching plus seeded reservoir sampling.

The corpus is a newline-delimited UTF-8 text file, one sentence per line.
Matching is case-sensitive and token-exact: the stimulus must not be
embedded in a longer word ("art" never matches inside "part").  When more
than ``cap`` sentences match, a uniform sample is kept via reservoir
sampling; the reservoir RNG is keyed by (seed, stimulus) so each stimulus
samples independently of what else is in the job.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RetrievedSentence:
    sentence_id: str
    text: str
    line_number: int  # 1-based position in the corpus


def word_pattern(stimulus: str) -> re.Pattern:
    return re.compile(rf"(?<!\w){re.escape(stimulus)}(?!\w)")


def sentence_id(text: str) -> str:
    """Stable content hash of the sentence text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _stimulus_rng(seed: int, stimulus: str) -> np.random.Generator:
    digest = hashlib.sha256(stimulus.encode("utf-8")).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "big")])
    )


def retrieve_sentences(
    corpus: str | Path, stimulus: str, cap: int, seed: int
) -> list[RetrievedSentence]:
    """Up to ``cap`` matching sentences, uniformly sampled, in corpus order."""
    pattern = word_pattern(stimulus)
    rng = _stimulus_rng(seed, stimulus)
    reservoir: list[tuple[int, str]] = []
    matches = 0
    with Path(corpus).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.rstrip("\n")
            if not text or not pattern.search(text):
                continue
            if matches < cap:
                reservoir.append((lineno, text))
            else:
                j = int(rng.integers(0, matches + 1))
                if j < cap:
                    reservoir[j] = (lineno, text)
            matches += 1
    if matches == 0:
        log.warning("stimulus %r matched no sentence in %s", stimulus, corpus)
    reservoir.sort()
    return [
        RetrievedSentence(sentence_id=sentence_id(text), text=text, line_number=lineno)
        for lineno, text in reservoir
    ]

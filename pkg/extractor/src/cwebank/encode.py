"""Contextualized vector extraction from a transformer model.

The vector for a stimulus occurrence is the hidden state of the *last*
subtoken the tokenizer assigns to that word, taken from the top layer
(or, with layer mode "sum", summed over every layer including the input
embeddings).  Only the first occurrence in a sentence is used.  Sentences
longer than the model's context window are truncated to a window centered
on the occurrence.
"""

from __future__ import annotations

import logging
import re

import numpy as np
import torch

from .errors import ModelError
from .retrieve import word_pattern

log = logging.getLogger(__name__)


class StimulusEncoder:
    """Loads a model once and encodes (sentence, stimulus) pairs."""

    def __init__(self, model_id: str, layer_mode: str = "top"):
        from transformers import AutoModel, AutoTokenizer
        from transformers.utils import logging as hf_logging

        # Progress bars would corrupt the CLI's stderr error channel.
        hf_logging.disable_progress_bar()

        self.model_id = model_id
        self.layer_mode = layer_mode
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        if not self.tokenizer.is_fast:
            raise ModelError(
                f"{model_id}: tokenizer provides no character offsets; "
                "a fast tokenizer is required to locate subtokens"
            )
        self.model = AutoModel.from_pretrained(model_id)
        self.model.eval()
        self.dimension = int(self.model.config.hidden_size)
        self.max_tokens = int(
            getattr(self.model.config, "max_position_embeddings", 0) or 512
        )
        self._pattern_cache: dict[str, re.Pattern] = {}

    def _occurrence_span(self, text: str, stimulus: str) -> tuple[int, int] | None:
        pattern = self._pattern_cache.get(stimulus)
        if pattern is None:
            pattern = word_pattern(stimulus)
            self._pattern_cache[stimulus] = pattern
        m = pattern.search(text)
        return None if m is None else m.span()

    def encode(self, text: str, stimulus: str) -> np.ndarray | None:
        """Vector for the first occurrence, or None if it cannot be located."""
        span = self._occurrence_span(text, stimulus)
        if span is None:
            log.warning("stimulus %r not found in sentence %r", stimulus, text[:60])
            return None
        start, end = span
        enc = self.tokenizer(
            text, return_offsets_mapping=True, add_special_tokens=False
        )
        offsets = enc["offset_mapping"]
        covering = [
            i for i, (lo, hi) in enumerate(offsets) if lo < end and hi > start and lo != hi
        ]
        if not covering:
            log.warning("tokenizer lost stimulus %r in %r; skipping", stimulus, text[:60])
            return None
        last = max(covering)

        ids = enc["input_ids"]
        if len(ids) > self.max_tokens:
            lo = min(max(0, last - self.max_tokens // 2), len(ids) - self.max_tokens)
            ids = ids[lo : lo + self.max_tokens]
            last -= lo

        with torch.no_grad():
            out = self.model(
                input_ids=torch.tensor([ids]), output_hidden_states=True
            )
        states = out.hidden_states
        if self.layer_mode == "sum":
            vec = torch.stack([h[0, last] for h in states]).sum(dim=0)
        else:
            vec = states[-1][0, last]
        return vec.numpy().astype(np.float32)

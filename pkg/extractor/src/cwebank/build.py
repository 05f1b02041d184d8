"""Assemble a bank directory from an extraction job.

The output follows the embedding-bank contract: ``manifest.json`` with
``format_version`` 1, the model id, the dimension, and per-stimulus
entries (count, sentence ids, file name), plus one raw little-endian
float32 file per stimulus holding ``count x dimension`` values row-major
with no header.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .encode import StimulusEncoder
from .errors import EmptyStimulusError
from .job import ExtractionJob
from .retrieve import retrieve_sentences

log = logging.getLogger(__name__)

BANK_FORMAT_VERSION = 1


def build_bank(job: ExtractionJob) -> Path:
    """Retrieve, encode, and write the bank; returns the output directory."""
    encoder = StimulusEncoder(job.model_id, layer_mode=job.layer_mode)
    vectors: dict[str, np.ndarray] = {}
    sentence_ids: dict[str, list[str]] = {}
    empty: list[str] = []
    for stimulus in job.stimuli:
        retrieved = retrieve_sentences(job.corpus, stimulus, job.cap, job.seed)
        rows: list[np.ndarray] = []
        ids: list[str] = []
        for sent in retrieved:
            vec = encoder.encode(sent.text, stimulus)
            if vec is None:
                continue
            rows.append(vec)
            ids.append(sent.sentence_id)
        if not rows:
            empty.append(stimulus)
            continue
        vectors[stimulus] = np.stack(rows).astype("<f4")
        sentence_ids[stimulus] = ids
        log.info("stimulus %r: %d vectors", stimulus, len(rows))
    if empty:
        raise EmptyStimulusError(empty)

    out = job.output_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "format_version": BANK_FORMAT_VERSION,
        "model_id": job.model_id,
        "dimension": encoder.dimension,
        "stimuli": {},
    }
    for index, stimulus in enumerate(sorted(vectors)):
        fname = f"vectors_{index:05d}.f32"
        (out / fname).write_bytes(np.ascontiguousarray(vectors[stimulus]).tobytes())
        manifest["stimuli"][stimulus] = {
            "count": int(vectors[stimulus].shape[0]),
            "sentence_ids": sentence_ids[stimulus],
            "file": fname,
        }
    with (out / "manifest.json").open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
    return out

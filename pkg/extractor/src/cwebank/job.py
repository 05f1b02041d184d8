"""Extraction job description and its JSON loader."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import JobError

LAYER_MODES = ("top", "sum")


@dataclass(frozen=True)
class ExtractionJob:
    corpus: Path
    stimuli: tuple[str, ...]
    model_id: str
    cap: int
    output_dir: Path
    seed: int = 0
    layer_mode: str = "top"  # "top" layer only, or "sum" over all layers

    def __post_init__(self):
        object.__setattr__(self, "corpus", Path(self.corpus))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "stimuli", tuple(self.stimuli))
        if not self.stimuli:
            raise JobError("job needs at least one stimulus")
        if len(set(self.stimuli)) != len(self.stimuli):
            raise JobError("duplicate stimulus in job")
        if any(not s for s in self.stimuli):
            raise JobError("empty stimulus string in job")
        if self.cap < 1:
            raise JobError(f"sentence cap must be >= 1, got {self.cap}")
        if self.layer_mode not in LAYER_MODES:
            raise JobError(f"layer mode must be one of {LAYER_MODES}, got {self.layer_mode!r}")
        if not self.model_id:
            raise JobError("job needs a model identifier or path")


def load_job(path: str | Path) -> ExtractionJob:
    """Parse a job JSON file.

    Schema: {"corpus", "stimuli", "model", "cap", "output_dir",
    "seed"?, "layer"?}; relative paths resolve against the job file.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"{path}: cannot read job file: {exc}") from exc
    if not isinstance(doc, dict):
        raise JobError(f"{path}: job file must hold a JSON object")
    missing = [k for k in ("corpus", "stimuli", "model", "cap", "output_dir") if k not in doc]
    if missing:
        raise JobError(f"{path}: missing job fields: {', '.join(missing)}")
    base = path.parent
    return ExtractionJob(
        corpus=base / str(doc["corpus"]),
        stimuli=tuple(str(s) for s in doc["stimuli"]),
        model_id=str(doc["model"]),
        cap=int(doc["cap"]),
        output_dir=base / str(doc["output_dir"]),
        seed=int(doc.get("seed", 0)),
        layer_mode=str(doc.get("layer", "top")),
    )

"""Static embedding tables and contextualized embedding banks.

Two storage formats live here:

* SWE text files - GloVe distribution format, one ``word c1 ... cD`` line
  per entry, whitespace separated.
* Bank directories - ``manifest.json`` plus one raw little-endian float32
  vector file per stimulus (row-major, ``count x dimension`` values, no
  header), so files are memory-mappable and seekable by row index.

Tables and banks are immutable after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptionError, FormatError, MissingWordError, ValidationError

BANK_FORMAT_VERSION = 1
_MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class EmbeddingTable:
    """Word -> fixed-dimension vector mapping for static embeddings."""

    dimension: int
    entries: dict[str, np.ndarray]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValidationError(f"dimension must be positive, got {self.dimension}")
        for word, vec in self.entries.items():
            if not word:
                raise ValidationError("empty word in embedding table")
            if vec.shape != (self.dimension,):
                raise ValidationError(
                    f"vector for {word!r} has length {vec.shape[0]}, expected {self.dimension}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"non-finite component in vector for {word!r}")

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries


def lookup(table: EmbeddingTable, word: str) -> np.ndarray:
    """Exact-match, case-sensitive lookup."""
    try:
        return table.entries[word]
    except KeyError:
        raise MissingWordError(word) from None


def lookup_many(table: EmbeddingTable, words: list[str]) -> np.ndarray:
    """Stack vectors for ``words``, reporting every missing word at once."""
    missing = [w for w in words if w not in table.entries]
    if missing:
        raise MissingWordError(missing)
    return np.stack([table.entries[w] for w in words])


def load_swe(path: str | Path, vocab_filter: set[str] | None = None) -> EmbeddingTable:
    """Parse a GloVe-format text file into an EmbeddingTable.

    The dimension is inferred from the first line and enforced on the rest.
    ``vocab_filter`` keeps only the listed words; absent filter words are
    simply not present in the result (callers decide their OOV policy).
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dimension = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            word, comps = parts[0], parts[1:]
            if dimension is None:
                dimension = len(comps)
                if dimension == 0:
                    raise FormatError(f"{path}:{lineno}: no vector components")
            elif len(comps) != dimension:
                raise FormatError(
                    f"{path}:{lineno}: expected {dimension} components, got {len(comps)}"
                )
            if vocab_filter is not None and word not in vocab_filter:
                continue
            if word in entries:
                raise FormatError(f"{path}:{lineno}: duplicate word {word!r}")
            try:
                vec = np.array(comps, dtype=np.float64)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: unparsable vector component") from None
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"{path}:{lineno}: non-finite component for {word!r}")
            entries[word] = vec
    if dimension is None:
        raise FormatError(f"{path}: empty embedding file")
    return EmbeddingTable(dimension=dimension, entries=entries)


@dataclass(frozen=True)
class EmbeddingBank:
    """Per-stimulus collections of contextualized vectors with provenance."""

    dimension: int
    model_id: str
    stimuli: dict[str, np.ndarray] = field(default_factory=dict)  # word -> (n_s, dim)
    sentence_ids: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValidationError(f"dimension must be positive, got {self.dimension}")
        if set(self.stimuli) != set(self.sentence_ids):
            raise ValidationError("stimuli and sentence_ids cover different words")
        for word, vecs in self.stimuli.items():
            ids = self.sentence_ids[word]
            if vecs.ndim != 2 or vecs.shape[0] < 1:
                raise ValidationError(f"stimulus {word!r} needs at least one vector")
            if vecs.shape[1] != self.dimension:
                raise ValidationError(
                    f"stimulus {word!r} has vectors of length {vecs.shape[1]}, "
                    f"expected {self.dimension}"
                )
            if len(ids) != vecs.shape[0]:
                raise ValidationError(
                    f"stimulus {word!r}: {len(ids)} sentence ids for {vecs.shape[0]} vectors"
                )
            if not np.all(np.isfinite(vecs)):
                raise ValidationError(f"non-finite component in vectors for {word!r}")

    def count(self, word: str) -> int:
        if word not in self.stimuli:
            raise MissingWordError(word)
        return self.stimuli[word].shape[0]


def _vector_filename(index: int) -> str:
    return f"vectors_{index:05d}.f32"


def write_bank(bank: EmbeddingBank, path: str | Path) -> None:
    """Write the bank directory format; round-trips bit-exactly via load_bank."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "format_version": BANK_FORMAT_VERSION,
        "model_id": bank.model_id,
        "dimension": bank.dimension,
        "stimuli": {},
    }
    try:
        for index, word in enumerate(sorted(bank.stimuli)):
            vecs = np.ascontiguousarray(bank.stimuli[word], dtype="<f4")
            fname = _vector_filename(index)
            (path / fname).write_bytes(vecs.tobytes())
            manifest["stimuli"][word] = {
                "count": int(vecs.shape[0]),
                "sentence_ids": list(bank.sentence_ids[word]),
                "file": fname,
            }
        with (path / _MANIFEST_NAME).open("w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
    except OSError as exc:
        raise CorruptionError(f"failed writing bank at {path}: {exc}") from exc


def load_bank(path: str | Path) -> EmbeddingBank:
    """Load and validate a bank directory written by :func:`write_bank`."""
    path = Path(path)
    manifest_path = path / _MANIFEST_NAME
    if not manifest_path.is_file():
        raise FormatError(f"{path}: missing {_MANIFEST_NAME}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if manifest.get("format_version") != BANK_FORMAT_VERSION:
        raise FormatError(
            f"{manifest_path}: unsupported format_version {manifest.get('format_version')!r}"
        )
    dimension = manifest.get("dimension")
    if not isinstance(dimension, int) or dimension < 1:
        raise FormatError(f"{manifest_path}: bad dimension {dimension!r}")

    stimuli: dict[str, np.ndarray] = {}
    sentence_ids: dict[str, list[str]] = {}
    for word, entry in manifest.get("stimuli", {}).items():
        count = entry.get("count")
        ids = entry.get("sentence_ids")
        fname = entry.get("file")
        if not isinstance(count, int) or count < 1 or not isinstance(ids, list):
            raise FormatError(f"{manifest_path}: bad entry for stimulus {word!r}")
        if len(ids) != count:
            raise FormatError(
                f"{manifest_path}: stimulus {word!r} lists {len(ids)} sentence ids "
                f"for count {count}"
            )
        vec_path = path / fname
        if not vec_path.is_file():
            raise FormatError(f"{path}: missing vector file {fname!r} for stimulus {word!r}")
        raw = vec_path.read_bytes()
        expected = count * dimension * 4
        if len(raw) != expected:
            raise CorruptionError(
                f"{vec_path}: {len(raw)} bytes, expected {expected} "
                f"({count} x {dimension} float32)"
            )
        vecs = np.frombuffer(raw, dtype="<f4").reshape(count, dimension)
        stimuli[word] = vecs
        sentence_ids[word] = [str(s) for s in ids]
    return EmbeddingBank(
        dimension=dimension,
        model_id=str(manifest.get("model_id", "")),
        stimuli=stimuli,
        sentence_ids=sentence_ids,
    )

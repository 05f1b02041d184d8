"""Association-test statistical kernel.

Implements cosine similarity, the differential association of a word with
two attribute sets, its standardized (WEFAT-style) variant, the two-target
test statistic, Cohen's-d effect size, and the one-sided permutation test
over equal-size repartitions of the targets.

Conventions fixed here and used package-wide:

* standard deviation is the population form (divide by n);
* the permutation count uses strict ``>``, so degenerate all-equal cases
  report p = 0 rather than 1 (the tie-counting ``>=`` variant is a known
  alternative and is deliberately not implemented);
* exact enumeration is limited to 200,000 partitions, above which callers
  are directed to Monte Carlo (default 10,000 partitions).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .embed_store import EmbeddingTable, lookup, lookup_many
from .errors import (
    BudgetExceededError,
    DegenerateAssociationError,
    DegenerateEffectError,
    DegenerateVectorError,
    FormatError,
    ParameterError,
    ValidationError,
)

EXACT_PARTITION_BUDGET = 200_000
DEFAULT_MC_COUNT = 10_000


@dataclass(frozen=True)
class WeatSpec:
    """The four stimulus sets defining one association test."""

    X: tuple[str, ...]
    Y: tuple[str, ...]
    A: tuple[str, ...]
    B: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(self.X))
        object.__setattr__(self, "Y", tuple(self.Y))
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))
        for name in ("X", "Y", "A", "B"):
            words = getattr(self, name)
            if len(set(words)) != len(words):
                raise ValidationError(f"{self.label or 'spec'}: duplicate word in {name}")
        if not (len(self.X) == len(self.Y) >= 1):
            raise ValidationError(f"{self.label or 'spec'}: |X| must equal |Y| and be >= 1")
        if not (len(self.A) == len(self.B) >= 1):
            raise ValidationError(f"{self.label or 'spec'}: |A| must equal |B| and be >= 1")
        if set(self.X) & set(self.Y):
            raise ValidationError(f"{self.label or 'spec'}: X and Y overlap")

    @property
    def targets(self) -> tuple[str, ...]:
        return self.X + self.Y

    @property
    def stimuli(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for w in self.X + self.Y + self.A + self.B:
            seen.setdefault(w)
        return tuple(seen)


def load_spec(path: str | Path) -> WeatSpec:
    """Load a WeatSpec JSON file ({"label","X","Y","A","B"})."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    for key in ("X", "Y", "A", "B"):
        if key not in doc or not isinstance(doc[key], list):
            raise FormatError(f"{path}: field {key!r} must be an array of words")
        for w in doc[key]:
            if not isinstance(w, str) or not w:
                raise FormatError(f"{path}: field {key!r} contains a non-word entry")
    return WeatSpec(
        X=tuple(doc["X"]),
        Y=tuple(doc["Y"]),
        A=tuple(doc["A"]),
        B=tuple(doc["B"]),
        label=str(doc.get("label", path.stem)),
    )


@dataclass(frozen=True)
class PValueMode:
    """Permutation-test mode: exact enumeration or seeded Monte Carlo."""

    kind: str  # "exact" | "mc"
    count: int = DEFAULT_MC_COUNT
    seed: int = 0

    @classmethod
    def exact(cls) -> "PValueMode":
        return cls(kind="exact")

    @classmethod
    def monte_carlo(cls, count: int = DEFAULT_MC_COUNT, seed: int = 0) -> "PValueMode":
        if count < 1:
            raise ParameterError(f"monte-carlo count must be positive, got {count}")
        return cls(kind="mc", count=count, seed=seed)

    def describe(self) -> str:
        return "exact" if self.kind == "exact" else f"monte-carlo({self.count})"


@dataclass(frozen=True)
class WeatOutcome:
    effect_size: float
    p_value: float
    test_statistic: float
    p_mode: str


def unit_rows(mat: np.ndarray) -> np.ndarray:
    """Normalize rows to unit norm; zero rows are a degenerate-vector error."""
    norms = np.linalg.norm(mat, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateVectorError("zero-norm vector")
    return mat / norms


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("zero-norm vector in cosine")
    return float(np.dot(a, b) / (na * nb))


def assoc_scores_matrix(
    targets_u: np.ndarray, a_u: np.ndarray, b_u: np.ndarray
) -> np.ndarray:
    """s(w, A, B) per target row; all inputs must be unit-normalized rows."""
    return (targets_u @ a_u.T).mean(axis=1) - (targets_u @ b_u.T).mean(axis=1)


def diff_assoc(w: str, A: list[str], B: list[str], emb: EmbeddingTable) -> float:
    """Mean cosine of ``w`` with A minus mean cosine with B."""
    wv = unit_rows(lookup(emb, w)[None, :])
    a_u = unit_rows(lookup_many(emb, list(A)))
    b_u = unit_rows(lookup_many(emb, list(B)))
    return float(assoc_scores_matrix(wv, a_u, b_u)[0])


def std_assoc(w: str, A: list[str], B: list[str], emb: EmbeddingTable) -> float:
    """Association score: diff in mean cosines over the std-dev of all cosines."""
    wv = unit_rows(lookup(emb, w)[None, :])
    ab_u = unit_rows(lookup_many(emb, list(A) + list(B)))
    cosines = (wv @ ab_u.T)[0]
    n_a = len(A)
    sd = float(np.std(cosines))
    if sd == 0.0:
        raise DegenerateAssociationError(
            f"all cosines of {w!r} with A u B are equal; association score undefined"
        )
    return float((np.mean(cosines[:n_a]) - np.mean(cosines[n_a:])) / sd)


def _target_scores(spec: WeatSpec, emb: EmbeddingTable) -> np.ndarray:
    targets_u = unit_rows(lookup_many(emb, list(spec.targets)))
    a_u = unit_rows(lookup_many(emb, list(spec.A)))
    b_u = unit_rows(lookup_many(emb, list(spec.B)))
    return assoc_scores_matrix(targets_u, a_u, b_u)


def test_statistic(spec: WeatSpec, emb: EmbeddingTable) -> float:
    s = _target_scores(spec, emb)
    n = len(spec.X)
    return float(np.sum(s[:n]) - np.sum(s[n:]))


def effect_size_from_scores(s: np.ndarray, n_x: int) -> float:
    sd = float(np.std(s))
    if sd == 0.0:
        raise DegenerateEffectError("association scores have zero variance")
    return float((np.mean(s[:n_x]) - np.mean(s[n_x:])) / sd)


def effect_size(spec: WeatSpec, emb: EmbeddingTable) -> float:
    return effect_size_from_scores(_target_scores(spec, emb), len(spec.X))


def pvalue_from_scores(s: np.ndarray, n_x: int, mode: PValueMode) -> float:
    """One-sided permutation p from per-target association scores.

    A partition's statistic depends only on which targets land in the first
    set: stat = 2 * sum(chosen) - sum(all), so enumeration and sampling both
    reduce to index selection.
    """
    s = np.asarray(s, dtype=np.float64)
    m = s.shape[0]
    total = float(np.sum(s))
    observed = 2.0 * float(np.sum(s[:n_x])) - total

    if mode.kind == "exact":
        n_partitions = math.comb(m, n_x)
        if n_partitions > EXACT_PARTITION_BUDGET:
            raise BudgetExceededError(
                f"exact mode would enumerate {n_partitions} partitions "
                f"(budget {EXACT_PARTITION_BUDGET}); use monte-carlo mode"
            )
        exceed = 0
        for chosen in combinations(range(m), n_x):
            stat = 2.0 * float(np.sum(s[list(chosen)])) - total
            if stat > observed:
                exceed += 1
        return exceed / n_partitions

    if mode.kind != "mc":
        raise ParameterError(f"unknown p-value mode {mode.kind!r}")
    rng = np.random.default_rng(mode.seed)
    exceed = 0
    remaining = mode.count
    # Chunked so very large counts stay within a bounded working set.
    chunk = max(1, min(remaining, 4_000_000 // max(m, 1)))
    while remaining > 0:
        k = min(chunk, remaining)
        keys = rng.random((k, m))
        # Sorted so a re-drawn identity subset sums in the same order as the
        # observed statistic and ties exactly (strict ">" must exclude it).
        chosen = np.sort(np.argpartition(keys, n_x - 1, axis=1)[:, :n_x], axis=1)
        stats = 2.0 * np.sum(s[chosen], axis=1) - total
        exceed += int(np.sum(stats > observed))
        remaining -= k
    return exceed / mode.count


def permutation_pvalue(spec: WeatSpec, emb: EmbeddingTable, mode: PValueMode) -> float:
    return pvalue_from_scores(_target_scores(spec, emb), len(spec.X), mode)


def run_weat(spec: WeatSpec, emb: EmbeddingTable, mode: PValueMode) -> WeatOutcome:
    """Effect size, test statistic, and permutation p in one pass."""
    s = _target_scores(spec, emb)
    n_x = len(spec.X)
    return WeatOutcome(
        effect_size=effect_size_from_scores(s, n_x),
        p_value=pvalue_from_scores(s, n_x, mode),
        test_statistic=float(np.sum(s[:n_x]) - np.sum(s[n_x:])),
        p_mode=mode.describe(),
    )

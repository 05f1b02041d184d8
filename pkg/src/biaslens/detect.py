"""Detection of attributes associated with an intersectional group.

Intersectional detection scores every candidate word against pairs formed
by the target cell versus each cell of a two-category group grid, and keeps
words whose association score exceeds a threshold in at least one pair.
The threshold is either supplied or selected from a ROC sweep maximizing
TPR - FPR over the observed scores.

Emergent detection then removes words that are also associated with a
single constituent category (the target's race-only or gender-only group
versus each alternative).  Two removal modes exist because the prose and
the set-algebra formula for this step disagree:

* ``any-constituent`` (default): drop a word if it exceeds the threshold
  in ANY single-category pair;
* ``all-constituents``: apply the union-of-differences formula literally,
  which only drops words exceeding the threshold in EVERY pair (including
  the always-empty self-pairs, so in practice it removes nothing).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embed_store import EmbeddingTable, lookup_many
from .errors import (
    CoverageError,
    ParameterError,
    UndefinedRocError,
    ValidationError,
)
from .weat import std_assoc

ANY_CONSTITUENT = "any-constituent"
ALL_CONSTITUENTS = "all-constituents"
_CELL_SEP = "|"


@dataclass(frozen=True)
class GroupGrid:
    """Two crossed categories and the given-name lists for each cell."""

    category_names: tuple[str, str]
    labels_a: tuple[str, ...]
    labels_b: tuple[str, ...]
    name_sets: dict[str, tuple[str, ...]]  # "labelA|labelB" -> names

    def __post_init__(self):
        if len(self.labels_a) < 2 or len(self.labels_b) < 2:
            raise ValidationError("each category needs at least two subcategories")
        expected = {self.cell_id(a, b) for a in self.labels_a for b in self.labels_b}
        if set(self.name_sets) != expected:
            raise ValidationError(
                f"name_sets must cover every cell: expected {sorted(expected)}, "
                f"got {sorted(self.name_sets)}"
            )
        seen: dict[str, str] = {}
        for cell, names in self.name_sets.items():
            if len(names) < 1:
                raise ValidationError(f"cell {cell!r} has no names")
            if len(set(names)) != len(names):
                raise ValidationError(f"cell {cell!r} has duplicate names")
            for n in names:
                if n in seen:
                    raise ValidationError(
                        f"name {n!r} appears in both {seen[n]!r} and {cell!r}"
                    )
                seen[n] = cell

    @staticmethod
    def cell_id(label_a: str, label_b: str) -> str:
        return f"{label_a}{_CELL_SEP}{label_b}"

    def split_cell(self, cell: str) -> tuple[str, str]:
        parts = cell.split(_CELL_SEP)
        if len(parts) != 2 or parts[0] not in self.labels_a or parts[1] not in self.labels_b:
            raise ParameterError(f"unknown cell {cell!r}")
        return parts[0], parts[1]

    def cells(self) -> list[str]:
        return [self.cell_id(a, b) for a in self.labels_a for b in self.labels_b]

    def names(self, cell: str) -> tuple[str, ...]:
        self.split_cell(cell)
        return self.name_sets[cell]

    def constituent_names_a(self, label_a: str) -> tuple[str, ...]:
        """All names sharing a first-category label (e.g. one race, any gender)."""
        if label_a not in self.labels_a:
            raise ParameterError(f"unknown {self.category_names[0]} label {label_a!r}")
        out: list[str] = []
        for b in self.labels_b:
            out.extend(self.name_sets[self.cell_id(label_a, b)])
        return tuple(out)

    def constituent_names_b(self, label_b: str) -> tuple[str, ...]:
        if label_b not in self.labels_b:
            raise ParameterError(f"unknown {self.category_names[1]} label {label_b!r}")
        out: list[str] = []
        for a in self.labels_a:
            out.extend(self.name_sets[self.cell_id(a, label_b)])
        return tuple(out)

    @classmethod
    def from_dict(cls, doc: dict) -> "GroupGrid":
        try:
            cats = doc["categories"]
            name_sets = {
                cell: tuple(names) for cell, names in doc["name_sets"].items()
            }
            return cls(
                category_names=(str(cats[0]["name"]), str(cats[1]["name"])),
                labels_a=tuple(cats[0]["labels"]),
                labels_b=tuple(cats[1]["labels"]),
                name_sets=name_sets,
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise ValidationError(f"malformed group grid document: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "categories": [
                {"name": self.category_names[0], "labels": list(self.labels_a)},
                {"name": self.category_names[1], "labels": list(self.labels_b)},
            ],
            "name_sets": {cell: list(names) for cell, names in self.name_sets.items()},
        }


@dataclass(frozen=True)
class DetectionConfig:
    target_cell: str
    candidate_pool: tuple[str, ...]
    threshold: float | None = None  # None -> select via ROC from ground truth
    eibd_removal: str = ANY_CONSTITUENT

    def __post_init__(self):
        object.__setattr__(self, "candidate_pool", tuple(self.candidate_pool))
        if not self.candidate_pool:
            raise ValidationError("candidate pool is empty")
        if len(set(self.candidate_pool)) != len(self.candidate_pool):
            raise ValidationError("candidate pool has duplicates")
        if self.eibd_removal not in (ANY_CONSTITUENT, ALL_CONSTITUENTS):
            raise ParameterError(f"unknown removal mode {self.eibd_removal!r}")
        if self.threshold is not None and not (
            isinstance(self.threshold, (int, float)) and self.threshold == self.threshold
        ):
            raise ValidationError(f"threshold must be finite, got {self.threshold!r}")


@dataclass(frozen=True)
class ThresholdChoice:
    threshold: float
    tpr: float
    fpr: float
    roc_points: tuple[tuple[float, float, float], ...]  # (threshold, tpr, fpr)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "roc_points": [list(p) for p in self.roc_points],
        }


@dataclass(frozen=True)
class ConfusionSummary:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / (self.tp + self.tn + self.fp + self.fn)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class DetectionResult:
    detected: frozenset[str]
    per_word_scores: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    threshold_used: float = 0.0
    confusion: ConfusionSummary | None = None
    roc: ThresholdChoice | None = None

    @property
    def accuracy(self) -> float | None:
        return None if self.confusion is None else self.confusion.accuracy

    def to_dict(self) -> dict:
        return {
            "detected": sorted(self.detected),
            "threshold_used": self.threshold_used,
            "per_word_scores": {
                w: [[pair, score] for pair, score in pairs]
                for w, pairs in self.per_word_scores.items()
            },
            "confusion": None if self.confusion is None else self.confusion.to_dict(),
            "roc": None if self.roc is None else self.roc.to_dict(),
        }


def score_attributes(
    words: list[str],
    pair: tuple[list[str], list[str]],
    emb: EmbeddingTable,
) -> dict[str, float]:
    """Association score of each word with the (first, second) name sets."""
    first, second = list(pair[0]), list(pair[1])
    lookup_many(emb, first + second + list(words))  # one shot: report all missing
    if first == second:
        return {w: 0.0 for w in words}
    return {w: std_assoc(w, first, second, emb) for w in words}


def select_threshold(
    scores: dict[str, float], labels: dict[str, bool]
) -> ThresholdChoice:
    """Pick the observed score maximizing TPR - FPR under the rule score > t.

    Ties go to the highest TP, then to the lowest threshold, keeping the
    choice deterministic.
    """
    uncovered = [w for w in scores if w not in labels]
    if uncovered:
        raise CoverageError(f"labels missing for: {', '.join(sorted(uncovered))}")
    positives = [w for w in scores if labels[w]]
    negatives = [w for w in scores if not labels[w]]
    if not positives or not negatives:
        raise UndefinedRocError("need at least one positive and one negative label")

    candidates = sorted(set(scores.values()))
    points: list[tuple[float, float, float]] = []
    best: tuple[float, int, float] | None = None  # (tpr - fpr, tp, -threshold)
    best_point: tuple[float, float, float] | None = None
    for t in candidates:
        tp = sum(1 for w in positives if scores[w] > t)
        fp = sum(1 for w in negatives if scores[w] > t)
        tpr = tp / len(positives)
        fpr = fp / len(negatives)
        points.append((t, tpr, fpr))
        key = (tpr - fpr, tp, -t)
        if best is None or key > best:
            best = key
            best_point = (t, tpr, fpr)
    assert best_point is not None
    return ThresholdChoice(
        threshold=best_point[0],
        tpr=best_point[1],
        fpr=best_point[2],
        roc_points=tuple(points),
    )


def evaluate(detected: set[str], truth: dict[str, bool]) -> ConfusionSummary:
    """Confusion counts of ``detected`` against ground truth over truth's domain."""
    outside = [w for w in detected if w not in truth]
    if outside:
        raise CoverageError(
            f"detected words outside truth domain: {', '.join(sorted(outside))}"
        )
    tp = sum(1 for w, pos in truth.items() if pos and w in detected)
    fn = sum(1 for w, pos in truth.items() if pos and w not in detected)
    fp = sum(1 for w, pos in truth.items() if not pos and w in detected)
    tn = sum(1 for w, pos in truth.items() if not pos and w not in detected)
    return ConfusionSummary(tp=tp, fp=fp, tn=tn, fn=fn)


def _pair_scores(
    grid: GroupGrid,
    cfg: DetectionConfig,
    emb: EmbeddingTable,
) -> tuple[dict[str, list[tuple[str, float]]], list[str]]:
    """Scores of every pool word against (target cell, each cell) pairs."""
    target_names = list(grid.names(cfg.target_cell))
    per_word: dict[str, list[tuple[str, float]]] = {w: [] for w in cfg.candidate_pool}
    pair_ids = []
    for cell in grid.cells():
        pair_id = f"{cfg.target_cell} vs {cell}"
        pair_ids.append(pair_id)
        scores = score_attributes(
            list(cfg.candidate_pool), (target_names, list(grid.names(cell))), emb
        )
        for w, s in scores.items():
            per_word[w].append((pair_id, s))
    return per_word, pair_ids


def _resolve_threshold(
    per_word: dict[str, list[tuple[str, float]]],
    cfg: DetectionConfig,
    truth: dict[str, bool] | None,
    self_pair_id: str,
) -> tuple[float, ThresholdChoice | None]:
    if cfg.threshold is not None:
        return float(cfg.threshold), None
    if truth is None:
        raise ParameterError("no threshold given and no ground truth to select one from")
    # Decision score per word: best association over the non-self pairs,
    # matching the union detection rule.
    decision = {
        w: max(s for pair, s in pairs if pair != self_pair_id)
        for w, pairs in per_word.items()
    }
    choice = select_threshold(decision, truth)
    return choice.threshold, choice


def detect_intersectional(
    grid: GroupGrid,
    cfg: DetectionConfig,
    emb: EmbeddingTable,
    truth: dict[str, bool] | None = None,
) -> DetectionResult:
    """Union over (target cell vs each cell) of words scoring above threshold."""
    per_word, _ = _pair_scores(grid, cfg, emb)
    self_pair_id = f"{cfg.target_cell} vs {cfg.target_cell}"
    threshold, roc = _resolve_threshold(per_word, cfg, truth, self_pair_id)
    detected = frozenset(
        w for w, pairs in per_word.items() if any(s > threshold for _, s in pairs)
    )
    confusion = evaluate(set(detected), truth) if truth is not None else None
    return DetectionResult(
        detected=detected,
        per_word_scores=per_word,
        threshold_used=threshold,
        confusion=confusion,
        roc=roc,
    )


def _constituent_pairs(
    grid: GroupGrid, target_cell: str
) -> list[tuple[str, tuple[str, ...], tuple[str, ...]]]:
    label_a, label_b = grid.split_cell(target_cell)
    cat_a, cat_b = grid.category_names
    pairs: list[tuple[str, tuple[str, ...], tuple[str, ...]]] = []
    for other in grid.labels_a:
        pairs.append(
            (
                f"{cat_a}:{label_a} vs {cat_a}:{other}",
                grid.constituent_names_a(label_a),
                grid.constituent_names_a(other),
            )
        )
    for other in grid.labels_b:
        pairs.append(
            (
                f"{cat_b}:{label_b} vs {cat_b}:{other}",
                grid.constituent_names_b(label_b),
                grid.constituent_names_b(other),
            )
        )
    return pairs


def detect_emergent(
    grid: GroupGrid,
    cfg: DetectionConfig,
    emb: EmbeddingTable,
    truth: dict[str, bool] | None = None,
    intersectional: DetectionResult | None = None,
    intersectional_truth: dict[str, bool] | None = None,
) -> DetectionResult:
    """Intersectional detection minus single-category associations.

    The threshold selected (or given) for the intersectional step is reused
    for the constituent-category pairs.  ``intersectional_truth`` lets the
    threshold be picked against the intersectional labels while ``truth``
    scores the emergent outcome.
    """
    if intersectional is None:
        intersectional = detect_intersectional(
            grid, cfg, emb, truth=intersectional_truth if cfg.threshold is None else None
        )
    threshold = intersectional.threshold_used
    w_ib = sorted(intersectional.detected)

    per_word = {w: list(intersectional.per_word_scores[w]) for w in intersectional.per_word_scores}
    exceeded: dict[str, set[str]] = {w: set() for w in w_ib}  # word -> pair ids above t
    pair_ids: list[str] = []
    if w_ib:
        for pair_id, first, second in _constituent_pairs(grid, cfg.target_cell):
            pair_ids.append(pair_id)
            scores = score_attributes(w_ib, (list(first), list(second)), emb)
            for w, s in scores.items():
                per_word[w].append((pair_id, s))
                if s > threshold:
                    exceeded[w].add(pair_id)

    if cfg.eibd_removal == ANY_CONSTITUENT:
        detected = frozenset(w for w in w_ib if not exceeded[w])
    else:
        # Literal union of per-pair differences: a word survives unless it
        # exceeds the threshold in every pair.
        detected = frozenset(w for w in w_ib if set(pair_ids) - exceeded[w])

    confusion = evaluate(set(detected), truth) if truth is not None else None
    return DetectionResult(
        detected=detected,
        per_word_scores=per_word,
        threshold_used=threshold,
        confusion=confusion,
        roc=intersectional.roc,
    )

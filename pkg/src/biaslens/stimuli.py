"""Bundled stimulus data: intersectional test definitions, group name lists,
and the 98-word labeled validation pool.

The data ships as a versioned JSON file under ``biaslens/data``; the
``BIASLENS_DATA`` environment variable can point at a directory holding a
replacement ``stimuli_v1.json``.  Externally defined association tests
(e.g. the C1-C10 series, whose word lists come from prior work and are not
bundled) load through :func:`load_spec`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .detect import GroupGrid
from .errors import ParameterError
from .weat import WeatSpec, load_spec  # noqa: F401  (load_spec re-exported)

_DATA_FILE = "stimuli_v1.json"
DATA_ENV_VAR = "BIASLENS_DATA"

BUILTIN_TEST_IDS = ("I1", "I2", "I3", "I4")

# Shorthand cell ids accepted by the CLI.
CELL_ALIASES = {
    "AF": "african|female",
    "AM": "african|male",
    "EF": "european|female",
    "EM": "european|male",
    "MF": "mexican|female",
    "MM": "mexican|male",
}


@lru_cache(maxsize=1)
def _load_data() -> dict:
    override = os.environ.get(DATA_ENV_VAR)
    if override:
        return json.loads((Path(override) / _DATA_FILE).read_text(encoding="utf-8"))
    ref = resources.files("biaslens").joinpath("data", _DATA_FILE)
    return json.loads(ref.read_text(encoding="utf-8"))


def resolve_cell(cell: str) -> str:
    return CELL_ALIASES.get(cell, cell)


@dataclass(frozen=True)
class ValidationDataset:
    """Labeled attribute pool used to evaluate detection."""

    attributes: dict[str, tuple[str, ...]]  # group label -> words
    random_chance: dict[str, float]
    exclusions: dict[str, tuple[str, ...]]  # builtin test id -> excluded words

    def pool(self) -> tuple[str, ...]:
        words: set[str] = set()
        for ws in self.attributes.values():
            words.update(ws)
        return tuple(sorted(words))

    def labels_for(self, group: str) -> dict[str, bool]:
        """Ground-truth labels over the full pool for one group."""
        if group not in self.attributes:
            raise ParameterError(f"unknown validation group {group!r}")
        positives = set(self.attributes[group])
        return {w: w in positives for w in self.pool()}


def validation_set() -> ValidationDataset:
    data = _load_data()
    groups = data["validation_groups"]
    exclusions = {
        test_id: tuple(entry["excluded"])
        for test_id, entry in data["builtin_tests"].items()
    }
    return ValidationDataset(
        attributes={label: tuple(g["words"]) for label, g in groups.items()},
        random_chance={label: float(g["random_chance"]) for label, g in groups.items()},
        exclusions=exclusions,
    )


def group_names(cell: str) -> tuple[str, ...]:
    """Given-name list for one intersectional cell ('AF' or 'african|female')."""
    names = _load_data()["names"]
    key = resolve_cell(cell)
    if key not in names:
        raise ParameterError(f"unknown cell {cell!r}")
    return tuple(names[key])


def builtin_grid() -> GroupGrid:
    """The race x gender grid with the bundled name lists."""
    names = _load_data()["names"]
    return GroupGrid(
        category_names=("race", "gender"),
        labels_a=("african", "european", "mexican"),
        labels_b=("female", "male"),
        name_sets={cell: tuple(ns) for cell, ns in names.items()},
    )


def builtin_test(test_id: str) -> WeatSpec:
    """One of the bundled intersectional association tests (I1-I4)."""
    tests = _load_data()["builtin_tests"]
    if test_id not in tests:
        raise ParameterError(
            f"unknown builtin test {test_id!r}; available: {', '.join(sorted(tests))}"
        )
    entry = tests[test_id]
    return WeatSpec(
        X=tuple(group_names(entry["X_cell"])),
        Y=tuple(group_names(entry["Y_cell"])),
        A=tuple(entry["A"]),
        B=tuple(entry["B"]),
        label=entry["label"],
    )


_RACE_WORDS = {"african": "African American", "european": "European American", "mexican": "Mexican American"}
_GENDER_WORDS = {"female": "Females", "male": "Males"}


def validation_group_label(cell: str, emergent: bool = False) -> str:
    """Validation-group title for a grid cell, e.g. AF ->
    'Intersectional Biases of African American Females'."""
    race, gender = resolve_cell(cell).split("|")
    if race not in _RACE_WORDS or gender not in _GENDER_WORDS:
        raise ParameterError(f"no validation group for cell {cell!r}")
    prefix = "Emergent Intersectional Biases" if emergent else "Intersectional Biases"
    return f"{prefix} of {_RACE_WORDS[race]} {_GENDER_WORDS[gender]}"


def balance_attributes(
    a: list[str], b: list[str], seed: int
) -> tuple[tuple[str, ...], tuple[str, ...], dict]:
    """Equalize two attribute sets by seeded random subsampling of the longer.

    Returns the balanced sets plus a record of what was dropped, so reports
    can state exactly how the sets were trimmed.
    """
    rng = np.random.default_rng(seed)
    a, b = list(a), list(b)
    record: dict = {"seed": seed, "dropped_from_a": [], "dropped_from_b": []}
    if len(a) > len(b):
        keep = sorted(rng.choice(len(a), size=len(b), replace=False))
        record["dropped_from_a"] = [a[i] for i in range(len(a)) if i not in set(keep)]
        a = [a[i] for i in keep]
    elif len(b) > len(a):
        keep = sorted(rng.choice(len(b), size=len(a), replace=False))
        record["dropped_from_b"] = [b[i] for i in range(len(b)) if i not in set(keep)]
        b = [b[i] for i in keep]
    return tuple(a), tuple(b), record

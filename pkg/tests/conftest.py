"""Shared builders for synthetic embedding data.

The planted-bias construction gives every grid cell a centroid composed of
a race direction, a gender direction, and a cell-unique direction, all
mutually orthogonal.  Attributes planted on a cell-unique direction are
"emergent" (associated with the intersection only); attributes planted on
a race or gender direction are shared with that constituent category.

Name perturbations are sign-balanced per cell and axis (half the names get
+delta, half -delta), so a word with no planted association has a mean
cosine difference of exactly zero against every name-set pair while the
per-name spread stays positive.  Its standardized association score is
therefore ~0, whereas planted associations score ~2 -- the separation the
accuracy-1.0 tests rely on.  (An i.i.d. perturbation would not give this:
the standardized score of pure noise over noise is O(1).)
"""

from __future__ import annotations

import numpy as np
import pytest

from biaslens.detect import GroupGrid
from biaslens.embed_store import EmbeddingBank, EmbeddingTable

RACES = ("african", "european", "mexican")
GENDERS = ("female", "male")


def toy_table(entries: dict[str, list[float]]) -> EmbeddingTable:
    vecs = {w: np.asarray(v, dtype=np.float64) for w, v in entries.items()}
    dim = next(iter(vecs.values())).shape[0]
    return EmbeddingTable(dimension=dim, entries=vecs)


class PlantedWorld:
    """A synthetic table with known group structure and ground truth."""

    def __init__(self, seed: int = 7, names_per_cell: int = 4, noise: float = 0.05):
        rng = np.random.default_rng(seed)
        # Axis-aligned directions: 3 races + 2 genders + 6 cell-unique + 5 spares.
        dim = 16
        basis = np.eye(dim)
        self.race_dir = {r: basis[i] for i, r in enumerate(RACES)}
        self.gender_dir = {g: basis[3 + i] for i, g in enumerate(GENDERS)}
        cells = [(r, g) for r in RACES for g in GENDERS]
        self.cell_dir = {c: basis[5 + i] for i, c in enumerate(cells)}
        self.spare = basis[11:]

        def balanced_signs(n: int) -> np.ndarray:
            # Per axis: half the names at +1, half at -1, order shuffled.
            signs = np.empty((n, dim))
            for k in range(dim):
                col = np.where(np.arange(n) < n // 2, 1.0, -1.0)
                signs[:, k] = rng.permutation(col)
            return signs

        entries: dict[str, np.ndarray] = {}
        name_sets: dict[str, tuple[str, ...]] = {}
        for r, g in cells:
            centroid = self.race_dir[r] + self.gender_dir[g] + self.cell_dir[(r, g)]
            names = tuple(f"name_{r}_{g}_{k}" for k in range(names_per_cell))
            name_sets[f"{r}|{g}"] = names
            signs = balanced_signs(names_per_cell)
            for i, n in enumerate(names):
                entries[n] = centroid + noise * signs[i]
        self.grid = GroupGrid(
            category_names=("race", "gender"),
            labels_a=RACES,
            labels_b=GENDERS,
            name_sets=name_sets,
        )

        # Emergent attributes: one per cell, on the cell-unique direction.
        self.emergent = {}
        for r, g in cells:
            w = f"attr_only_{r}_{g}"
            entries[w] = self.cell_dir[(r, g)]
            self.emergent[f"{r}|{g}"] = w
        # Shared attributes: one per gender and per race direction.
        self.gender_shared = {}
        for g in GENDERS:
            w = f"attr_{g}_shared"
            entries[w] = self.gender_dir[g]
            self.gender_shared[g] = w
        self.race_shared = {}
        for r in RACES:
            w = f"attr_{r}_shared"
            entries[w] = self.race_dir[r]
            self.race_shared[r] = w
        # True negatives: words on the spare directions.
        self.random_words = tuple(f"random_{k}" for k in range(5))
        for k, w in enumerate(self.random_words):
            entries[w] = self.spare[k].copy()

        self.table = EmbeddingTable(dimension=dim, entries=entries)
        self.pool = tuple(sorted(set(self.emergent.values())
                                 | set(self.gender_shared.values())
                                 | set(self.race_shared.values())
                                 | set(self.random_words)))

    def ibd_truth(self, cell: str) -> dict[str, bool]:
        """Words geometrically associated with ``cell`` (emergent + shared)."""
        race, gender = cell.split("|")
        positives = {
            self.emergent[cell],
            self.gender_shared[gender],
            self.race_shared[race],
        }
        return {w: w in positives for w in self.pool}

    def eibd_truth(self, cell: str) -> dict[str, bool]:
        positives = {self.emergent[cell]}
        return {w: w in positives for w in self.pool}


@pytest.fixture
def planted():
    return PlantedWorld()


def make_bank(
    stimuli_vectors: dict[str, np.ndarray], model_id: str = "toy"
) -> EmbeddingBank:
    dim = next(iter(stimuli_vectors.values())).shape[1]
    return EmbeddingBank(
        dimension=dim,
        model_id=model_id,
        stimuli=dict(stimuli_vectors),
        sentence_ids={
            w: [f"{w}:{i}" for i in range(v.shape[0])] for w, v in stimuli_vectors.items()
        },
    )


def noisy_bank_from_table(
    table: EmbeddingTable,
    words: list[str],
    contexts: int,
    sigma: float,
    seed: int,
) -> EmbeddingBank:
    """Bank whose vectors are Gaussian perturbations of static vectors."""
    rng = np.random.default_rng(seed)
    stim = {}
    for w in words:
        base = table.entries[w]
        stim[w] = base[None, :] + sigma * rng.standard_normal((contexts, base.shape[0]))
    return make_bank(stim)


def pytest_terminal_summary(terminalreporter):
    """Echo the per-criterion acceptance lines past output capture."""
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

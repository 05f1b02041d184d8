"""Sampled association tests over contextualized-embedding banks.

Each of the N samples draws one contextualized vector per stimulus and runs
the static association test on the drawn vectors, producing an effect size,
its in-sample variance (the squared population std-dev of the per-target
association scores), and a permutation p-value.  The N samples are then
pooled by the random-effects model in :mod:`biaslens.meta`.

Draw discipline: every stimulus gets an independent RNG stream keyed by
(seed, sha256(stimulus)), so sampling is deterministic and order-free no
matter how samples are scheduled.  A stimulus with at least N vectors is
drawn without replacement (first N entries of a seeded permutation of its
indices); with fewer than N vectors, draws are i.i.d. uniform so the
empirical distribution over its vectors is preserved.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embed_store import EmbeddingBank
from .errors import MissingWordError, ParameterError
from .meta import MetaResult, combine
from .weat import PValueMode, WeatSpec, effect_size_from_scores, pvalue_from_scores, unit_rows


@dataclass(frozen=True)
class EffectSample:
    effect_size: float
    variance: float
    p_value: float | None
    sample_index: int
    draw_record: dict[str, int]


@dataclass(frozen=True)
class CeatResult:
    samples: list[EffectSample]
    meta: MetaResult
    spec_label: str
    seed: int
    sample_count: int

    def to_dict(self, compact: bool = False) -> dict:
        doc = {
            "spec_label": self.spec_label,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "meta": self.meta.to_dict(),
            "samples": [
                {
                    "effect_size": s.effect_size,
                    "variance": s.variance,
                    "p_value": s.p_value,
                    "sample_index": s.sample_index,
                    **({} if compact else {"draw_record": s.draw_record}),
                }
                for s in self.samples
            ],
        }
        return doc


def _stimulus_stream(seed: int, word: str) -> np.random.Generator:
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    word_key = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([seed, word_key]))


def plan_draws(
    bank: EmbeddingBank,
    spec: WeatSpec,
    n_samples: int,
    seed: int,
    sentence_allowlist: set[str] | None = None,
) -> dict[str, np.ndarray]:
    """Vector-index plan per stimulus: array of n_samples indices.

    ``sentence_allowlist`` restricts each stimulus to vectors whose sentence
    id is listed, pinning draws to sentences shared across banks.
    """
    missing = [w for w in spec.stimuli if w not in bank.stimuli]
    if missing:
        raise MissingWordError(missing)
    plan: dict[str, np.ndarray] = {}
    for word in spec.stimuli:
        candidates = np.arange(bank.stimuli[word].shape[0])
        if sentence_allowlist is not None:
            ids = bank.sentence_ids[word]
            candidates = np.array(
                [i for i in candidates if ids[i] in sentence_allowlist], dtype=np.int64
            )
            if candidates.size == 0:
                raise ParameterError(
                    f"sentence allow-list leaves no vectors for stimulus {word!r}"
                )
        rng = _stimulus_stream(seed, word)
        if candidates.size >= n_samples:
            plan[word] = rng.permutation(candidates)[:n_samples]
        else:
            plan[word] = candidates[rng.integers(0, candidates.size, size=n_samples)]
    return plan


def _sample_from_units(
    units: dict[str, np.ndarray],
    spec: WeatSpec,
    draw: dict[str, int],
    p_mode: PValueMode | None,
    sample_index: int = 0,
) -> EffectSample:
    targets_u = np.stack([units[w][draw[w]] for w in spec.targets])
    a_u = np.stack([units[w][draw[w]] for w in spec.A])
    b_u = np.stack([units[w][draw[w]] for w in spec.B])
    scores = (targets_u @ a_u.T).mean(axis=1) - (targets_u @ b_u.T).mean(axis=1)
    n_x = len(spec.X)
    es = effect_size_from_scores(scores, n_x)
    variance = float(np.var(scores))
    p_value = None
    if p_mode is not None:
        p_value = pvalue_from_scores(scores, n_x, p_mode)
    return EffectSample(
        effect_size=es,
        variance=variance,
        p_value=p_value,
        sample_index=sample_index,
        draw_record=dict(draw),
    )


def _unit_bank(bank: EmbeddingBank, spec: WeatSpec) -> dict[str, np.ndarray]:
    missing = [w for w in spec.stimuli if w not in bank.stimuli]
    if missing:
        raise MissingWordError(missing)
    return {w: unit_rows(np.asarray(bank.stimuli[w], dtype=np.float64)) for w in spec.stimuli}


def sample_effect(
    bank: EmbeddingBank,
    spec: WeatSpec,
    draw: dict[str, int],
    p_mode: PValueMode | None = None,
) -> EffectSample:
    """Score one explicit draw (stimulus -> vector index)."""
    for word in spec.stimuli:
        if word not in draw:
            raise ParameterError(f"draw record missing stimulus {word!r}")
        if not 0 <= draw[word] < bank.count(word):
            raise ParameterError(
                f"draw index {draw[word]} out of range for stimulus {word!r}"
            )
    return _sample_from_units(_unit_bank(bank, spec), spec, draw, p_mode)


def run_ceat(
    bank: EmbeddingBank,
    spec: WeatSpec,
    n_samples: int = 10_000,
    seed: int = 0,
    p_mode: PValueMode | None = PValueMode.monte_carlo(1_000),
    workers: int = 1,
    sentence_allowlist: set[str] | None = None,
) -> CeatResult:
    """Generate N samples and pool them; bit-reproducible given (seed, N).

    Per-sample permutation p-values reuse ``p_mode`` with the seed mixed with
    the sample index, so results do not depend on ``workers``.
    """
    if n_samples < 1:
        raise ParameterError(f"sample count must be positive, got {n_samples}")
    plan = plan_draws(bank, spec, n_samples, seed, sentence_allowlist)
    units = _unit_bank(bank, spec)

    def score(i: int) -> EffectSample:
        draw = {w: int(plan[w][i]) for w in spec.stimuli}
        mode = p_mode
        if mode is not None and mode.kind == "mc":
            mode = PValueMode(kind="mc", count=mode.count, seed=(seed * 1_000_003 + i) & 0x7FFFFFFF)
        return _sample_from_units(units, spec, draw, mode, sample_index=i)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(score, range(n_samples)))
    else:
        samples = [score(i) for i in range(n_samples)]

    meta = combine([s.effect_size for s in samples], [s.variance for s in samples])
    return CeatResult(
        samples=samples,
        meta=meta,
        spec_label=spec.label,
        seed=seed,
        sample_count=n_samples,
    )

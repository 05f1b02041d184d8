"""Turning results into histogram data, ROC tables, and summary exports.

All renderers are pure functions of the result value: the same input yields
byte-identical output.  p-values below the reporting floor (1e-30) are shown
as ``<1e-30`` in human-readable text only; CSV and JSON carry exact floats.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .ceat import CeatResult, EffectSample
from .detect import DetectionResult, ThresholdChoice
from .errors import ParameterError

P_VALUE_FLOOR = 1e-30
DEFAULT_BIN_COUNT = 50

CEAT_SUMMARY_HEADER = "label,ces,se,p_combined,n,sigma2_between"


@dataclass(frozen=True)
class HistogramReport:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    mean_p_per_bin: tuple[float | None, ...]
    label: str

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "bin_edges": list(self.bin_edges),
            "counts": list(self.counts),
            "mean_p_per_bin": list(self.mean_p_per_bin),
        }


def format_pvalue(p: float) -> str:
    """Paper-style reporting floor for human-readable output."""
    return "<1e-30" if p < P_VALUE_FLOOR else f"{p:.6g}"


def histogram(
    samples: list[EffectSample], bin_count: int = DEFAULT_BIN_COUNT, label: str = ""
) -> HistogramReport:
    """Uniform bins over [min ES, max ES], right-open with the last bin closed.

    Each bin also carries the mean permutation p-value of the samples that
    fall in it (None for empty bins or when p-values were not computed).
    """
    if not samples:
        raise ParameterError("histogram needs at least one sample")
    if bin_count < 1:
        raise ParameterError(f"bin count must be positive, got {bin_count}")
    es = np.array([s.effect_size for s in samples])
    lo, hi = float(es.min()), float(es.max())
    if lo == hi:
        bin_count = 1
    edges = np.linspace(lo, hi, bin_count + 1)
    if lo == hi:
        idx = np.zeros(len(es), dtype=np.int64)
    else:
        idx = np.minimum(
            ((es - lo) / (hi - lo) * bin_count).astype(np.int64), bin_count - 1
        )
    counts = np.bincount(idx, minlength=bin_count)
    mean_p: list[float | None] = []
    p_vals = [s.p_value for s in samples]
    for b in range(bin_count):
        in_bin = [p_vals[i] for i in range(len(samples)) if idx[i] == b]
        if not in_bin or any(p is None for p in in_bin):
            mean_p.append(None)
        else:
            mean_p.append(float(np.mean(in_bin)))
    return HistogramReport(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        mean_p_per_bin=tuple(mean_p),
        label=label,
    )


def _csv_bytes(rows: list[list]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _json_bytes(doc: dict) -> bytes:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False).encode("utf-8")


def _svg_bar_chart(values: list[float], label: str) -> bytes:
    width, height, pad = 640, 320, 24
    n = len(values)
    vmax = max(values) if values and max(values) > 0 else 1.0
    bar_w = (width - 2 * pad) / max(n, 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<title>{label}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, v in enumerate(values):
        h = (height - 2 * pad) * (v / vmax)
        x = pad + i * bar_w
        y = height - pad - h
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w * 0.9:.2f}" '
            f'height="{h:.2f}" fill="#4472a8"/>'
        )
    parts.append("</svg>")
    return "".join(parts).encode("utf-8")


def render_report(result, fmt: str = "json") -> bytes:
    """Serialize a CeatResult, DetectionResult, ThresholdChoice, or
    HistogramReport to csv, json, or svg bytes."""
    if fmt not in ("csv", "json", "svg"):
        raise ParameterError(f"unknown format {fmt!r}")

    if isinstance(result, CeatResult):
        if fmt == "json":
            return _json_bytes(result.to_dict())
        if fmt == "csv":
            m = result.meta
            return _csv_bytes(
                [
                    CEAT_SUMMARY_HEADER.split(","),
                    [
                        result.spec_label,
                        m.ces,
                        m.se,
                        m.p_combined,
                        result.sample_count,
                        m.sigma2_between,
                    ],
                ]
            )
        hist = histogram(result.samples)
        return _svg_bar_chart([float(c) for c in hist.counts], result.spec_label)

    if isinstance(result, ThresholdChoice):
        if fmt == "json":
            return _json_bytes(result.to_dict())
        if fmt == "csv":
            rows = [["threshold", "tpr", "fpr"]]
            rows.extend([t, tpr, fpr] for t, tpr, fpr in sorted(result.roc_points))
            return _csv_bytes(rows)
        raise ParameterError("svg rendering is not defined for ROC tables")

    if isinstance(result, DetectionResult):
        if fmt == "json":
            return _json_bytes(result.to_dict())
        if fmt == "csv":
            rows = [["word", "detected", "max_score"]]
            for w in sorted(result.per_word_scores):
                scores = [s for _, s in result.per_word_scores[w]]
                rows.append([w, int(w in result.detected), max(scores)])
            return _csv_bytes(rows)
        raise ParameterError("svg rendering is not defined for detection results")

    if isinstance(result, HistogramReport):
        if fmt == "json":
            return _json_bytes(result.to_dict())
        if fmt == "csv":
            rows = [["bin_lo", "bin_hi", "count", "mean_p"]]
            for i, c in enumerate(result.counts):
                mean_p = result.mean_p_per_bin[i]
                rows.append(
                    [
                        result.bin_edges[i],
                        result.bin_edges[i + 1],
                        c,
                        "" if mean_p is None else mean_p,
                    ]
                )
            return _csv_bytes(rows)
        return _svg_bar_chart([float(c) for c in result.counts], result.label)

    raise ParameterError(f"cannot render values of type {type(result).__name__}")

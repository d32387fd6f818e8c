"""Scoring harness: rubric aggregation, quality distribution, coverage,
length statistics, and similarity–quality correlation.

All aggregation is full precision internally; rounding happens only at
display time, half-up to a fixed number of decimals. Two deliberate
exceptions, both documented in the README:

* the composite percent gain is additionally reported from the 2-decimal
  rounded composites, which is how the published aggregate for this
  comparison was derived (full-precision gain is also in the report);
* the answer-length ratio displays floored to 1 decimal (a conservative
  "x-fold increase" statement).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingProvider, cosine, embed
from .errors import ParseError

RUBRIC_METRICS = (
    "relevance",
    "completeness",
    "actionability",
    "contextual_richness",
    "specificity",
)

COVERAGE_FEATURES = (
    "cause_explanation",
    "immediate_actions",
    "prevention_measures",
    "specific_dosages",
    "variety_recommendations",
    "expert_referral",
)

QUALITY_LABELS = ("high", "moderate", "poor")

COVERAGE_METHOD_NOTE = (
    "overall coverage = unweighted mean of the six per-feature fractions; "
    "see README 'Known aggregation discrepancy' for why this can differ "
    "from previously circulated summaries of the same rows"
)


def round_half_up(value: float, decimals: int) -> float:
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def floor_to(value: float, decimals: int) -> float:
    scale = 10**decimals
    return int(value * scale) / scale


@dataclass(frozen=True)
class EvalRecord:
    question_id: str
    question: str
    system_answer: str
    quality_label: str
    rubric: dict[str, float]
    reference_context: str | None = None
    answer_chars: int = 0

    def __post_init__(self) -> None:
        if self.quality_label not in QUALITY_LABELS:
            raise ValueError(f"quality_label must be one of {QUALITY_LABELS}")
        missing = [m for m in RUBRIC_METRICS if m not in self.rubric]
        if missing:
            raise ValueError(f"rubric missing {missing}")
        for metric, score in self.rubric.items():
            if not 1.0 <= float(score) <= 5.0:
                raise ValueError(f"rubric {metric}={score} outside [1, 5]")
        expected = len(self.system_answer)
        if self.answer_chars == 0:
            object.__setattr__(self, "answer_chars", expected)
        elif self.answer_chars != expected:
            raise ValueError(
                f"answer_chars {self.answer_chars} != len(system_answer) {expected}"
            )

    def composite(self) -> float:
        return sum(float(self.rubric[m]) for m in RUBRIC_METRICS) / len(RUBRIC_METRICS)


@dataclass(frozen=True)
class CoverageRecord:
    question_id: str
    features: dict[str, bool]
    system: str = "candidate"

    def __post_init__(self) -> None:
        missing = [f for f in COVERAGE_FEATURES if f not in self.features]
        if missing:
            raise ValueError(f"coverage features missing {missing}")


def load_records(path: str | Path) -> list[EvalRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                records.append(
                    EvalRecord(
                        question_id=row["question_id"],
                        question=row["question"],
                        system_answer=row["system_answer"],
                        quality_label=row["quality_label"],
                        rubric={k: float(v) for k, v in row["rubric"].items()},
                        reference_context=row.get("reference_context"),
                        answer_chars=int(row.get("answer_chars", 0)),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad eval record: {exc}", line=i) from exc
    if not records:
        raise ParseError(f"no records in {path}")
    return records


def load_coverage(path: str | Path) -> list[CoverageRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                records.append(
                    CoverageRecord(
                        question_id=row["question_id"],
                        features={k: bool(v) for k, v in row["features"].items()},
                        system=row.get("system", "candidate"),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad coverage record: {exc}", line=i) from exc
    return records


# -- aggregation ----------------------------------------------------------------


def aggregate_rubric(records: list[EvalRecord]) -> dict:
    """Per-metric means plus their unweighted-mean composite."""
    if not records:
        raise ValueError("need at least one record")
    means = {
        m: sum(float(r.rubric[m]) for r in records) / len(records) for m in RUBRIC_METRICS
    }
    composite = sum(means.values()) / len(means)
    return {
        "means": means,
        "composite": composite,
        "composite_display": round_half_up(composite, 2),
    }


def percent_gain(candidate: float, baseline: float) -> float:
    if baseline <= 0:
        raise ValueError("baseline must be positive")
    return 100.0 * (candidate - baseline) / baseline


def quality_distribution(records: list[EvalRecord]) -> dict:
    if not records:
        raise ValueError("need at least one record")
    n = len(records)
    raw = {
        label: 100.0 * sum(1 for r in records if r.quality_label == label) / n
        for label in QUALITY_LABELS
    }
    return {"raw": raw, "display": {k: round_half_up(v, 1) for k, v in raw.items()}}


def coverage_average(records: list[CoverageRecord]) -> dict:
    if not records:
        raise ValueError("need at least one coverage record")
    fractions = {
        f: sum(1 for r in records if r.features[f]) / len(records) for f in COVERAGE_FEATURES
    }
    overall = sum(fractions.values()) / len(fractions)
    return {
        "features": fractions,
        "overall": overall,
        "overall_display": round_half_up(100.0 * overall, 1),
    }


def length_stats(records_a: list[EvalRecord], records_b: list[EvalRecord]) -> dict:
    if not records_a or not records_b:
        raise ValueError("need records on both sides")
    mean_a = sum(r.answer_chars for r in records_a) / len(records_a)
    mean_b = sum(r.answer_chars for r in records_b) / len(records_b)
    if mean_b == 0:
        raise ValueError("baseline mean length is zero")
    ratio = mean_a / mean_b
    return {
        "candidate_mean": mean_a,
        "baseline_mean": mean_b,
        "ratio": ratio,
        "ratio_display": floor_to(ratio, 1),
    }


def _average_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def pearson(xs: list[float], ys: list[float]) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = float(np.sqrt((xc * xc).sum() * (yc * yc).sum()))
    if denom == 0.0:
        return 0.0
    return float((xc * yc).sum() / denom)


def spearman(xs: list[float], ys: list[float]) -> float:
    return pearson(_average_ranks(list(xs)), _average_ranks(list(ys)))


def similarity_quality(records: list[EvalRecord], provider: EmbeddingProvider) -> dict:
    """(question↔answer cosine, rubric composite) pairs + correlations."""
    pairs = []
    for r in records:
        sim = cosine(embed(provider, r.question), embed(provider, r.system_answer))
        pairs.append({"question_id": r.question_id, "similarity": sim, "composite": r.composite()})
    sims = [p["similarity"] for p in pairs]
    comps = [p["composite"] for p in pairs]
    return {
        "pairs": pairs,
        "pearson": pearson(sims, comps) if len(pairs) > 1 else 0.0,
        "spearman": spearman(sims, comps) if len(pairs) > 1 else 0.0,
    }


# -- report -------------------------------------------------------------------


@dataclass
class ComparisonReport:
    rubric_candidate: dict
    rubric_baseline: dict
    metric_gains: dict
    composite_gain: dict
    quality: dict
    length: dict
    coverage_candidate: dict | None
    coverage_baseline: dict | None
    similarity: dict
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rubric": {
                "candidate": self.rubric_candidate,
                "baseline": self.rubric_baseline,
                "metric_gains": self.metric_gains,
                "composite_gain": self.composite_gain,
            },
            "quality_distribution": self.quality,
            "length": self.length,
            "coverage": {
                "candidate": self.coverage_candidate,
                "baseline": self.coverage_baseline,
                "method_note": COVERAGE_METHOD_NOTE,
            },
            "similarity_quality": self.similarity,
            "notes": self.notes,
        }


def build_report(
    candidate: list[EvalRecord],
    baseline: list[EvalRecord],
    coverage: list[CoverageRecord] | None,
    provider: EmbeddingProvider,
) -> ComparisonReport:
    agg_c = aggregate_rubric(candidate)
    agg_b = aggregate_rubric(baseline)
    gains = {}
    for m in RUBRIC_METRICS:
        raw = percent_gain(agg_c["means"][m], agg_b["means"][m])
        gains[m] = {"raw": raw, "display": round_half_up(raw, 1)}
    # The published composite gain derives from the rounded composites;
    # both forms are recorded.
    gain_rounded = percent_gain(agg_c["composite_display"], agg_b["composite_display"])
    gain_raw = percent_gain(agg_c["composite"], agg_b["composite"])
    composite_gain = {
        "from_rounded_composites": gain_rounded,
        "display": round_half_up(gain_rounded, 1),
        "from_raw_composites": gain_raw,
    }
    cov_c = cov_b = None
    if coverage:
        cand_rows = [r for r in coverage if r.system == "candidate"]
        base_rows = [r for r in coverage if r.system == "baseline"]
        cov_c = coverage_average(cand_rows) if cand_rows else None
        cov_b = coverage_average(base_rows) if base_rows else None
    return ComparisonReport(
        rubric_candidate=agg_c,
        rubric_baseline=agg_b,
        metric_gains=gains,
        composite_gain=composite_gain,
        quality=quality_distribution(candidate),
        length=length_stats(candidate, baseline),
        coverage_candidate=cov_c,
        coverage_baseline=cov_b,
        similarity=similarity_quality(candidate, provider),
    )


def write_report(report: ComparisonReport, out_dir: str | Path) -> dict[str, Path]:
    """Emit report.json, report.csv and the four plot-data files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    paths["report.json"] = out / "report.json"
    paths["report.json"].write_text(
        json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )

    paths["report.csv"] = out / "report.csv"
    with open(paths["report.csv"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "candidate", "baseline", "pct_gain"])
        for m in RUBRIC_METRICS:
            w.writerow(
                [
                    m,
                    f"{round_half_up(report.rubric_candidate['means'][m], 2):.2f}",
                    f"{round_half_up(report.rubric_baseline['means'][m], 2):.2f}",
                    f"{report.metric_gains[m]['display']:+.1f}",
                ]
            )
        w.writerow(
            [
                "composite",
                f"{report.rubric_candidate['composite_display']:.2f}",
                f"{report.rubric_baseline['composite_display']:.2f}",
                f"{report.composite_gain['display']:+.1f}",
            ]
        )
        w.writerow(
            [
                "answer_chars",
                f"{report.length['candidate_mean']:.0f}",
                f"{report.length['baseline_mean']:.0f}",
                f"{report.length['ratio_display']:.1f}x",
            ]
        )
        for label in QUALITY_LABELS:
            w.writerow([f"quality_{label}", f"{report.quality['display'][label]:.1f}", "", ""])
        if report.coverage_candidate and report.coverage_baseline:
            w.writerow(
                [
                    "coverage_overall",
                    f"{report.coverage_candidate['overall_display']:.1f}",
                    f"{report.coverage_baseline['overall_display']:.1f}",
                    "",
                ]
            )

    plots = {
        "distribution.json": {
            "labels": list(QUALITY_LABELS),
            "values": [report.quality["display"][label] for label in QUALITY_LABELS],
        },
        "radar.json": {
            "metrics": list(RUBRIC_METRICS),
            "candidate": [report.rubric_candidate["means"][m] for m in RUBRIC_METRICS],
            "baseline": [report.rubric_baseline["means"][m] for m in RUBRIC_METRICS],
            "composite": {
                "candidate": report.rubric_candidate["composite_display"],
                "baseline": report.rubric_baseline["composite_display"],
            },
        },
        "gains.json": {
            "metrics": list(RUBRIC_METRICS),
            "values": [report.metric_gains[m]["display"] for m in RUBRIC_METRICS],
        },
        "scatter.json": {"points": report.similarity["pairs"]},
    }
    for name, payload in plots.items():
        paths[name] = out / name
        paths[name].write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    return paths

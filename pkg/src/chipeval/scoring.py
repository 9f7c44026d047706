"""pass@k, category aggregation, corpus statistics, and cost efficiency.

pass@k uses the standard unbiased estimator 1 - C(n-c, k)/C(n, k), computed
with exact integer binomials (Fraction) before the final division. Report
rounding is two decimals, round-half-up; everything internal stays full
precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from math import comb

from .errors import DivisionByZeroPassRate, InvalidArgs


@dataclass(frozen=True)
class CaseOutcome:
    case_id: str
    category: str
    n: int
    c: int

    def __post_init__(self):
        if not (0 <= self.c <= self.n):
            raise InvalidArgs(f"{self.case_id}: need 0 <= c <= n, got c={self.c} n={self.n}")


@dataclass(frozen=True)
class PassAtK:
    k: int
    value: float


def pass_at_k_exact(n: int, c: int, k: int) -> Fraction:
    """Unbiased pass@k as an exact rational."""
    if not (1 <= k <= n):
        raise InvalidArgs(f"need 1 <= k <= n, got k={k} n={n}")
    if not (0 <= c <= n):
        raise InvalidArgs(f"need 0 <= c <= n, got c={c} n={n}")
    miss = comb(n - c, k) if n - c >= k else 0
    return 1 - Fraction(miss, comb(n, k))


def pass_at_k(n: int, c: int, k: int) -> float:
    return float(pass_at_k_exact(n, c, k))


def round2(value: float | Fraction | Decimal) -> float:
    """Two decimals, round-half-up (report convention)."""
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(str(value))
    return float(d.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def aggregate_average(rates: list[float] | tuple[float, ...]) -> float:
    """Unweighted mean of per-category percentage rates, two decimals."""
    if not rates:
        return 0.0
    total = sum(Decimal(str(r)) for r in rates)
    return round2(total / len(rates))


def cost_per_pass(cost: float, pass1_percent: float) -> float:
    """Dollars per solved case at the observed pass@1."""
    if pass1_percent <= 0:
        raise DivisionByZeroPassRate("not solvable at this budget")
    return cost / (pass1_percent / 100.0)


def weighted_mean(values: list[float] | tuple[float, ...],
                  weights: list[int] | tuple[int, ...]) -> float:
    if len(values) != len(weights) or not values:
        raise InvalidArgs("values and weights must align and be nonempty")
    total = sum(w for w in weights)
    if total == 0:
        raise InvalidArgs("weights sum to zero")
    return sum(v * w for v, w in zip(values, weights)) / total


@dataclass(frozen=True)
class CaseStat:
    case_id: str
    category: str
    code_lines: float
    circuit_cells: float


@dataclass(frozen=True)
class CorpusStats:
    per_category: dict  # category -> {"count", "mean_lines", "mean_cells"}
    overall_lines: float
    overall_cells: float


def corpus_stats(cases: list[CaseStat]) -> CorpusStats:
    """Per-category means plus the case-count-weighted overall means."""
    if not cases:
        raise InvalidArgs("no cases to summarize")
    groups: dict[str, list[CaseStat]] = {}
    for cs in cases:
        groups.setdefault(cs.category, []).append(cs)
    per_category = {}
    cats = sorted(groups)
    for cat in cats:
        members = groups[cat]
        per_category[cat] = {
            "count": len(members),
            "mean_lines": sum(m.code_lines for m in members) / len(members),
            "mean_cells": sum(m.circuit_cells for m in members) / len(members),
        }
    counts = [per_category[c]["count"] for c in cats]
    return CorpusStats(
        per_category=per_category,
        overall_lines=weighted_mean([per_category[c]["mean_lines"] for c in cats], counts),
        overall_cells=weighted_mean([per_category[c]["mean_cells"] for c in cats], counts),
    )


# --- report rendering ----------------------------------------------------------


def score_outcomes(
    outcomes: list[CaseOutcome], ks: tuple[int, ...] = (1, 5, 10)
) -> dict:
    """Per-category and average pass@k percentages from per-case tallies."""
    if not outcomes:
        raise InvalidArgs("no outcomes to score")
    for o in outcomes:
        if o.n < max(ks):
            raise InvalidArgs(
                f"{o.case_id}: n={o.n} is below max requested k={max(ks)}"
            )
    groups: dict[str, list[CaseOutcome]] = {}
    for o in outcomes:
        groups.setdefault(o.category, []).append(o)
    per_category: dict[str, dict[str, float]] = {}
    for cat in sorted(groups):
        row = {}
        for k in ks:
            mean = sum(
                (pass_at_k_exact(o.n, o.c, k) for o in groups[cat]), Fraction(0)
            ) / len(groups[cat])
            row[f"pass@{k}"] = round2(mean * 100)
        row["cases"] = len(groups[cat])
        per_category[cat] = row
    average = {
        f"pass@{k}": aggregate_average(
            [per_category[cat][f"pass@{k}"] for cat in per_category]
        )
        for k in ks
    }
    return {"per_category": per_category, "average": average, "ks": list(ks)}


def render_text_table(report: dict) -> str:
    """Plain-text table mirroring the category/average row layout."""
    ks = report["ks"]
    headers = ["category", "cases"] + [f"pass@{k}" for k in ks]
    rows = []
    for cat, row in report["per_category"].items():
        rows.append([cat, str(row["cases"])] + [f"{row[f'pass@{k}']:.2f}" for k in ks])
    rows.append(["Average", ""] + [f"{report['average'][f'pass@{k}']:.2f}" for k in ks])
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines += [fmt(r) for r in rows]
    return "\n".join(lines) + "\n"


def render_json_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"

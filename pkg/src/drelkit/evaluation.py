"""Binary metrics, the always-TRUE baseline, macro averages, rank-based
significance testing over run distributions, and report rendering.

All computations here are pure functions over immutable inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import SenseTop, top_sense
from .embeddings import check_coverage
from .features import compose

SCHEMA_VERSION = 1

SIDEDNESS = ("one-sided-greater", "two-sided")
# Full enumeration of rank assignments is exact only without ties and is
# restricted to a small smaller-sample size.
EXACT_MAX_SMALL = 12


class SchemaError(ValueError):
    """Run-results files do not share the expected schema version."""


# ---------------------------------------------------------------------------
# Confusion counts and F1


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def degenerate(self) -> bool:
        """No positives and no positive predictions: F1 is defined as 0."""
        return self.tp + self.fp + self.fn == 0


def confusion(y_true, y_pred) -> ConfusionCounts:
    """Count a binary prediction vector against gold labels."""
    t = np.asarray(y_true).astype(bool)
    p = np.asarray(y_pred).astype(bool)
    if t.shape != p.shape:
        raise ValueError("label vectors differ in length")
    return ConfusionCounts(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        fn=int(np.sum(t & ~p)),
        tn=int(np.sum(~t & ~p)),
    )


def f1(c: ConfusionCounts) -> float:
    """Positive-class F1 as a percentage; degenerate counts score 0."""
    denom = 2 * c.tp + c.fp + c.fn
    if denom == 0:
        return 0.0
    return 100.0 * 2 * c.tp / denom


def always_positive_baseline(n_positive: int, n_negative: int) -> float:
    """F1 of the constant-TRUE predictor: tp = positives, fp = negatives, fn = 0.

    Equals 2p/(1+p) (as a percentage) where p is the positive rate.
    """
    if n_positive + n_negative == 0:
        raise ValueError("empty test set")
    return f1(ConfusionCounts(tp=n_positive, fp=n_negative, fn=0, tn=0))


def baseline_from_labels(labels) -> float:
    labels = np.asarray(labels).astype(bool)
    return always_positive_baseline(int(labels.sum()), int((~labels).sum()))


def macro_average(scores: Sequence[float]) -> float:
    """Arithmetic mean over exactly four per-sense scores."""
    if len(scores) != 4:
        raise ValueError(f"macro average needs one score per sense, got {len(scores)}")
    return float(np.mean(scores))


def format_mean_std(scores: Sequence[float]) -> str:
    """Render "28.19 (±0.83)"; a single score renders as just the mean."""
    m = float(np.mean(scores))
    if len(scores) < 2:
        return f"{m:.2f}"
    return f"{m:.2f} (±{float(np.std(scores, ddof=1)):.2f})"


# ---------------------------------------------------------------------------
# Mann-Whitney U


@dataclass
class SignificanceResult:
    u_statistic: float
    p_value: float
    sidedness: str
    method: str  # "exact" or "normal-approx-tie-corrected"


def _average_ranks(values: list[float]) -> tuple[list[float], list[int]]:
    """1-based ranks with ties sharing their average rank, plus tie group sizes."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    tie_counts = []
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        tie_counts.append(j - i + 1)
        i = j + 1
    return ranks, tie_counts


def _rank_sum_counts(k: int, total: int) -> list[int]:
    """counts[s] = number of k-subsets of {1..total} whose ranks sum to s.

    Plain subset-sum DP with exact integer counts; the caller keeps k small.
    """
    max_sum = k * total
    table = [[0] * (max_sum + 1) for _ in range(k + 1)]
    table[0][0] = 1
    for v in range(1, total + 1):
        for kk in range(min(k, v), 0, -1):
            row = table[kk]
            prev = table[kk - 1]
            for s in range(max_sum, v - 1, -1):
                c = prev[s - v]
                if c:
                    row[s] += c
    return table[k]


def _exact_p(n: int, m: int, u_a: float, sidedness: str) -> float:
    """Exact tail probability of U by counting all C(n+m, n) rank labelings."""
    k = min(n, m)
    total = n + m
    counts = _rank_sum_counts(k, total)
    min_sum = k * (k + 1) // 2
    u_counts = counts[min_sum : min_sum + n * m + 1]  # U of the size-k side in 0..n*m
    if n > m:
        u_counts = u_counts[::-1]  # U_a = n*m - U_b
    denom = sum(u_counts)
    u = int(round(u_a))
    ge = sum(u_counts[u:])
    if sidedness == "one-sided-greater":
        num = ge
    else:
        le = sum(u_counts[: u + 1])
        num = min(denom, 2 * min(ge, le))
    return num / denom


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _normal_p(n: int, m: int, u_a: float, tie_counts: list[int], sidedness: str) -> float:
    """Normal approximation with tie-corrected variance and continuity correction."""
    total = n + m
    mu = n * m / 2.0
    tie_term = sum(t**3 - t for t in tie_counts)
    correction = 1.0 - tie_term / (total**3 - total)
    var = correction * n * m * (total + 1) / 12.0
    if var <= 0.0:
        return 1.0  # every value tied: no evidence either way
    sd = math.sqrt(var)
    if sidedness == "one-sided-greater":
        p = _norm_sf((u_a - mu - 0.5) / sd)
    else:
        p = 2.0 * _norm_sf((abs(u_a - mu) - 0.5) / sd)
    return min(max(p, 0.0), 1.0)


def mann_whitney_u(a, b, sidedness: str = "one-sided-greater", method: str = "auto") -> SignificanceResult:
    """Mann-Whitney rank test; "one-sided-greater" asks whether a tends larger than b.

    U is the rank-sum statistic of sample a with average ranks for ties.
    The exact p (full enumeration over all C(n+m, n) labelings, computed by
    a counting recursion) is used when the smaller sample has at most 12
    values and there are no ties; otherwise the normal approximation with
    tie-corrected variance and continuity correction. method forces one
    route ("exact" / "normal") and errors when exact is not applicable.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    if sidedness not in SIDEDNESS:
        raise ValueError(f"sidedness must be one of {SIDEDNESS}, got {sidedness!r}")
    n, m = len(a), len(b)
    ranks, tie_counts = _average_ranks(a + b)
    u_a = sum(ranks[:n]) - n * (n + 1) / 2.0
    has_ties = any(t > 1 for t in tie_counts)
    exact_ok = not has_ties and min(n, m) <= EXACT_MAX_SMALL
    if method == "auto":
        use_exact = exact_ok
    elif method == "exact":
        if not exact_ok:
            raise ValueError("exact method requires tie-free samples with min(n, m) <= 12")
        use_exact = True
    elif method == "normal":
        use_exact = False
    else:
        raise ValueError(f"method must be auto, exact or normal, got {method!r}")
    if use_exact:
        return SignificanceResult(u_a, _exact_p(n, m, u_a, sidedness), sidedness, "exact")
    return SignificanceResult(
        u_a, _normal_p(n, m, u_a, tie_counts, sidedness), sidedness, "normal-approx-tie-corrected"
    )


def compare_distributions(
    named_scores: Sequence[tuple[str, Sequence[float]]],
    alpha: float = 0.001,
    sidedness: str = "one-sided-greater",
) -> list[dict]:
    """Pairwise rank tests between named score distributions.

    Each unordered pair is tested once, oriented so the higher-mean sample
    plays the "greater" side. Returns one row dict per pair.
    """
    rows = []
    for (name_a, a), (name_b, b) in itertools.combinations(named_scores, 2):
        if float(np.mean(b)) > float(np.mean(a)):
            (name_a, a), (name_b, b) = (name_b, b), (name_a, a)
        res = mann_whitney_u(a, b, sidedness=sidedness)
        rows.append(
            {
                "better": name_a,
                "other": name_b,
                "mean_better": float(np.mean(a)),
                "mean_other": float(np.mean(b)),
                "u_statistic": res.u_statistic,
                "p_value": res.p_value,
                "method": res.method,
                "significant": bool(res.p_value < alpha),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Model evaluation over a labeled corpus


def evaluate_model(model, relations, target: SenseTop, store) -> ConfusionCounts:
    """Score every implicit relation of a test set; the set is never subsampled."""
    relations = list(relations)
    if not relations:
        raise ValueError("empty test set")
    check_coverage(relations, store)
    X = np.stack([compose(store.lookup(r.id, "arg1"), store.lookup(r.id, "arg2")) for r in relations])
    y = np.array([1 if top_sense(r) == target else 0 for r in relations])
    return confusion(y, model.predict_many(X))


# ---------------------------------------------------------------------------
# Report rendering over run-results files


def _check_schema(results: Sequence[dict]) -> None:
    for res in results:
        if res.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(
                f"expected schema_version {SCHEMA_VERSION}, got {res.get('schema_version')!r}"
            )


def _setup_name(res: dict) -> str:
    return "+".join(res["training_corpora"])


def report(results: Sequence[dict]) -> tuple[str, str]:
    """Render Markdown and TSV tables from run-results dicts.

    Markdown: one table per training setup with one row per test target and
    one column per sense ("mean (±std)" cells, single runs drop the ±),
    plus an Average column and a baseline table when baselines are present.
    When several setups cover the same target, the best mean per (target,
    sense) is bolded if it is significantly higher than every runner-up
    (one-sided Mann-Whitney, p < 0.001).

    TSV columns: language, sense, mean, std, n_runs, baseline. Numeric
    values match the Markdown rendering exactly.
    """
    results = list(results)
    _check_schema(results)
    scores: dict[tuple[str, str, str], list[float]] = {}
    baselines: dict[tuple[str, str], float] = {}
    setups: list[str] = []
    targets: list[str] = []
    for res in results:
        setup = _setup_name(res)
        if setup not in setups:
            setups.append(setup)
        sense = res["task"]
        for target, target_scores in res["scores_per_target"].items():
            if target not in targets:
                targets.append(target)
            key = (setup, target, sense)
            if key in scores:
                raise SchemaError(f"duplicate results for setup={setup} target={target} sense={sense}")
            scores[key] = [float(s) for s in target_scores]
        for target, value in res.get("baseline_per_target", {}).items():
            baselines[(target, res["task"])] = float(value)

    sense_names = [s.value for s in SenseTop]

    # Bold cells: best setup per (target, sense), significantly above all others.
    bold: set[tuple[str, str, str]] = set()
    for target in targets:
        for sense in sense_names:
            present = [(s, scores[(s, target, sense)]) for s in setups if (s, target, sense) in scores]
            if len(present) < 2:
                continue
            present.sort(key=lambda item: float(np.mean(item[1])), reverse=True)
            best_name, best_scores = present[0]
            if all(
                mann_whitney_u(best_scores, other, "one-sided-greater").p_value < 0.001
                for _, other in present[1:]
            ):
                bold.add((best_name, target, sense))

    md: list[str] = ["# Run results", ""]
    for setup in setups:
        md.append(f"## Training: {setup}")
        md.append("")
        md.append("| Test target | " + " | ".join(sense_names) + " | Average |")
        md.append("|" + "---|" * (len(sense_names) + 2))
        for target in targets:
            cells = []
            means = []
            for sense in sense_names:
                key = (setup, target, sense)
                if key not in scores:
                    cells.append("")
                    continue
                cell = format_mean_std(scores[key])
                if key in bold:
                    cell = f"**{cell}**"
                cells.append(cell)
                means.append(float(np.mean(scores[key])))
            if not means:
                continue
            avg = f"{macro_average(means):.2f}" if len(means) == 4 else ""
            md.append(f"| {target} | " + " | ".join(cells) + f" | {avg} |")
        md.append("")
    if baselines:
        md.append("## Always-TRUE baseline")
        md.append("")
        md.append("| Test target | " + " | ".join(sense_names) + " | Average |")
        md.append("|" + "---|" * (len(sense_names) + 2))
        for target in targets:
            values = [baselines.get((target, sense)) for sense in sense_names]
            if all(v is None for v in values):
                continue
            cells = ["" if v is None else f"{v:.2f}" for v in values]
            known = [v for v in values if v is not None]
            avg = f"{macro_average(known):.2f}" if len(known) == 4 else ""
            md.append(f"| {target} | " + " | ".join(cells) + f" | {avg} |")
        md.append("")

    tsv: list[str] = ["language\tsense\tmean\tstd\tn_runs\tbaseline"]
    for setup in setups:
        if len(setups) > 1:
            tsv.append(f"# setup: {setup}")
        for target in targets:
            for sense in sense_names:
                key = (setup, target, sense)
                if key not in scores:
                    continue
                vals = scores[key]
                std = 0.0 if len(vals) < 2 else float(np.std(vals, ddof=1))
                base = baselines.get((target, sense))
                tsv.append(
                    f"{target}\t{sense}\t{float(np.mean(vals)):.2f}\t{std:.2f}"
                    f"\t{len(vals)}\t" + ("" if base is None else f"{base:.2f}")
                )
    return "\n".join(md) + "\n", "\n".join(tsv) + "\n"

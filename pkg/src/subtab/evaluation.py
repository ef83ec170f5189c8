"""Scoring: cell-level precision/recall against the gold table, answer
exact match, and corpus-level report aggregation."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Optional, Sequence

from .selectors import Annotation, condition_satisfied, parse_number
from .table import Table

# Upper edges of the table-size buckets (total cell count), last bucket open.
SIZE_BUCKET_EDGES = (50, 100, 200, 500)
# Edges for the answer-row-count breakdown.
ANSWER_ROW_EDGES = (5, 10, 15, 20)


@dataclass(frozen=True)
class GoldTable:
    """Coordinates of the ideal subtable: rows satisfying all conditions
    crossed with the condition+answer columns."""

    columns: frozenset[int]
    rows: frozenset[int]
    cells: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class SelectionScore:
    precision: float
    recall: float
    true_positive: int
    predicted: int
    gold: int


def gold_table(table: Table, annotation: Annotation) -> GoldTable:
    columns = annotation.target_columns
    missing = columns - set(table.col_ids)
    if missing:
        raise ValueError(f"annotation references columns missing from table: {sorted(missing)}")
    rows = frozenset(
        r
        for r in table.row_ids
        if all(condition_satisfied(table.cell(r, c.column), c) for c in annotation.conditions)
    )
    cells = frozenset((r, c) for r in rows for c in columns)
    return GoldTable(columns=frozenset(columns), rows=rows, cells=cells)


def score_selection(predicted: Table, gold: GoldTable) -> SelectionScore:
    """Cell-set precision/recall; gold cells are the positives.

    Zero predicted cells score precision 0; an empty gold table scores
    recall 1 (there was nothing to find).
    """
    predicted_cells = set(product(predicted.row_ids, predicted.col_ids))
    tp = len(predicted_cells & gold.cells)
    precision = tp / len(predicted_cells) if predicted_cells else 0.0
    recall = tp / len(gold.cells) if gold.cells else 1.0
    return SelectionScore(
        precision=precision,
        recall=recall,
        true_positive=tp,
        predicted=len(predicted_cells),
        gold=len(gold.cells),
    )


def _normalize_answer(text: str) -> Hashable:
    cleaned = " ".join(text.strip().lower().split())
    number = parse_number(cleaned)
    if number is not None:
        return ("num", number)
    return ("str", cleaned)


def exact_match(predicted_answer: str, gold_answers: Sequence[str]) -> bool:
    """Normalized equality; multi-answer golds compare as multisets after
    splitting the prediction on '|' (preferred) or ', '."""
    if not gold_answers:
        return False
    if len(gold_answers) == 1:
        return _normalize_answer(predicted_answer) == _normalize_answer(gold_answers[0])
    if "|" in predicted_answer:
        parts = predicted_answer.split("|")
    else:
        parts = predicted_answer.split(", ")
    return Counter(_normalize_answer(p) for p in parts) == Counter(
        _normalize_answer(g) for g in gold_answers
    )


@dataclass(frozen=True)
class RecordResult:
    """Per-(table, question) evaluation outcome."""

    table_id: str
    question_id: str
    precision: float
    recall: float
    true_positive: int
    predicted_cells: int
    gold_cells: int
    source_cells: int
    selected_cells: int
    reduction_ratio: float
    converged: bool
    iterations: int
    n_target_columns: int
    n_answer_rows: int
    em: Optional[bool] = None


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _size_bucket(cells: int) -> str:
    lower = 0
    for edge in SIZE_BUCKET_EDGES:
        if cells < edge:
            return f"[{lower},{edge})"
        lower = edge
    return f"[{lower},inf)"


def _answer_row_bucket(rows: int) -> str:
    lower = 0
    for edge in ANSWER_ROW_EDGES:
        if rows < edge:
            return f"[{lower},{edge})"
        lower = edge
    return f"[{lower},inf)"


def _column_bucket(count: int) -> str:
    return str(count) if count < 5 else "5+"


@dataclass
class Report:
    count: int
    mean_precision: float
    mean_recall: float
    exact_match: Optional[float]
    em_scored: int
    mean_reduction_ratio: float
    converged: int
    iterations_histogram: dict[int, int]
    by_size: dict[str, dict]
    by_column_count: dict[str, dict]
    by_answer_rows: dict[str, dict]
    results: list[RecordResult] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "exact_match": self.exact_match,
            "em_scored": self.em_scored,
            "mean_reduction_ratio": self.mean_reduction_ratio,
            "converged": self.converged,
            "iterations_histogram": {str(k): v for k, v in sorted(self.iterations_histogram.items())},
            "by_size": self.by_size,
            "by_column_count": self.by_column_count,
            "by_answer_rows": self.by_answer_rows,
        }

    def format_text(self) -> str:
        lines = [
            f"records                {self.count}",
            f"mean precision         {self.mean_precision:.4f}",
            f"mean recall            {self.mean_recall:.4f}",
        ]
        if self.exact_match is None:
            lines.append("exact match            -    (no predictions supplied)")
        else:
            lines.append(f"exact match            {self.exact_match:.4f} ({self.em_scored} scored)")
        lines.append(f"mean cell reduction    {self.mean_reduction_ratio:.4f}")
        lines.append(f"converged              {self.converged}/{self.count}")
        lines.append("")
        lines.append("iterations histogram")
        for k in sorted(self.iterations_histogram):
            lines.append(f"  {k:>3}  {self.iterations_histogram[k]}")

        def block(title: str, data: dict[str, dict]) -> None:
            lines.append("")
            lines.append(title)
            lines.append(f"  {'bucket':<12}{'n':>6}{'precision':>12}{'recall':>10}")
            for key, stats in data.items():
                lines.append(
                    f"  {key:<12}{stats['count']:>6}{stats['precision']:>12.4f}{stats['recall']:>10.4f}"
                )

        block("by table size (cells)", self.by_size)
        block("by condition+answer columns", self.by_column_count)
        block("by answer rows", self.by_answer_rows)
        return "\n".join(lines)


def _bucket_stats(results: Sequence[RecordResult], key_fn) -> dict[str, dict]:
    grouped: dict[str, list[RecordResult]] = {}
    for r in results:
        grouped.setdefault(key_fn(r), []).append(r)

    def sort_key(label: str):
        head = label.strip("[").split(",")[0].rstrip("+")
        return float(head) if head.replace(".", "").isdigit() else label

    out = {}
    for label in sorted(grouped, key=sort_key):
        rs = grouped[label]
        out[label] = {
            "count": len(rs),
            "precision": _mean([r.precision for r in rs]),
            "recall": _mean([r.recall for r in rs]),
        }
    return out


def corpus_report(results: Sequence[RecordResult]) -> Report:
    if not results:
        raise ValueError("no results to report")
    em_scored = [r for r in results if r.em is not None]
    iterations_histogram = dict(Counter(r.iterations for r in results))
    return Report(
        count=len(results),
        mean_precision=_mean([r.precision for r in results]),
        mean_recall=_mean([r.recall for r in results]),
        exact_match=(_mean([1.0 if r.em else 0.0 for r in em_scored]) if em_scored else None),
        em_scored=len(em_scored),
        mean_reduction_ratio=_mean([r.reduction_ratio for r in results]),
        converged=sum(1 for r in results if r.converged),
        iterations_histogram=iterations_histogram,
        by_size=_bucket_stats(results, lambda r: _size_bucket(r.source_cells)),
        by_column_count=_bucket_stats(results, lambda r: _column_bucket(r.n_target_columns)),
        by_answer_rows=_bucket_stats(results, lambda r: _answer_row_bucket(r.n_answer_rows)),
        results=list(results),
    )

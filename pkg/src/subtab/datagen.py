"""Selector training-pair construction.

One pair per window: the rendered prompt and the oracle target encoded as a
coordinate grid. Pairs carry their target size (m rows, n columns) so the
heavily skewed raw size distribution can be rebalanced by bucket sampling,
and a duplicate-value augmentation pass can widen targets to cells sharing a
value with an already-selected cell.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .representation import PromptTemplate, default_template, encode_coordinate, render_prompt
from .selectors import Annotation, Condition, ConditionOp, oracle_select, values_equal
from .table import CellSelection, Question, Table, Window
from .windowing import WindowConfig, divide_table


@dataclass(frozen=True)
class TrainingPair:
    prompt: str
    target: str
    m: int
    n: int
    table_id: str
    question_id: str
    window_origin: tuple[int, int]
    window: Window
    selection: CellSelection
    augmented: bool = False

    def to_record(self) -> dict:
        return {
            "prompt": self.prompt,
            "target": self.target,
            "m": self.m,
            "n": self.n,
            "table_id": self.table_id,
            "question_id": self.question_id,
            "window_origin": list(self.window_origin),
        }


@dataclass(frozen=True)
class BucketSpec:
    """Desired pair count per (m, n) target size; keys are exactly
    {0..w} x {1..w}, the w(w+1) expressible non-empty target shapes."""

    w: int
    counts: Mapping[tuple[int, int], int]

    def __post_init__(self) -> None:
        expected = {(m, n) for m in range(self.w + 1) for n in range(1, self.w + 1)}
        if set(self.counts) != expected:
            raise ValueError(f"bucket keys must be exactly {{0..{self.w}}} x {{1..{self.w}}}")

    @classmethod
    def uniform(cls, w: int, per_bucket: int) -> "BucketSpec":
        keys = [(m, n) for m in range(w + 1) for n in range(1, w + 1)]
        return cls(w=w, counts={k: per_bucket for k in keys})

    def sorted_keys(self) -> list[tuple[int, int]]:
        return sorted(self.counts)


def _selection_size(selection: CellSelection) -> tuple[int, int]:
    return (len(selection.rows), len(selection.columns))


def generate_pairs(
    table: Table,
    question: Question,
    annotation: Annotation,
    cfg: WindowConfig | None = None,
    template: PromptTemplate | None = None,
    table_id: str = "",
    question_id: str = "",
) -> list[TrainingPair]:
    """One pair per window of ``table``; the target is the oracle selection.

    Windows without any condition or answer column produce n=0 pairs; they
    are kept here (callers see the full raw distribution) and dropped by
    balancing, whose buckets require at least one column.
    """
    if template is None:
        template = default_template()
    pairs = []
    for window in divide_table(table, cfg):
        selection = oracle_select(window, annotation)
        m, n = _selection_size(selection)
        pairs.append(
            TrainingPair(
                prompt=render_prompt(window, question, template),
                target=encode_coordinate(window, selection),
                m=m,
                n=n,
                table_id=table_id,
                question_id=question_id,
                window_origin=(window.origin_row, window.origin_col),
                window=window,
                selection=selection,
            )
        )
    return pairs


def bucket_histogram(pairs: Iterable[TrainingPair]) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for pair in pairs:
        key = (pair.m, pair.n)
        counts[key] = counts.get(key, 0) + 1
    return counts


def balance_pairs(
    pairs: Sequence[TrainingPair], spec: BucketSpec, seed: int
) -> tuple[list[TrainingPair], dict[tuple[int, int], int]]:
    """Draw without replacement up to the spec's count per bucket.

    Buckets short on supply keep whatever is available; nothing is ever
    drawn twice. Returns the balanced pairs plus the per-bucket histogram of
    what was actually taken. Deterministic for a fixed seed.
    """
    if not pairs:
        raise ValueError("no pairs to balance")
    rng = random.Random(seed)
    by_bucket: dict[tuple[int, int], list[TrainingPair]] = {}
    for pair in pairs:
        by_bucket.setdefault((pair.m, pair.n), []).append(pair)

    taken: list[TrainingPair] = []
    histogram: dict[tuple[int, int], int] = {}
    for key in spec.sorted_keys():
        available = by_bucket.get(key, [])
        count = min(spec.counts[key], len(available))
        histogram[key] = count
        if count:
            taken.extend(rng.sample(available, count))
    return taken, histogram


def augment_same_value(pairs: Sequence[TrainingPair]) -> list[TrainingPair]:
    """Widen each target with window cells equal in value to a target cell.

    Uses the condition engine's equality (numeric when both sides parse,
    else trimmed case-insensitive). Targets only grow; changed pairs are
    flagged and re-encoded with recomputed size metadata.
    """
    out: list[TrainingPair] = []
    for pair in pairs:
        window = pair.window
        target_values = [
            window.table.cell(r, c) for r, c in pair.selection.cells
        ]
        if not target_values:
            out.append(pair)
            continue
        added: set[tuple[int, int]] = set()
        for row_pos in range(window.height):
            for col_pos in range(window.width):
                coord = window.to_global(row_pos, col_pos)
                if coord in pair.selection.cells:
                    continue
                value = window.cell(row_pos, col_pos)
                if any(values_equal(value, tv) for tv in target_values):
                    added.add(coord)
        if not added:
            out.append(pair)
            continue
        selection = CellSelection.from_cells(
            pair.selection.cells | added, extra_columns=pair.selection.columns
        )
        m, n = _selection_size(selection)
        out.append(
            replace(
                pair,
                selection=selection,
                target=encode_coordinate(window, selection),
                m=m,
                n=n,
                augmented=True,
            )
        )
    return out


def augmented_fraction(pairs: Sequence[TrainingPair]) -> float:
    if not pairs:
        return 0.0
    return sum(1 for p in pairs if p.augmented) / len(pairs)


def write_pairs(pairs: Iterable[TrainingPair], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_record(), ensure_ascii=False) + "\n")
            n += 1
    return n


def histogram_to_json(histogram: Mapping[tuple[int, int], int]) -> dict[str, int]:
    return {f"({m},{n})": count for (m, n), count in sorted(histogram.items())}


def synthesize_bucket_corpus(
    w: int, per_bucket: int, seed: int
) -> list[dict]:
    """Corpus records with a controlled target-size distribution.

    Each record is a w x w table producing exactly one window whose oracle
    target has a chosen (m, n) shape: the first of n target columns carries
    an equality condition hit by exactly m rows, remaining columns are
    filler with globally unique values so augmentation cannot change any
    target. Yields per_bucket records for every (m, n) with n >= 1.
    """
    rng = random.Random(seed)
    records: list[dict] = []
    serial = 0
    for m in range(w + 1):
        for n in range(1, w + 1):
            for _ in range(per_bucket):
                serial += 1
                headers = [f"col{j}_{serial}" for j in range(w)]
                hit = f"hit_{serial}"
                cells = []
                for r in range(w):
                    row = []
                    for j in range(w):
                        if j == 0 and r < m:
                            row.append(hit)
                        else:
                            row.append(f"v{r}_{j}_{serial}_{rng.randrange(10**6)}")
                    cells.append(row)
                answer_col = n - 1
                answers = [cells[r][answer_col] for r in range(m)]
                records.append(
                    {
                        "table_id": f"synth_{m}_{n}_{serial}",
                        "question_id": f"q{serial}",
                        "headers": headers,
                        "rows": cells,
                        "question": f"which {headers[answer_col]} values go with {hit}?",
                        "conditions": [{"column": 0, "op": "=", "value": hit}],
                        "answer_columns": list(range(n)) if n > 1 else [0],
                        "answers": answers,
                    }
                )
    return records

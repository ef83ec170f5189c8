"""The fixed-point selection loop: divide, select per window, merge, repeat.

Each iteration divides the current table into windows, asks the selector for
a per-window selection, unions all selections (cells and columns) and
materializes the union against the current table. The loop stops when the
table no longer changes or the safety cap is hit. Cell sets shrink
monotonically, so with a deterministic selector the fixed point always
exists; the cap only guards against a misbehaving remote model.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .selectors import Annotation
from .table import EMPTY_TABLE, CellSelection, Question, Table, Window, materialize, table_equals
from .windowing import WindowConfig, divide_table


class Selector(Protocol):
    def __call__(
        self, window: Window, question: Question, annotation: Optional[Annotation]
    ) -> tuple[CellSelection, int]: ...


@dataclass(frozen=True)
class PipelineConfig:
    selector: Selector
    window: WindowConfig = WindowConfig()
    max_iterations: int = 16
    jobs: int = 1
    trace: bool = False

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    input_rows: int
    input_cols: int
    n_windows: int
    union_cells: int
    union_columns: int
    parse_warnings: int
    elapsed_s: float


@dataclass
class PipelineTrace:
    records: list[IterationStats] = field(default_factory=list)
    converged: bool = False
    empty_result: bool = False

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def parse_warnings(self) -> int:
        return sum(r.parse_warnings for r in self.records)


def select_subtable(
    table: Table,
    question: Question,
    annotation: Optional[Annotation],
    cfg: PipelineConfig,
) -> tuple[Table, PipelineTrace]:
    """Run the selection loop to its fixed point and return (subtable, trace).

    ``annotation`` is required by the oracle selector and ignored by remote
    selectors. If some iteration's union contains no columns at all, an
    empty zero-column table is returned with ``trace.empty_result`` set so
    callers can score it instead of crashing.
    """
    if table.n_cols == 0 or table.n_rows == 0:
        raise ValueError("input table must have at least one row and one column")

    trace = PipelineTrace()
    current = table

    for iteration in range(1, cfg.max_iterations + 1):
        started = time.perf_counter()
        windows = divide_table(current, cfg.window)

        if cfg.jobs > 1 and len(windows) > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                results = list(pool.map(lambda w: cfg.selector(w, question, annotation), windows))
        else:
            results = [cfg.selector(w, question, annotation) for w in windows]

        union_cols: set[int] = set()
        union_cells: set[tuple[int, int]] = set()
        warnings = 0
        for selection, parse_warnings in results:
            union_cols |= selection.columns
            union_cells |= selection.cells
            warnings += parse_warnings

        # Monotonicity guard: a selector may only keep cells of the current
        # table, never resurrect or invent coordinates.
        current_coords = current.coordinates()
        union_cols &= set(current.col_ids)
        union_cells = {rc for rc in union_cells if rc in current_coords and rc[1] in union_cols}

        trace.records.append(
            IterationStats(
                iteration=iteration,
                input_rows=current.n_rows,
                input_cols=current.n_cols,
                n_windows=len(windows),
                union_cells=len(union_cells),
                union_columns=len(union_cols),
                parse_warnings=warnings,
                elapsed_s=time.perf_counter() - started,
            )
        )

        if not union_cols:
            trace.converged = True
            trace.empty_result = True
            return EMPTY_TABLE, trace

        merged = materialize(CellSelection(frozenset(union_cols), frozenset(union_cells)), current)
        if table_equals(merged, current):
            trace.converged = True
            return merged, trace
        current = merged

    return current, trace

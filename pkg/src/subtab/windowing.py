"""Stride-1 sliding-window division of a table, clamped at the edges."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyTableError
from .table import Table, Window


@dataclass(frozen=True)
class WindowConfig:
    """Window geometry. ``span_all_columns`` makes each window cover every
    column (fixed row count), the non-square ablation shape."""

    w: int = 4
    span_all_columns: bool = False

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError("window size must be >= 1")


def _origins(extent: int, span: int) -> range:
    # Sliding a span-wide window with stride 1 and clamping the last
    # positions onto extent-span collapses, after dedup, to this range.
    return range(max(extent - span, 0) + 1)


def divide_table(table: Table, cfg: WindowConfig | None = None) -> list[Window]:
    """Enumerate the table's windows in raster order of their origins.

    Clamped duplicates are emitted once. Tables narrower or shorter than the
    window yield a single full span along that axis. A table that still has
    columns but no rows divides into height-0 header strips so the selection
    loop can keep running on headers-only intermediates; a table without
    columns cannot be divided.
    """
    if cfg is None:
        cfg = WindowConfig()
    n_rows, n_cols = table.shape
    if n_cols == 0:
        raise EmptyTableError("cannot divide a table with no columns")

    w_rows = cfg.w
    w_cols = n_cols if cfg.span_all_columns else cfg.w
    height = min(w_rows, n_rows)
    width = min(w_cols, n_cols)

    return [
        Window(table=table, origin_row=i, origin_col=j, height=height, width=width)
        for i in _origins(n_rows, w_rows)
        for j in _origins(n_cols, w_cols)
    ]

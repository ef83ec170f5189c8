"""Tables, windows and cell selections with stable provenance coordinates.

Every cell keeps the (row_id, col_id) pair it had in the original input
table, no matter how often the table is sliced or shrunk. These global ids
are what selections, unions and scoring operate on; 0-based grid positions
are an implementation detail and are always named ``*_pos``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidSelectionError

Coord = tuple[int, int]


def _strictly_increasing(ids: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(ids, ids[1:]))


@dataclass(frozen=True)
class Table:
    """Rectangular grid of cell strings plus provenance ids for rows/columns."""

    headers: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]
    row_ids: tuple[int, ...]
    col_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.col_ids) != len(self.headers):
            raise ValueError("col_ids and headers must have the same length")
        if len(self.row_ids) != len(self.cells):
            raise ValueError("row_ids and cells must have the same length")
        width = len(self.headers)
        for pos, row in enumerate(self.cells):
            if len(row) != width:
                raise ValueError(f"row {pos} has {len(row)} cells, expected {width}")
        if not _strictly_increasing(self.row_ids):
            raise ValueError("row_ids must be strictly increasing")
        if not _strictly_increasing(self.col_ids):
            raise ValueError("col_ids must be strictly increasing")

    @classmethod
    def from_rows(cls, headers: Sequence[str], rows: Iterable[Sequence[str]]) -> "Table":
        """Build an original table; ids are assigned 0..R-1 and 0..C-1."""
        headers = tuple(str(h) for h in headers)
        cells = tuple(tuple(str(c) for c in row) for row in rows)
        return cls(
            headers=headers,
            cells=cells,
            row_ids=tuple(range(len(cells))),
            col_ids=tuple(range(len(headers))),
        )

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    @property
    def n_cols(self) -> int:
        return len(self.col_ids)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def n_cells(self) -> int:
        return self.n_rows * self.n_cols

    @cached_property
    def _row_pos(self) -> dict[int, int]:
        return {rid: pos for pos, rid in enumerate(self.row_ids)}

    @cached_property
    def _col_pos(self) -> dict[int, int]:
        return {cid: pos for pos, cid in enumerate(self.col_ids)}

    def row_pos(self, row_id: int) -> int:
        return self._row_pos[row_id]

    def col_pos(self, col_id: int) -> int:
        return self._col_pos[col_id]

    def cell(self, row_id: int, col_id: int) -> str:
        """Cell content addressed by global ids."""
        return self.cells[self._row_pos[row_id]][self._col_pos[col_id]]

    def coordinates(self) -> frozenset[Coord]:
        """All (row_id, col_id) pairs present in this table."""
        return frozenset((r, c) for r in self.row_ids for c in self.col_ids)

    def header_of(self, col_id: int) -> str:
        return self.headers[self._col_pos[col_id]]


@dataclass(frozen=True)
class Window:
    """A contiguous view into a parent table.

    ``origin_row``/``origin_col`` are grid positions in the parent; the
    global ids of the rows and columns covered come from the parent's id
    sequences. Height may be zero (a headers-only strip of a table that has
    no rows left); the header slice is always available.
    """

    table: Table
    origin_row: int
    origin_col: int
    height: int
    width: int

    def __post_init__(self) -> None:
        if self.height < 0 or self.width < 1:
            raise ValueError("window must span at least one column")
        if not (0 <= self.origin_row and self.origin_row + self.height <= self.table.n_rows):
            raise ValueError("window rows out of parent bounds")
        if not (0 <= self.origin_col and self.origin_col + self.width <= self.table.n_cols):
            raise ValueError("window columns out of parent bounds")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def parent_dims(self) -> tuple[int, int]:
        return self.table.shape

    @property
    def headers(self) -> tuple[str, ...]:
        return self.table.headers[self.origin_col : self.origin_col + self.width]

    @property
    def row_ids(self) -> tuple[int, ...]:
        return self.table.row_ids[self.origin_row : self.origin_row + self.height]

    @property
    def col_ids(self) -> tuple[int, ...]:
        return self.table.col_ids[self.origin_col : self.origin_col + self.width]

    @property
    def rows(self) -> tuple[tuple[str, ...], ...]:
        return tuple(
            row[self.origin_col : self.origin_col + self.width]
            for row in self.table.cells[self.origin_row : self.origin_row + self.height]
        )

    def cell(self, row_pos: int, col_pos: int) -> str:
        """Cell content addressed by window-local grid position."""
        if not (0 <= row_pos < self.height and 0 <= col_pos < self.width):
            raise IndexError(f"({row_pos}, {col_pos}) outside {self.shape} window")
        return self.table.cells[self.origin_row + row_pos][self.origin_col + col_pos]

    def to_global(self, row_pos: int, col_pos: int) -> Coord:
        return (self.row_ids[row_pos], self.col_ids[col_pos])

    def coordinates(self) -> frozenset[Coord]:
        return frozenset((r, c) for r in self.row_ids for c in self.col_ids)


@dataclass(frozen=True)
class CellSelection:
    """A set of global cell coordinates plus the column set they span.

    ``columns`` may be non-empty while ``cells`` is empty: that is a
    headers-only selection (relevant columns found, no qualifying rows).
    """

    columns: frozenset[int]
    cells: frozenset[Coord]

    def __post_init__(self) -> None:
        stray = {c for _, c in self.cells} - self.columns
        if stray:
            raise InvalidSelectionError(f"cells reference columns outside the selection: {sorted(stray)}")

    @classmethod
    def empty(cls) -> "CellSelection":
        return cls(frozenset(), frozenset())

    @classmethod
    def from_cells(cls, cells: Iterable[Coord], extra_columns: Iterable[int] = ()) -> "CellSelection":
        cells = frozenset(cells)
        columns = frozenset(c for _, c in cells) | frozenset(extra_columns)
        return cls(columns, cells)

    @property
    def rows(self) -> frozenset[int]:
        return frozenset(r for r, _ in self.cells)

    @property
    def is_empty(self) -> bool:
        return not self.columns


@dataclass(frozen=True)
class Question:
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("question text is empty")


EMPTY_TABLE = Table(headers=(), cells=(), row_ids=(), col_ids=())


def materialize(selection: CellSelection, source: Table) -> Table:
    """Turn a selection into a rectangular subtable of ``source``.

    The output covers the selected columns (in source order) crossed with
    every row owning at least one selected cell; intersection cells that were
    not individually selected are filled from the source, which keeps the
    result rectangular. A selection with columns but no cells yields a
    headers-only table with zero rows.
    """
    if not selection.columns:
        raise InvalidSelectionError("selection has no columns")
    missing_cols = selection.columns - set(source.col_ids)
    if missing_cols:
        raise InvalidSelectionError(f"columns not present in source: {sorted(missing_cols)}")
    missing = selection.cells - source.coordinates()
    if missing:
        raise InvalidSelectionError(f"cells not present in source: {sorted(missing)[:5]}")

    col_ids = tuple(c for c in source.col_ids if c in selection.columns)
    owning = selection.rows
    row_ids = tuple(r for r in source.row_ids if r in owning)
    headers = tuple(source.header_of(c) for c in col_ids)
    cells = tuple(tuple(source.cell(r, c) for c in col_ids) for r in row_ids)
    return Table(headers=headers, cells=cells, row_ids=row_ids, col_ids=col_ids)


def table_equals(a: Table, b: Table) -> bool:
    """True iff ids, headers and every cell string agree."""
    return (
        a.row_ids == b.row_ids
        and a.col_ids == b.col_ids
        and a.headers == b.headers
        and a.cells == b.cells
    )

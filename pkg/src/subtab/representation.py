"""Prompt rendering and the selector output codecs.

The coordinate codec is the primary wire format: a grid with the same shape
as the window, holding ``<row,col>`` at selected positions (window-local,
0-based) and ``<empty,empty>`` elsewhere. Columns that are selected but own
no selected cell ride on a trailing marker line ``columns: a | b`` so that
headers-only selections survive the round trip.

Decoding is total. Untrusted text never raises; tokens that are malformed,
out of range, or placed at the wrong grid position are dropped, and a
warning count is returned next to the selection. The index and table codecs
exist for ablation comparisons and are inherently lossier: the index codec
can only express row-set x column-set rectangles, and the table codec
re-identifies cells by content, so duplicated values decode ambiguously
(first match in raster order wins).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InvalidSelectionError
from .table import CellSelection, Question, Window

EMPTY_TOKEN = "<empty,empty>"
COLUMNS_MARKER = "columns:"
ROWS_MARKER = "rows:"

_TOKEN_RE = re.compile(r"<[^<>]*>")
_COORD_RE = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")
_EMPTY_RE = re.compile(r"^\s*empty\s*,\s*empty\s*$")

QUESTION_PLACEHOLDER = "{question}"
TABLE_PLACEHOLDER = "{table}"


@dataclass(frozen=True)
class PromptTemplate:
    """Fixed instruction text with {question} and {table} placeholders."""

    text: str

    def __post_init__(self) -> None:
        for placeholder in (QUESTION_PLACEHOLDER, TABLE_PLACEHOLDER):
            if placeholder not in self.text:
                raise ValueError(f"template is missing the {placeholder} placeholder")

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplate":
        return cls(Path(path).read_text(encoding="utf-8"))

    def render(self, question_text: str, table_text: str) -> str:
        # str.replace, not str.format: cell contents may contain braces.
        return self.text.replace(QUESTION_PLACEHOLDER, question_text).replace(
            TABLE_PLACEHOLDER, table_text
        )


def default_template() -> PromptTemplate:
    text = resources.files("subtab").joinpath("templates/selector_prompt.txt").read_text("utf-8")
    return PromptTemplate(text)


def serialize_window(window: Window) -> str:
    """Header row then data rows, cells joined by ' | '."""
    lines = [" | ".join(window.headers)]
    lines.extend(" | ".join(row) for row in window.rows)
    return "\n".join(lines)


def render_prompt(window: Window, question: Question, template: PromptTemplate | None = None) -> str:
    if template is None:
        template = default_template()
    return template.render(question.text, serialize_window(window))


def _localize(window: Window, selection: CellSelection) -> tuple[set[tuple[int, int]], list[int]]:
    """Map a selection to window-local coordinates.

    Returns (local cell positions, local positions of columns that own no
    selected cell). Raises if anything falls outside the window.
    """
    row_pos = {rid: pos for pos, rid in enumerate(window.row_ids)}
    col_pos = {cid: pos for pos, cid in enumerate(window.col_ids)}

    outside_cols = selection.columns - set(col_pos)
    if outside_cols:
        raise InvalidSelectionError(f"columns outside window: {sorted(outside_cols)}")
    local_cells = set()
    for r, c in selection.cells:
        if r not in row_pos:
            raise InvalidSelectionError(f"cell ({r}, {c}) outside window rows")
        local_cells.add((row_pos[r], col_pos[c]))

    with_cells = {c for _, c in selection.cells}
    cell_less = sorted(col_pos[c] for c in selection.columns - with_cells)
    return local_cells, cell_less


@dataclass(frozen=True)
class CoordinateGrid:
    """Window-shaped token grid; ``selected`` holds local (row, col) positions."""

    height: int
    width: int
    selected: frozenset[tuple[int, int]]

    def lines(self) -> list[str]:
        return [
            " ".join(
                f"<{r},{c}>" if (r, c) in self.selected else EMPTY_TOKEN
                for c in range(self.width)
            )
            for r in range(self.height)
        ]


def encode_coordinate(window: Window, selection: CellSelection) -> str:
    local_cells, cell_less = _localize(window, selection)
    lines = CoordinateGrid(window.height, window.width, frozenset(local_cells)).lines()
    if cell_less:
        names = " | ".join(window.headers[pos] for pos in cell_less)
        lines.append(f"{COLUMNS_MARKER} {names}")
    return "\n".join(lines)


def _match_headers(names_text: str, window: Window, used: set[int]) -> tuple[set[int], int]:
    """Resolve pipe-separated header names to window column ids.

    Each name takes the first not-yet-used window column with that exact
    header. Unresolvable names count as warnings.
    """
    warnings = 0
    matched: set[int] = set()
    names = [n.strip() for n in names_text.split("|")]
    names = [n for n in names if n]
    if not names:
        return matched, 1
    for name in names:
        for pos, header in enumerate(window.headers):
            if header == name and pos not in used:
                used.add(pos)
                matched.add(window.col_ids[pos])
                break
        else:
            warnings += 1
    return matched, warnings


def decode_coordinate(text: str, window: Window) -> tuple[CellSelection, int]:
    """Parse coordinate-grid text into a selection with global coordinates.

    Never raises; the second element counts every deviation from a
    well-formed window-shaped grid (bad tokens, mismatched indices, wrong
    line or token counts, unresolvable marker names).
    """
    warnings = 0
    selected_local: set[tuple[int, int]] = set()
    marker_cols: set[int] = set()
    marker_seen = False
    used_headers: set[int] = set()

    grid_lines: list[str] = []
    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line:
            warnings += 1
            continue
        if line.lower().startswith(COLUMNS_MARKER):
            if marker_seen:
                warnings += 1
            marker_seen = True
            cols, w = _match_headers(line[len(COLUMNS_MARKER) :], window, used_headers)
            marker_cols |= cols
            warnings += w
            continue
        grid_lines.append(line)

    if len(grid_lines) != window.height:
        warnings += abs(len(grid_lines) - window.height)

    for r, line in enumerate(grid_lines[: window.height]):
        tokens = _TOKEN_RE.findall(line)
        if _TOKEN_RE.sub("", line).strip():
            warnings += 1
        if len(tokens) != window.width:
            warnings += 1
        for c, token in enumerate(tokens[: window.width]):
            inner = token[1:-1]
            if _EMPTY_RE.match(inner):
                continue
            m = _COORD_RE.match(inner)
            if not m:
                warnings += 1
                continue
            stated = (int(m.group(1)), int(m.group(2)))
            if stated != (r, c):
                warnings += 1
                continue
            selected_local.add((r, c))

    cells = frozenset(window.to_global(r, c) for r, c in selected_local)
    columns = frozenset(c for _, c in cells) | frozenset(marker_cols)
    return CellSelection(columns, cells), warnings


def encode_index(window: Window, selection: CellSelection) -> str:
    """Selected local row indices plus selected column headers."""
    local_cells, _ = _localize(window, selection)
    col_pos = {cid: pos for pos, cid in enumerate(window.col_ids)}
    rows = sorted({r for r, _ in local_cells})
    cols = sorted(col_pos[c] for c in selection.columns)
    row_line = f"{ROWS_MARKER} " + ", ".join(str(r) for r in rows)
    col_line = f"{COLUMNS_MARKER} " + " | ".join(window.headers[p] for p in cols)
    return f"{row_line.rstrip()}\n{col_line.rstrip()}"


def decode_index(text: str, window: Window) -> tuple[CellSelection, int]:
    """Inverse of encode_index; cells are the full row x column cross product."""
    warnings = 0
    rows: list[int] = []
    cols: set[int] = set()
    seen_rows = seen_cols = False
    used_headers: set[int] = set()

    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line:
            warnings += 1
            continue
        lowered = line.lower()
        if lowered.startswith(ROWS_MARKER):
            if seen_rows:
                warnings += 1
                continue
            seen_rows = True
            body = line[len(ROWS_MARKER) :]
            for part in (p.strip() for p in body.split(",")):
                if not part:
                    continue
                if not part.isdigit():
                    warnings += 1
                    continue
                idx = int(part)
                if idx >= window.height:
                    warnings += 1
                    continue
                rows.append(idx)
        elif lowered.startswith(COLUMNS_MARKER):
            if seen_cols:
                warnings += 1
                continue
            seen_cols = True
            matched, w = _match_headers(line[len(COLUMNS_MARKER) :], window, used_headers)
            # A bare "columns:" line is a valid empty selection here.
            if w == 1 and not matched and not line[len(COLUMNS_MARKER) :].strip():
                w = 0
            cols |= matched
            warnings += w
        else:
            warnings += 1
    if not seen_rows or not seen_cols:
        warnings += 1

    cells = frozenset((window.row_ids[r], c) for r in rows for c in cols)
    return CellSelection(frozenset(cols), cells), warnings


def encode_table(window: Window, selection: CellSelection) -> str:
    """Serialized subtable: headers of selected columns, then the rectangle
    of rows owning at least one selected cell, filled from the window."""
    local_cells, _ = _localize(window, selection)
    col_pos = {cid: pos for pos, cid in enumerate(window.col_ids)}
    cols = sorted(col_pos[c] for c in selection.columns)
    rows = sorted({r for r, _ in local_cells})
    lines = [" | ".join(window.headers[p] for p in cols)]
    lines.extend(" | ".join(window.cell(r, p) for p in cols) for r in rows)
    return "\n".join(lines)


def decode_table(text: str, window: Window) -> tuple[CellSelection, int]:
    """Re-identify serialized cells against the window by header + content.

    A value matching several window cells in its column is ambiguous: the
    first match in raster order wins and a warning is counted.
    """
    warnings = 0
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        return CellSelection.empty(), 1

    used_headers: set[int] = set()
    col_slots: list[int | None] = []
    pos_by_col = {cid: pos for pos, cid in enumerate(window.col_ids)}
    for name in (n.strip() for n in lines[0].split("|")):
        slot: int | None = None
        for pos, header in enumerate(window.headers):
            if header == name and pos not in used_headers:
                used_headers.add(pos)
                slot = window.col_ids[pos]
                break
        if slot is None:
            warnings += 1
        col_slots.append(slot)

    cells: set[tuple[int, int]] = set()
    for line in lines[1:]:
        values = [v.strip() for v in line.split("|")]
        if len(values) != len(col_slots):
            warnings += 1
        for value, col_id in zip(values, col_slots):
            if col_id is None:
                continue
            pos = pos_by_col[col_id]
            matches = [r for r in range(window.height) if window.cell(r, pos).strip() == value]
            if not matches:
                warnings += 1
                continue
            if len(matches) > 1:
                warnings += 1
            cells.add((window.row_ids[matches[0]], col_id))

    columns = frozenset(c for c in col_slots if c is not None) | frozenset(c for _, c in cells)
    return CellSelection(columns, frozenset(cells)), warnings

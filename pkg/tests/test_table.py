import pytest

from subtab import CellSelection, InvalidSelectionError, Question, Table, materialize, table_equals
from subtab.table import Window


@pytest.fixture
def grid5x4():
    return Table.from_rows(
        ["a", "b", "c", "d"],
        [[f"r{r}c{c}" for c in range(4)] for r in range(5)],
    )


def test_from_rows_assigns_identity_ids(grid5x4):
    assert grid5x4.row_ids == (0, 1, 2, 3, 4)
    assert grid5x4.col_ids == (0, 1, 2, 3)
    assert grid5x4.cell(2, 3) == "r2c3"


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        Table(headers=("a", "b"), cells=(("1",),), row_ids=(0,), col_ids=(0, 1))


def test_ids_must_increase():
    with pytest.raises(ValueError):
        Table(headers=("a",), cells=(("1",), ("2",)), row_ids=(1, 0), col_ids=(0,))


def test_materialize_full_selection_is_identity(grid5x4):
    full = CellSelection.from_cells(grid5x4.coordinates())
    assert table_equals(materialize(full, grid5x4), grid5x4)


def test_materialize_fills_rectangle(grid5x4):
    # Two scattered cells in columns 0 and 2 produce the 2x2 bounding
    # rectangle, with the unselected intersections copied from the source.
    selection = CellSelection.from_cells({(1, 0), (3, 2)})
    out = materialize(selection, grid5x4)
    assert out.row_ids == (1, 3)
    assert out.col_ids == (0, 2)
    assert out.cells == (("r1c0", "r1c2"), ("r3c0", "r3c2"))
    assert out.headers == ("a", "c")


def test_materialize_headers_only(grid5x4):
    selection = CellSelection(frozenset({1, 2}), frozenset())
    out = materialize(selection, grid5x4)
    assert out.row_ids == ()
    assert out.headers == ("b", "c")
    assert out.col_ids == (1, 2)


def test_materialize_rejects_zero_columns(grid5x4):
    with pytest.raises(InvalidSelectionError):
        materialize(CellSelection.empty(), grid5x4)


def test_materialize_rejects_outside_coordinates(grid5x4):
    with pytest.raises(InvalidSelectionError):
        materialize(CellSelection.from_cells({(9, 0)}), grid5x4)
    sub = materialize(CellSelection.from_cells({(1, 0), (1, 2)}), grid5x4)
    with pytest.raises(InvalidSelectionError):
        materialize(CellSelection.from_cells({(2, 0)}), sub)


def test_materialize_idempotent(grid5x4):
    selection = CellSelection.from_cells({(0, 1), (2, 1), (2, 3)})
    once = materialize(selection, grid5x4)
    again = materialize(CellSelection.from_cells(once.coordinates()), once)
    assert table_equals(once, again)


def test_materialize_preserves_order(grid5x4):
    selection = CellSelection.from_cells({(4, 3), (0, 0), (2, 1)})
    out = materialize(selection, grid5x4)
    assert list(out.row_ids) == sorted(out.row_ids)
    assert list(out.col_ids) == sorted(out.col_ids)
    assert out.n_rows == 3 and out.n_cols == 3


def test_table_equals_is_structural(grid5x4):
    assert table_equals(grid5x4, grid5x4)
    other = Table.from_rows(grid5x4.headers, [list(r) for r in grid5x4.cells])
    assert table_equals(grid5x4, other)


def test_table_equals_sees_one_cell_difference(grid5x4):
    rows = [list(r) for r in grid5x4.cells]
    rows[0][0] = "changed"
    assert not table_equals(grid5x4, Table.from_rows(grid5x4.headers, rows))


def test_table_equals_distinguishes_provenance():
    # Same visible content sliced from different rows of a repetitive table.
    table = Table.from_rows(["x"], [["same"], ["same"], ["same"]])
    a = materialize(CellSelection.from_cells({(0, 0)}), table)
    b = materialize(CellSelection.from_cells({(1, 0)}), table)
    assert a.cells == b.cells
    assert not table_equals(a, b)


def test_selection_validates_cell_columns():
    with pytest.raises(InvalidSelectionError):
        CellSelection(frozenset({0}), frozenset({(0, 1)}))


def test_question_requires_text():
    with pytest.raises(ValueError):
        Question("   ")
    assert Question("why?").text == "why?"


def test_window_views(grid5x4):
    w = Window(table=grid5x4, origin_row=1, origin_col=2, height=3, width=2)
    assert w.headers == ("c", "d")
    assert w.row_ids == (1, 2, 3)
    assert w.col_ids == (2, 3)
    assert w.cell(0, 0) == "r1c2"
    assert w.to_global(2, 1) == (3, 3)
    assert w.parent_dims == (5, 4)


def test_window_height_zero_keeps_headers(grid5x4):
    empty = materialize(CellSelection(frozenset({0, 1}), frozenset()), grid5x4)
    w = Window(table=empty, origin_row=0, origin_col=0, height=0, width=2)
    assert w.headers == ("a", "b")
    assert w.rows == ()


def test_window_bounds_checked(grid5x4):
    with pytest.raises(ValueError):
        Window(table=grid5x4, origin_row=3, origin_col=0, height=3, width=2)

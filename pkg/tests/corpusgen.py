"""Random corpus generation shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from subtab import Annotation, Condition, ConditionOp, Question, Table

VOCAB = [
    "alpha", "beta", "gamma", "delta", "red", "blue", "green",
    "0", "1", "2", "3", "5", "7", "9", "10", "12", "31", "31.0", "100",
    "1995-1997", "1998-2001", "Safe", "Eliminated", "", " 7 ",
]

OPS = [ConditionOp.EQUALS, ConditionOp.EQUALS, ConditionOp.GREATER_THAN, ConditionOp.LESS_THAN]


def random_table(rng: random.Random, max_rows: int = 12, max_cols: int = 12) -> Table:
    n_rows = rng.randint(1, max_rows)
    n_cols = rng.randint(1, max_cols)
    headers = [f"col{j}" for j in range(n_cols)]
    rows = [[rng.choice(VOCAB) for _ in range(n_cols)] for _ in range(n_rows)]
    return Table.from_rows(headers, rows)


def random_annotation(rng: random.Random, table: Table, max_conditions: int = 3) -> Annotation:
    n_cols = table.n_cols
    conditions = []
    for _ in range(rng.randint(0, max_conditions)):
        column = rng.randrange(n_cols)
        # Half the time target an actual cell value so conditions are
        # satisfiable; drop values that are empty after trimming.
        if rng.random() < 0.5 and table.n_rows:
            value = table.cell(rng.choice(table.row_ids), column)
        else:
            value = rng.choice(VOCAB)
        if not value.strip():
            value = "7"
        conditions.append(Condition(column=column, op=rng.choice(OPS), value=value))
    n_answers = min(rng.randint(1, 2), n_cols)
    answer_columns = frozenset(rng.sample(range(n_cols), n_answers))
    return Annotation(conditions=tuple(conditions), answer_columns=answer_columns)


def random_example(rng: random.Random, max_rows: int = 12, max_cols: int = 12):
    table = random_table(rng, max_rows, max_cols)
    annotation = random_annotation(rng, table)
    question = Question(f"synthetic question {rng.randrange(10**6)}")
    return table, question, annotation


def annotation_tuples(annotation: Annotation) -> list[tuple[int, str, str]]:
    """Conditions as plain tuples for the reference simulator."""
    return [(c.column, c.op.value, c.value) for c in annotation.conditions]

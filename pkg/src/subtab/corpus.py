"""Corpus ingestion: JSON-lines records of tables, questions and annotations.

One record per line:

    {"table_id": "t1", "question_id": "q1",
     "headers": ["Name", "Score"], "rows": [["a", "3"], ["b", "4"]],
     "question": "what is the score of a?",
     "conditions": [{"column": "Name", "op": "=", "value": "a"}],
     "answer_columns": ["Score"], "answers": ["3"]}

Column references resolve by 0-based index or exact header name. Instead of
inline rows a record may carry {"table_csv": "relative/path.csv"}; the CSV's
first row is the header. Malformed lines are fatal unless lenient loading is
requested, in which case they are logged with their line number and skipped.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusFormatError
from .selectors import Annotation, Condition, ConditionOp
from .table import Question, Table

logger = logging.getLogger(__name__)

_ALLOWED_KEYS = {
    "table_id",
    "question_id",
    "headers",
    "rows",
    "table_csv",
    "question",
    "conditions",
    "answer_columns",
    "answers",
}


@dataclass(frozen=True)
class CorpusExample:
    table_id: str
    question_id: str
    table: Table
    question: Question
    annotation: Annotation


def _as_cell(value, where: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool) or value is None:
        raise CorpusFormatError(f"{where}: cell values must be strings or numbers")
    if isinstance(value, (int, float)):
        return str(value)
    raise CorpusFormatError(f"{where}: cell values must be strings or numbers")


def _resolve_column(ref, headers: Sequence[str], where: str) -> int:
    if isinstance(ref, bool):
        raise CorpusFormatError(f"{where}: column reference must be an index or header name")
    if isinstance(ref, int):
        if not 0 <= ref < len(headers):
            raise CorpusFormatError(f"{where}: column index {ref} out of range")
        return ref
    if isinstance(ref, str):
        if ref in headers:
            return headers.index(ref)
        raise CorpusFormatError(f"{where}: no column named {ref!r}")
    raise CorpusFormatError(f"{where}: column reference must be an index or header name")


def _load_csv_table(path: Path, where: str) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise CorpusFormatError(f"{where}: sidecar table {path} does not exist")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise CorpusFormatError(f"{where}: sidecar table {path} is empty")
    return rows[0], rows[1:]


def parse_record(record: dict, where: str, base_dir: Path | None = None) -> CorpusExample:
    if not isinstance(record, dict):
        raise CorpusFormatError(f"{where}: record must be a JSON object")
    unknown = set(record) - _ALLOWED_KEYS
    if unknown:
        raise CorpusFormatError(f"{where}: unknown keys {sorted(unknown)}")
    for key in ("table_id", "question", "answer_columns"):
        if key not in record:
            raise CorpusFormatError(f"{where}: missing required key {key!r}")

    table_id = str(record["table_id"])
    question_id = str(record.get("question_id", f"{table_id}-q"))

    if "table_csv" in record:
        if "headers" in record or "rows" in record:
            raise CorpusFormatError(f"{where}: table_csv excludes inline headers/rows")
        csv_path = Path(record["table_csv"])
        if base_dir is not None and not csv_path.is_absolute():
            csv_path = base_dir / csv_path
        raw_headers, raw_rows = _load_csv_table(csv_path, where)
    else:
        if "headers" not in record or "rows" not in record:
            raise CorpusFormatError(f"{where}: need headers+rows or table_csv")
        raw_headers, raw_rows = record["headers"], record["rows"]

    if not isinstance(raw_headers, list) or not raw_headers:
        raise CorpusFormatError(f"{where}: headers must be a non-empty list")
    headers = [_as_cell(h, where) for h in raw_headers]
    if not isinstance(raw_rows, list):
        raise CorpusFormatError(f"{where}: rows must be a list")
    rows = []
    for i, raw_row in enumerate(raw_rows):
        if not isinstance(raw_row, list):
            raise CorpusFormatError(f"{where}: row {i} must be a list")
        if len(raw_row) != len(headers):
            raise CorpusFormatError(
                f"{where}: row {i} has {len(raw_row)} cells, expected {len(headers)}"
            )
        rows.append([_as_cell(v, where) for v in raw_row])
    table = Table.from_rows(headers, rows)

    question_text = record["question"]
    if not isinstance(question_text, str) or not question_text.strip():
        raise CorpusFormatError(f"{where}: question must be a non-empty string")

    conditions = []
    for i, raw in enumerate(record.get("conditions", [])):
        if not isinstance(raw, dict) or not {"column", "op", "value"} <= set(raw):
            raise CorpusFormatError(f"{where}: condition {i} needs column/op/value")
        try:
            op = ConditionOp.from_string(str(raw["op"]))
        except ValueError as exc:
            raise CorpusFormatError(f"{where}: condition {i}: {exc}") from exc
        value = _as_cell(raw["value"], where)
        if not value:
            raise CorpusFormatError(f"{where}: condition {i} has an empty value")
        column = _resolve_column(raw["column"], headers, f"{where}: condition {i}")
        conditions.append(Condition(column=column, op=op, value=value))

    raw_answer_cols = record["answer_columns"]
    if not isinstance(raw_answer_cols, list) or not raw_answer_cols:
        raise CorpusFormatError(f"{where}: answer_columns must be a non-empty list")
    answer_columns = frozenset(
        _resolve_column(ref, headers, f"{where}: answer_columns") for ref in raw_answer_cols
    )
    answers = tuple(_as_cell(a, where) for a in record.get("answers", []))

    return CorpusExample(
        table_id=table_id,
        question_id=question_id,
        table=table,
        question=Question(question_text),
        annotation=Annotation(
            conditions=tuple(conditions),
            answer_columns=answer_columns,
            gold_answers=answers,
        ),
    )


def load_corpus(path: str | Path, lenient: bool = False) -> list[CorpusExample]:
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"corpus file {path} does not exist")
    examples = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name}:{line_no}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                record = None
                error: CorpusFormatError | None = CorpusFormatError(f"{where}: invalid JSON ({exc})")
            else:
                error = None
            if error is None:
                try:
                    examples.append(parse_record(record, where, base_dir=path.parent))
                except CorpusFormatError as exc:
                    error = exc
            if error is not None:
                if lenient:
                    logger.warning("skipping malformed record: %s", error)
                    continue
                raise error
    return examples


def record_from_example(example: CorpusExample) -> dict:
    """Inverse of parse_record for round-tripping loaded corpora."""
    return {
        "table_id": example.table_id,
        "question_id": example.question_id,
        "headers": list(example.table.headers),
        "rows": [list(r) for r in example.table.cells],
        "question": example.question.text,
        "conditions": [
            {"column": c.column, "op": c.op.value, "value": c.value}
            for c in example.annotation.conditions
        ],
        "answer_columns": sorted(example.annotation.answer_columns),
        "answers": list(example.annotation.gold_answers),
    }


def write_corpus(records: Iterable[dict], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n


def write_subtables(results: Iterable[dict], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for result in results:
            fh.write(json.dumps(result, ensure_ascii=False) + "\n")
            n += 1
    return n


def subtable_record(
    table_id: str, question_id: str, table: Table, converged: bool, iterations: int
) -> dict:
    """Self-describing subtable output row (provenance ids included)."""
    return {
        "table_id": table_id,
        "question_id": question_id,
        "row_ids": list(table.row_ids),
        "col_ids": list(table.col_ids),
        "headers": list(table.headers),
        "cells": [list(r) for r in table.cells],
        "converged": converged,
        "iterations": iterations,
    }


def load_subtables(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"subtable file {path} does not exist")
    out = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path.name}:{line_no}: invalid JSON ({exc})") from exc
            required = {"table_id", "question_id", "row_ids", "col_ids", "headers", "cells"}
            missing = required - set(record)
            if missing:
                raise CorpusFormatError(f"{path.name}:{line_no}: missing keys {sorted(missing)}")
            out.append(record)
    return out


def subtable_to_table(record: dict) -> Table:
    return Table(
        headers=tuple(record["headers"]),
        cells=tuple(tuple(str(c) for c in row) for row in record["cells"]),
        row_ids=tuple(record["row_ids"]),
        col_ids=tuple(record["col_ids"]),
    )

"""Cell selectors: the deterministic condition oracle and a remote LM client.

Both map a (window, question) pair to a CellSelection and are safe to call
from multiple threads. The oracle additionally needs the question's
annotation (executable conditions plus answer columns); the remote selector
sees only the rendered prompt.
"""

from __future__ import annotations

import enum
import logging
import threading
import time
from dataclasses import dataclass
from typing import Optional

import requests

from .errors import SelectorUnavailableError
from .representation import PromptTemplate, decode_coordinate, default_template, render_prompt
from .table import CellSelection, Question, Window

logger = logging.getLogger(__name__)


class ConditionOp(enum.Enum):
    EQUALS = "="
    GREATER_THAN = ">"
    LESS_THAN = "<"

    @classmethod
    def from_string(cls, op: str) -> "ConditionOp":
        key = op.strip().lower()
        aliases = {
            "=": cls.EQUALS,
            "==": cls.EQUALS,
            "equals": cls.EQUALS,
            ">": cls.GREATER_THAN,
            "greater_than": cls.GREATER_THAN,
            "<": cls.LESS_THAN,
            "less_than": cls.LESS_THAN,
        }
        if key not in aliases:
            raise ValueError(f"unknown condition operator: {op!r}")
        return aliases[key]


@dataclass(frozen=True)
class Condition:
    """An executable (column, operator, value) predicate."""

    column: int
    op: ConditionOp
    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("condition value is empty")


@dataclass(frozen=True)
class Annotation:
    """Per-question labels: conditions, answer columns and gold answers."""

    conditions: tuple[Condition, ...]
    answer_columns: frozenset[int]
    gold_answers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.answer_columns:
            raise ValueError("annotation needs at least one answer column")

    @property
    def target_columns(self) -> frozenset[int]:
        """Condition and answer columns together."""
        return frozenset(c.column for c in self.conditions) | self.answer_columns


def parse_number(text: str) -> Optional[float]:
    try:
        return float(text.strip())
    except ValueError:
        return None


def values_equal(a: str, b: str) -> bool:
    """Equality used for conditions and augmentation: numeric when both sides
    parse as numbers, else trimmed case-insensitive string comparison."""
    na, nb = parse_number(a), parse_number(b)
    if na is not None and nb is not None:
        return na == nb
    return a.strip().casefold() == b.strip().casefold()


def condition_satisfied(cell: str, cond: Condition) -> bool:
    if cond.op is ConditionOp.EQUALS:
        return values_equal(cell, cond.value)
    na, nb = parse_number(cell), parse_number(cond.value)
    if na is not None and nb is not None:
        if cond.op is ConditionOp.GREATER_THAN:
            return na > nb
        return na < nb
    # Lexicographic fallback on the same normalization as equality.
    sa, sb = cell.strip().casefold(), cond.value.strip().casefold()
    if cond.op is ConditionOp.GREATER_THAN:
        return sa > sb
    return sa < sb


def oracle_select(window: Window, annotation: Annotation) -> CellSelection:
    """Window-local target: condition+answer columns inside the window,
    restricted to rows satisfying every condition whose column is inside.

    Conditions on columns outside the window impose no constraint; when no
    rows qualify the selection is headers-only. Windows containing neither a
    condition nor an answer column contribute nothing.
    """
    window_cols = set(window.col_ids)
    relevant = annotation.target_columns & window_cols
    if not relevant:
        return CellSelection.empty()

    pos_by_col = {cid: pos for pos, cid in enumerate(window.col_ids)}
    local_conditions = [c for c in annotation.conditions if c.column in window_cols]

    qualifying = [
        row_id
        for row_pos, row_id in enumerate(window.row_ids)
        if all(
            condition_satisfied(window.cell(row_pos, pos_by_col[c.column]), c)
            for c in local_conditions
        )
    ]
    cells = frozenset((r, c) for r in qualifying for c in relevant)
    return CellSelection(frozenset(relevant), cells)


@dataclass(frozen=True)
class RemoteSelectorConfig:
    """Chat-completion endpoint settings. Temperature is pinned to 0:
    the fixed-point loop needs a deterministic selector."""

    endpoint: str
    model: str
    api_key: Optional[str] = None
    temperature: float = 0.0
    max_tokens: int = 512
    retries: int = 2
    timeout: float = 30.0
    max_concurrent: int = 4

    def __post_init__(self) -> None:
        if self.temperature != 0.0:
            raise ValueError("remote selector temperature must be 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class OracleSelector:
    """Selector handle executing annotation rules; needs an annotation."""

    name = "oracle"

    def __call__(
        self, window: Window, question: Question, annotation: Optional[Annotation]
    ) -> tuple[CellSelection, int]:
        if annotation is None:
            raise ValueError("the oracle selector requires an annotation")
        return oracle_select(window, annotation), 0


class RemoteSelector:
    """Selector handle backed by a chat-completion HTTP endpoint."""

    name = "remote"

    def __init__(self, config: RemoteSelectorConfig, template: PromptTemplate | None = None):
        self.config = config
        self.template = template or default_template()
        self._slots = threading.BoundedSemaphore(config.max_concurrent)

    def __call__(
        self, window: Window, question: Question, annotation: Optional[Annotation] = None
    ) -> tuple[CellSelection, int]:
        prompt = render_prompt(window, question, self.template)
        with self._slots:
            text = self._complete(prompt)
        selection, warnings = decode_coordinate(text, window)
        if warnings:
            logger.warning(
                "selector output for window (%d, %d): %d parse warnings",
                window.origin_row,
                window.origin_col,
                warnings,
            )
        return selection, warnings

    def _complete(self, prompt: str) -> str:
        cfg = self.config
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "max_tokens": cfg.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"

        last_error: Exception | None = None
        for attempt in range(cfg.retries + 1):
            try:
                response = requests.post(
                    cfg.endpoint, json=payload, headers=headers, timeout=cfg.timeout
                )
                response.raise_for_status()
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < cfg.retries:
                    logger.warning("selector request failed (%s), retrying", exc)
                    time.sleep(min(0.2 * (attempt + 1), 1.0))
        raise SelectorUnavailableError(f"selector endpoint failed after {cfg.retries + 1} attempts: {last_error}")


def remote_select(
    window: Window,
    question: Question,
    config: RemoteSelectorConfig,
    template: PromptTemplate | None = None,
) -> CellSelection:
    """One-shot remote selection; parse warnings are logged, not surfaced."""
    selection, _ = RemoteSelector(config, template)(window, question)
    return selection

import json

import pytest

from subtab import (
    Annotation,
    BucketSpec,
    Condition,
    ConditionOp,
    Question,
    Table,
    WindowConfig,
    augment_same_value,
    balance_pairs,
    generate_pairs,
    oracle_select,
    synthesize_bucket_corpus,
)
from subtab.datagen import bucket_histogram, histogram_to_json, write_pairs
from subtab.corpus import parse_record


def test_pair_count_matches_windowing():
    table = Table.from_rows(
        [f"h{c}" for c in range(5)],
        [[f"{r}.{c}" for c in range(5)] for r in range(6)],
    )
    annotation = Annotation(conditions=(), answer_columns=frozenset({0}))
    pairs = generate_pairs(table, Question("q"), annotation, WindowConfig(w=4))
    assert len(pairs) == 6


def test_targets_are_oracle_selections(dance_example):
    pairs = generate_pairs(
        dance_example.table,
        dance_example.question,
        dance_example.annotation,
        WindowConfig(w=4),
        table_id=dance_example.table_id,
        question_id=dance_example.question_id,
    )
    from subtab import encode_coordinate

    for pair in pairs:
        expected = oracle_select(pair.window, dance_example.annotation)
        assert pair.selection == expected
        assert pair.target == encode_coordinate(pair.window, expected)
        assert pair.m == len(expected.rows)
        assert pair.n == len(expected.columns)


def test_figure_archetypes_present(dance_example):
    pairs = {
        p.window_origin: p
        for p in generate_pairs(
            dance_example.table, dance_example.question, dance_example.annotation, WindowConfig(w=4)
        )
    }
    condition_only = pairs[(0, 4)]
    assert condition_only.selection.columns == frozenset({4, 5, 6})
    assert condition_only.m == 1 and condition_only.n == 3

    headers_only = pairs[(1, 1)]
    assert headers_only.selection.columns == frozenset({3, 4})
    assert headers_only.m == 0 and headers_only.n == 2
    assert "columns: Goodman | Horwood" in headers_only.target

    answer_only = pairs[(0, 0)]
    assert answer_only.selection.columns == frozenset({3})
    assert answer_only.m == 4 and answer_only.n == 1


def test_zero_column_targets_flow_through():
    table = Table.from_rows(
        [f"h{c}" for c in range(8)],
        [[f"{r}.{c}" for c in range(8)] for r in range(4)],
    )
    annotation = Annotation(conditions=(), answer_columns=frozenset({7}))
    pairs = generate_pairs(table, Question("q"), annotation, WindowConfig(w=4))
    ns = {p.window_origin: p.n for p in pairs}
    assert ns[(0, 0)] == 0  # window sees no relevant column
    assert ns[(0, 4)] == 1
    balanced, _ = balance_pairs(pairs, BucketSpec.uniform(4, 100), seed=1)
    assert all(p.n >= 1 for p in balanced)


def test_bucket_spec_keys_validated():
    with pytest.raises(ValueError):
        BucketSpec(w=4, counts={(0, 0): 1})
    spec = BucketSpec.uniform(4, 3)
    assert len(spec.counts) == 20


def test_balance_uniform_with_ample_supply():
    records = synthesize_bucket_corpus(w=4, per_bucket=7, seed=3)
    pairs = []
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        pairs.extend(
            generate_pairs(
                example.table, example.question, example.annotation, WindowConfig(w=4),
                table_id=example.table_id, question_id=example.question_id,
            )
        )
    spec = BucketSpec.uniform(4, 5)
    balanced, histogram = balance_pairs(pairs, spec, seed=11)
    assert set(histogram.values()) == {5}
    assert len(balanced) == 5 * 20


def test_balance_short_supply_takes_available():
    records = synthesize_bucket_corpus(w=2, per_bucket=2, seed=5)
    pairs = []
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        pairs.extend(generate_pairs(example.table, example.question, example.annotation, WindowConfig(w=2)))
    spec = BucketSpec.uniform(2, 10)
    _, histogram = balance_pairs(pairs, spec, seed=0)
    assert all(count == 2 for count in histogram.values())


def test_balance_deterministic():
    records = synthesize_bucket_corpus(w=3, per_bucket=6, seed=9)
    pairs = []
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        pairs.extend(generate_pairs(example.table, example.question, example.annotation, WindowConfig(w=3)))
    spec = BucketSpec.uniform(3, 4)
    first, hist1 = balance_pairs(pairs, spec, seed=42)
    second, hist2 = balance_pairs(pairs, spec, seed=42)
    assert [p.to_record() for p in first] == [p.to_record() for p in second]
    assert hist1 == hist2
    third, _ = balance_pairs(pairs, spec, seed=43)
    assert [p.to_record() for p in first] != [p.to_record() for p in third]


def test_augment_adds_duplicate_values():
    table = Table.from_rows(
        ["name", "score", "note"],
        [["7", "7", "x"], ["a", "b", "c"], ["d", "e", "7"]],
    )
    annotation = Annotation(
        conditions=(Condition(column=0, op=ConditionOp.EQUALS, value="7"),),
        answer_columns=frozenset({1}),
    )
    pairs = generate_pairs(table, Question("q"), annotation, WindowConfig(w=3))
    assert len(pairs) == 1
    (pair,) = pairs
    assert pair.selection.cells == frozenset({(0, 0), (0, 1)})

    (augmented,) = augment_same_value(pairs)
    assert augmented.augmented
    # "7" recurs at (2, 2); the target grows and its metadata follows.
    assert augmented.selection.cells == frozenset({(0, 0), (0, 1), (2, 2)})
    assert augmented.selection.columns == frozenset({0, 1, 2})
    assert (augmented.m, augmented.n) == (2, 3)


def test_augment_no_op_on_distinct_values(dance_example):
    table = Table.from_rows(["a", "b"], [["1", "2"], ["3", "4"]])
    annotation = Annotation(
        conditions=(Condition(column=0, op=ConditionOp.EQUALS, value="1"),),
        answer_columns=frozenset({1}),
    )
    pairs = generate_pairs(table, Question("q"), annotation, WindowConfig(w=2))
    augmented = augment_same_value(pairs)
    assert [p.to_record() for p in augmented] == [p.to_record() for p in pairs]
    assert not any(p.augmented for p in augmented)


def test_augment_only_grows():
    records = synthesize_bucket_corpus(w=3, per_bucket=2, seed=1)
    pairs = []
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        pairs.extend(generate_pairs(example.table, example.question, example.annotation, WindowConfig(w=3)))
    for before, after in zip(pairs, augment_same_value(pairs)):
        assert before.selection.cells <= after.selection.cells
        assert before.selection.columns <= after.selection.columns


def test_write_pairs_and_histogram(tmp_path):
    records = synthesize_bucket_corpus(w=2, per_bucket=1, seed=2)
    pairs = []
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        pairs.extend(generate_pairs(example.table, example.question, example.annotation, WindowConfig(w=2)))
    out = tmp_path / "pairs.jsonl"
    n = write_pairs(pairs, out)
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == n == len(pairs)
    assert set(lines[0]) == {"prompt", "target", "m", "n", "table_id", "question_id", "window_origin"}

    histogram = bucket_histogram(pairs)
    as_json = histogram_to_json(histogram)
    assert all(key.startswith("(") for key in as_json)
    assert sum(as_json.values()) == len(pairs)


def test_synthetic_corpus_hits_every_bucket():
    records = synthesize_bucket_corpus(w=4, per_bucket=3, seed=7)
    assert len(records) == 3 * 20
    histogram: dict[tuple[int, int], int] = {}
    for i, record in enumerate(records):
        example = parse_record(record, where=f"synth:{i}")
        (pair,) = generate_pairs(example.table, example.question, example.annotation, WindowConfig(w=4))
        histogram[(pair.m, pair.n)] = histogram.get((pair.m, pair.n), 0) + 1
    assert histogram == {(m, n): 3 for m in range(5) for n in range(1, 5)}

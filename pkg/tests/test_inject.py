"""Error injection: op mechanics, determinism, policies, edit bounds."""

import random

import pytest

from ghalat.inject import (
    ALL_OPS,
    CorruptionConfig,
    Fixed,
    InjectionReport,
    Mixed,
    OpKind,
    OpRecord,
    Varied,
    apply_op,
    corrupt_corpus,
    corrupt_indexed,
    corrupt_line,
    derive_seed,
    op_cost,
    op_count,
)
from ghalat.keyboard import DEFAULT_NEIGHBORS, build_adjacency
from ghalat.metrics import edit_counts
from ghalat.normalize import ARABIC_LETTERS, DEFAULT_VALID_CHARS

LINE = "كتب النور على الجدار"  # 20 chars


class TestOpCount:
    def test_examples(self):
        assert op_count(40, 0.05) == 2
        assert op_count(15, 0.05) == 0
        assert op_count(128, 0.10) == 12

    def test_float_representation_does_not_lose_an_op(self):
        # 100 * 0.29 is 28.999999999999996 in binary floating point
        assert op_count(100, 0.29) == 29

    def test_zero_psi(self):
        assert op_count(500, 0.0) == 0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            op_count(-1, 0.5)
        with pytest.raises(ValueError):
            op_count(10, 1.5)


class TestApplyOp:
    def test_transposition_swaps_adjacent(self):
        rng = random.Random(0)
        out, record = apply_op("اب", OpKind.TRANSPOSITION, rng, CorruptionConfig())
        assert out == "با"
        assert record.removed == "اب" and record.added == "با"

    def test_deletion_removes_one_codepoint(self):
        rng = random.Random(1)
        out, record = apply_op(LINE, OpKind.DELETION, rng, CorruptionConfig())
        assert len(out) == len(LINE) - 1
        assert record.removed == LINE[record.position]

    def test_insertion_adds_alphabet_codepoint(self):
        rng = random.Random(2)
        out, record = apply_op(LINE, OpKind.INSERTION, rng, CorruptionConfig())
        assert len(out) == len(LINE) + 1
        assert record.added in DEFAULT_VALID_CHARS
        assert out[record.position] == record.added

    def test_substitution_keyboard_mode_picks_a_neighbor(self):
        config = CorruptionConfig(substitution_keyboard_prob=1.0)
        rng = random.Random(3)
        for _ in range(200):
            out, record = apply_op(LINE, OpKind.SUBSTITUTION, rng, config)
            assert len(out) == len(LINE)
            if record.removed in DEFAULT_NEIGHBORS:
                assert record.added in DEFAULT_NEIGHBORS[record.removed]

    def test_substitution_random_mode_stays_in_alphabet(self):
        config = CorruptionConfig(substitution_keyboard_prob=0.0)
        rng = random.Random(4)
        for _ in range(100):
            _, record = apply_op(LINE, OpKind.SUBSTITUTION, rng, config)
            assert record.added in DEFAULT_VALID_CHARS

    def test_mapping_replaces_pattern_occurrence(self):
        config = CorruptionConfig(mapping_rules=(("ة", ("ه",)),))
        rng = random.Random(5)
        line = "مدرسة"
        out, record = apply_op(line, OpKind.MAPPING, rng, config)
        assert out == "مدرسه"
        assert (record.removed, record.added) == ("ة", "ه")

    def test_mapping_without_match_is_recorded_noop(self):
        config = CorruptionConfig(mapping_rules=(("ة", ("ه",)),))
        rng = random.Random(6)
        out, record = apply_op("كتب", OpKind.MAPPING, rng, config)
        assert out == "كتب"
        assert not record.applied and op_cost(record) == 0

    def test_pattern_deletion_behind_config_flag(self):
        config = CorruptionConfig(
            mapping_rules=(("ال", ("ا",)),),
            pattern_delete_prob=1.0,
        )
        rng = random.Random(7)
        out, record = apply_op("النور", OpKind.DELETION, rng, config)
        assert out == "نور"
        assert record.removed == "ال" and op_cost(record) == 2

    def test_preconditions_raise_for_caller(self):
        rng = random.Random(8)
        with pytest.raises(ValueError):
            apply_op("", OpKind.DELETION, rng, CorruptionConfig())
        with pytest.raises(ValueError):
            apply_op("ك", OpKind.TRANSPOSITION, rng, CorruptionConfig())


class TestCorruptLine:
    def test_zero_psi_is_identity(self):
        pair = corrupt_line(LINE, 0.0, seed=1)
        assert pair.corrupted == LINE and pair.ops == ()

    def test_short_line_at_low_psi_is_identity(self):
        line = "كتب النور معادن"  # 15 chars
        assert len(line) == 15
        pair = corrupt_line(line, 0.05, seed=1)
        assert pair.corrupted == line

    def test_deterministic_for_same_inputs(self):
        a = corrupt_line(LINE, 0.2, seed=77)
        b = corrupt_line(LINE, 0.2, seed=77)
        assert a == b

    def test_op_count_uses_original_length(self):
        pair = corrupt_line(LINE, 0.2, seed=3)
        assert len(pair.ops) == op_count(len(LINE), 0.2)

    def test_edit_bound_holds(self):
        """distance(corrupted, clean) <= sum of per-op costs <= 2 * ops."""
        rng = random.Random(42)
        for seed in range(300):
            psi = rng.uniform(0.0, 0.3)
            pair = corrupt_line(LINE, psi, seed=seed)
            if not pair.corrupted:
                continue
            distance = edit_counts(pair.clean, pair.corrupted).distance
            assert distance <= pair.cost_bound() <= 2 * len(pair.ops)

    def test_exhausted_retries_record_noop(self):
        config = CorruptionConfig(ops=(OpKind.TRANSPOSITION,))
        pair = corrupt_line("ك", 1.0, seed=9, config=config)
        assert pair.corrupted == "ك"
        assert len(pair.ops) == 1 and not pair.ops[0].applied

    def test_corrupted_stays_in_alphabet(self):
        for seed in range(100):
            pair = corrupt_line(LINE, 0.25, seed=seed)
            assert set(pair.corrupted) <= set(DEFAULT_VALID_CHARS)


class TestPolicies:
    def test_fixed_one_pair_per_line(self):
        lines = [LINE] * 10
        config = CorruptionConfig(psi_policy=Fixed(0.05), seed=5)
        pairs = list(corrupt_corpus(lines, config))
        assert len(pairs) == 10
        assert all(pair.psi_used == 0.05 for pair in pairs)

    def test_mixed_emits_each_line_per_psi_adjacently(self):
        lines = [LINE] * 5
        config = CorruptionConfig(psi_policy=Mixed((0.05, 0.10)), seed=5)
        pairs = list(corrupt_corpus(lines, config))
        assert len(pairs) == 10
        assert [pair.psi_used for pair in pairs[:4]] == [0.05, 0.10, 0.05, 0.10]
        # the two variants of one line use independent randomness
        assert pairs[0].corrupted != pairs[1].corrupted or pairs[0].ops != pairs[1].ops

    def test_varied_draws_psi_within_range(self):
        lines = [LINE] * 200
        config = CorruptionConfig(psi_policy=Varied(0.025, 0.10), seed=5)
        pairs = list(corrupt_corpus(lines, config))
        values = {pair.psi_used for pair in pairs}
        assert all(0.025 <= v <= 0.10 for v in values)
        assert len(values) > 100  # actually varies

    def test_full_deletion_is_discarded_and_counted(self):
        config = CorruptionConfig(ops=(OpKind.DELETION,), psi_policy=Fixed(1.0), seed=1)
        report = InjectionReport()
        pairs = list(corrupt_corpus(["كت"], config, report))
        assert pairs == []
        assert report.discarded_empty == 1 and report.pairs_out == 0


class TestDeterminism:
    def test_indexed_equals_streamed(self):
        """Sharding by line index reproduces the streamed output."""
        lines = [LINE, LINE[:15], LINE[2:], LINE.replace(" ", "")]
        config = CorruptionConfig(psi_policy=Mixed((0.1, 0.3)), seed=123)
        streamed = list(corrupt_corpus(lines, config))
        sharded = []
        for index in [0, 1, 2, 3]:
            sharded.extend(corrupt_indexed(index, lines[index], config))
        assert streamed == [pair for pair in sharded if pair.corrupted]

    def test_seed_changes_output(self):
        a = list(corrupt_corpus([LINE] * 5, CorruptionConfig(seed=1)))
        b = list(corrupt_corpus([LINE] * 5, CorruptionConfig(seed=2)))
        assert a != b

    def test_derived_seeds_do_not_collide(self):
        seeds = {derive_seed(99, index) for index in range(20000)}
        assert len(seeds) == 20000


class TestConfig:
    def test_json_round_trip(self):
        config = CorruptionConfig(
            psi_policy=Varied(0.025, 0.10),
            substitution_keyboard_prob=0.7,
            seed=314,
        )
        assert CorruptionConfig.from_json(config.to_json()) == config

    def test_mixed_policy_round_trip(self):
        config = CorruptionConfig(psi_policy=Mixed((0.05, 0.1)))
        assert CorruptionConfig.from_json(config.to_json()) == config

    def test_neighbor_outside_alphabet_rejected(self):
        with pytest.raises(ValueError):
            CorruptionConfig(keyboard_neighbors={"ك": ("q",)})

    def test_mapping_target_outside_alphabet_rejected(self):
        with pytest.raises(ValueError):
            CorruptionConfig(mapping_rules=(("ك", ("7",)),))

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            Fixed(1.5)
        with pytest.raises(ValueError):
            Mixed(())
        with pytest.raises(ValueError):
            Varied(0.5, 0.2)
        with pytest.raises(ValueError):
            CorruptionConfig(ops=())

    def test_op_record_round_trip(self):
        record = OpRecord(OpKind.MAPPING, 4, "ة", "ه")
        assert OpRecord.from_dict(record.to_dict()) == record


class TestKeyboard:
    def test_every_letter_has_neighbors(self):
        for letter in ARABIC_LETTERS:
            assert DEFAULT_NEIGHBORS.get(letter), f"no neighbors for {letter!r}"

    def test_adjacency_is_symmetric(self):
        for letter, neighbors in DEFAULT_NEIGHBORS.items():
            for other in neighbors:
                assert letter in DEFAULT_NEIGHBORS[other]

    def test_same_key_letters_are_neighbors(self):
        assert "أ" in DEFAULT_NEIGHBORS["ا"]  # alef and alef-hamza share a key

    def test_reach_controls_neighborhood_size(self):
        tight = build_adjacency(reach=1.01)
        assert len(tight["س"]) < len(DEFAULT_NEIGHBORS["س"])

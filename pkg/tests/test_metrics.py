"""Edit counts, rates, reduction rates, and decomposition determinism."""

import random

import pytest

from ghalat.metrics import (
    EditCounts,
    EmptyCorpus,
    EmptyReference,
    Granularity,
    corpus_rates,
    edit_counts,
    err,
    rate,
    _edit_python,
)

REF_SENTENCE = "إن الذهب من المعادن النفيسة"
HYP_SENTENCE = "إن الذب من المعادرن النفيسة"


def backtrace_counts(ref, hyp):
    """Independent full-table DP with an explicit backtrace using the
    same substitution > deletion > insertion preference."""
    n, m = len(ref), len(hyp)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            table[i][j] = min(
                table[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
            )
    s = d = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if (
            i > 0
            and j > 0
            and table[i][j] == table[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])
        ):
            s += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and table[i][j] == table[i - 1][j] + 1:
            d += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return table[n][m], s, d, ins


class TestEditCounts:
    def test_identity(self):
        counts = edit_counts("كتب", "كتب")
        assert (counts.substitutions, counts.deletions, counts.insertions) == (0, 0, 0)
        assert counts.reference_length == 3

    def test_single_token_deletion(self):
        counts = edit_counts(["a", "b", "c"], ["a", "c"])
        assert counts.deletions == 1 and counts.distance == 1

    def test_correction_sample_word_level(self):
        """Five reference words, two corrupted: S=2, N=5, WER 0.40."""
        counts = edit_counts(REF_SENTENCE.split(), HYP_SENTENCE.split())
        assert counts.substitutions == 2
        assert counts.distance == 2
        assert counts.reference_length == 5
        assert rate(REF_SENTENCE, HYP_SENTENCE, Granularity.WORD) == pytest.approx(0.4)

    def test_correction_sample_char_level(self):
        # one deleted heh, one inserted reh
        counts = edit_counts(REF_SENTENCE, HYP_SENTENCE)
        assert (counts.substitutions, counts.deletions, counts.insertions) == (0, 1, 1)
        assert counts.reference_length == 27

    def test_adjacent_swap_costs_two(self):
        assert rate("ab", "ba") == 1.0
        counts = edit_counts("ab", "ba")
        assert counts.distance == 2

    def test_empty_hypothesis_is_all_deletions(self):
        counts = edit_counts("abcd", "")
        assert counts.deletions == 4
        assert rate("abcd", "") == 1.0

    def test_empty_reference_raises(self):
        with pytest.raises(EmptyReference):
            edit_counts("", "abc")
        with pytest.raises(EmptyReference):
            rate("", "abc")

    def test_decomposition_matches_backtrace_oracle(self):
        """Forward-carried counts equal a full-table backtrace exactly."""
        rng = random.Random(99)
        for _ in range(3000):
            ref = "".join(rng.choice("abc") for _ in range(rng.randint(1, 12)))
            hyp = "".join(rng.choice("abc") for _ in range(rng.randint(0, 12)))
            counts = edit_counts(ref, hyp)
            dist, s, d, ins = backtrace_counts(ref, hyp)
            assert (counts.distance, counts.substitutions, counts.deletions,
                    counts.insertions) == (dist, s, d, ins), (ref, hyp)

    def test_python_fallback_agrees_with_kernel(self):
        rng = random.Random(5)
        for _ in range(500):
            ref = [rng.randrange(4) for _ in range(rng.randint(1, 10))]
            hyp = [rng.randrange(4) for _ in range(rng.randint(0, 10))]
            counts = edit_counts(ref, hyp)
            dist, s, d, ins = _edit_python(ref, hyp)
            assert (counts.distance, counts.substitutions, counts.deletions,
                    counts.insertions) == (dist, s, d, ins)


class TestMetricProperties:
    def test_distance_is_a_metric(self):
        """Zero on identity, symmetric, triangle inequality."""
        rng = random.Random(17)
        strings = [
            "".join(rng.choice("xyz") for _ in range(rng.randint(1, 8)))
            for _ in range(60)
        ]
        for a in strings[:20]:
            assert edit_counts(a, a).distance == 0
        for _ in range(300):
            a, b, c = rng.sample(strings, 3)
            dab = edit_counts(a, b)
            dba = edit_counts(b, a)
            # distance is symmetric; the S/D/I split need not mirror,
            # the tie-break may pick a different optimal path per side
            assert dab.distance == dba.distance
            assert dab.substitutions + dab.deletions + dab.insertions == dab.distance
            dac = edit_counts(a, c).distance
            dbc = edit_counts(b, c).distance
            assert dac <= dab.distance + dbc

    def test_rates_are_non_negative_and_can_exceed_one(self):
        assert rate("ab", "abcdef") == 2.0


class TestErr:
    def test_published_reduction_examples(self):
        assert err(0.2972, 0.048) == pytest.approx(0.8384, abs=5e-4)
        assert err(0.0503, 0.0111) == pytest.approx(0.7793, abs=5e-4)

    def test_no_change_means_zero(self):
        assert err(0.3, 0.3) == 0.0

    def test_worsening_goes_negative(self):
        assert err(0.1, 0.2) == pytest.approx(-1.0)

    def test_algebra(self):
        rng = random.Random(3)
        for _ in range(200):
            a = rng.uniform(1e-6, 2.0)
            r = rng.uniform(0.0, 1.0)
            assert err(a, a * (1 - r)) == pytest.approx(r, abs=1e-9)

    def test_zero_before_raises(self):
        with pytest.raises(ZeroDivisionError):
            err(0.0, 0.1)
        with pytest.raises(ValueError):
            err(-0.1, 0.1)


class TestCorpusRates:
    def test_micro_pools_counts(self):
        pairs = [("aaaaaaaaaa", "aaaaaaaaab"), ("bbbbbbbbbb", "bbbbbbbaaa")]
        report = corpus_rates(pairs)
        assert report.cer == pytest.approx(4 / 20)
        assert report.counts_char.reference_length == 20

    def test_macro_averages_per_pair_rates(self):
        pairs = [("aaaaaaaaaa", "aaaaaaaaab"), ("bbbbb", "bbaaa")]
        micro = corpus_rates(pairs)
        macro = corpus_rates(pairs, average="macro")
        assert micro.cer == pytest.approx(4 / 15)
        assert macro.cer == pytest.approx((0.1 + 0.6) / 2)

    def test_identical_pairs_score_zero(self):
        report = corpus_rates([("كتب نور", "كتب نور")] * 2)
        assert report.cer == 0.0 and report.wer == 0.0

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            corpus_rates([])

    def test_unknown_average_rejected(self):
        with pytest.raises(ValueError):
            corpus_rates([("a", "a")], average="median")

    def test_report_serializes(self):
        report = corpus_rates([("ab", "ab")])
        data = report.to_dict()
        assert set(data) == {"cer", "wer", "counts_char", "counts_word"}

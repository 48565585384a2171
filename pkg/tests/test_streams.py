import pytest
from hypothesis import given, strategies as st

from tagstab import (
    EmptyInputError,
    FrequencySnapshot,
    ParameterError,
    RankedList,
    RankEntry,
    TagAssignment,
    TagStream,
    normalize_tag,
    proportion_trajectory,
    rank,
    snapshot,
)


def stream_of(tags, resource_id="r"):
    return TagStream.from_tags(resource_id, tags)


class TestTypes:
    def test_normalize_tag(self):
        assert normalize_tag("  Mixed Case\t") == "mixed case"

    def test_assignment_rejects_empty_tag(self):
        with pytest.raises(ParameterError):
            TagAssignment("r", "", 1)

    def test_assignment_rejects_nonpositive_seq(self):
        with pytest.raises(ParameterError):
            TagAssignment("r", "a", 0)

    def test_stream_requires_contiguous_seq(self):
        parts = (TagAssignment("r", "a", 1), TagAssignment("r", "b", 3))
        with pytest.raises(ParameterError):
            TagStream("r", parts)

    def test_stream_requires_matching_resource(self):
        with pytest.raises(ParameterError):
            TagStream("r", (TagAssignment("other", "a", 1),))

    def test_from_tags_numbers_from_one(self):
        s = stream_of(["a", "b"])
        assert [a.seq for a in s.assignments] == [1, 2]
        assert s.tags == ("a", "b")

    def test_snapshot_validates_totals(self):
        with pytest.raises(ParameterError):
            FrequencySnapshot("r", 3, {"a": 1, "b": 1})
        with pytest.raises(ParameterError):
            FrequencySnapshot("r", 1, {"a": 0, "b": 1})

    def test_ranked_list_rejects_broken_competition_ranks(self):
        with pytest.raises(ParameterError):
            RankedList((RankEntry("a", 3, 1), RankEntry("b", 3, 1), RankEntry("c", 2, 2)))
        with pytest.raises(ParameterError):
            RankedList((RankEntry("a", 3, 1), RankEntry("b", 2, 3)))
        with pytest.raises(ParameterError):
            RankedList((RankEntry("a", 3, 1), RankEntry("a", 2, 2)))


class TestSnapshot:
    def test_counts_prefix(self):
        s = stream_of(["a", "b", "a"])
        assert snapshot(s, 3).counts == {"a": 2, "b": 1}
        assert snapshot(s, 3).n == 3

    def test_shorter_prefix(self):
        s = stream_of(["a", "b", "a"])
        assert snapshot(s, 1).counts == {"a": 1}

    def test_out_of_range(self):
        s = stream_of(["a"])
        with pytest.raises(ParameterError):
            snapshot(s, 2)
        with pytest.raises(ParameterError):
            snapshot(s, 0)

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=30), st.data())
    def test_counts_sum_to_prefix_length(self, tags, data):
        s = stream_of(tags)
        n = data.draw(st.integers(1, len(tags)))
        assert sum(snapshot(s, n).counts.values()) == n


class TestRank:
    def test_competition_ranks(self):
        ranked = rank(FrequencySnapshot("r", 12, {"a": 5, "b": 3, "c": 3, "d": 1}))
        assert [(e.tag, e.rank) for e in ranked.entries] == [
            ("a", 1),
            ("b", 2),
            ("c", 2),
            ("d", 4),
        ]

    def test_all_tied(self):
        ranked = rank(FrequencySnapshot("r", 4, {"a": 1, "b": 1, "c": 1, "d": 1}))
        assert {e.rank for e in ranked.entries} == {1}

    def test_single_entry(self):
        ranked = rank(FrequencySnapshot("r", 7, {"x": 7}))
        assert ranked.entries == (RankEntry("x", 7, 1),)

    def test_empty_snapshot(self):
        with pytest.raises(EmptyInputError):
            rank(FrequencySnapshot("r", 0, {}))

    def test_insertion_order_does_not_matter(self):
        a = rank(FrequencySnapshot("r", 9, {"a": 5, "b": 3, "c": 1}))
        b = rank(FrequencySnapshot("r", 9, {"c": 1, "a": 5, "b": 3}))
        assert a == b

    @given(st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 9), min_size=1))
    def test_rank_counts_strictly_greater(self, counts):
        ranked = rank(FrequencySnapshot("r", sum(counts.values()), counts))
        for entry in ranked.entries:
            greater = sum(1 for c in counts.values() if c > entry.count)
            assert entry.rank == 1 + greater


class TestProportions:
    def test_example(self):
        points = proportion_trajectory(stream_of(["a", "a", "b", "a"]), 2)
        assert points == ((2, {"a": 1.0}), (4, {"a": 0.75, "b": 0.25}))

    def test_constant_stream(self):
        points = proportion_trajectory(stream_of(["x"] * 30), 10)
        assert all(p == {"x": 1.0} for _, p in points)

    def test_empty_stream(self):
        with pytest.raises(EmptyInputError):
            proportion_trajectory(TagStream("r", ()), 5)

    def test_bad_window(self):
        with pytest.raises(ParameterError):
            proportion_trajectory(stream_of(["a"]), 0)

    @given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=40), st.integers(1, 10))
    def test_points_sum_to_one(self, tags, window):
        for _, proportions in proportion_trajectory(stream_of(tags), window):
            assert all(v >= 0 for v in proportions.values())
            assert abs(sum(proportions.values()) - 1.0) <= 1e-12

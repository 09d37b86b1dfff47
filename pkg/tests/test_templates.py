from __future__ import annotations

import random

import pytest

from shortcutaudit.templates import (
    MatchSpan,
    Slot,
    Template,
    canonical,
    display,
    is_ancestor,
    match_spans,
    matches,
    parents,
    parse,
    template_id,
)

from .corpusgen import random_instances
from .reference_miner import ref_enumerate, ref_match


def t1(pos, word=None):
    return Template(slots=(Slot(pos=pos, word=word),))


def t2(pos1, w1, gap, pos2, w2):
    return Template(slots=(Slot(pos=pos1, word=w1), Slot(pos=pos2, word=w2)), gap=gap)


THE_WILL = t2("DET", "The", 1, "VERB", "will")


class TestMatching:
    def test_paper_sentence_matches(self, leave_sentence):
        assert matches(THE_WILL, leave_sentence)

    def test_gap_mismatch(self, leave_sentence):
        assert not matches(t2("DET", "The", 0, "VERB", "will"), leave_sentence)

    def test_pos_only_slot(self, leave_sentence):
        assert matches(t1("VERB"), leave_sentence)

    def test_spans_for_paper_sentence(self, leave_sentence):
        spans = match_spans(THE_WILL, leave_sentence)
        assert spans == [MatchSpan("s-leave", (0, 2))]

    def test_single_slot_spans(self, leave_sentence):
        spans = match_spans(t1("VERB"), leave_sentence)
        assert [s.indices for s in spans] == [(2,), (4,)]

    def test_non_matching_spans_empty(self, leave_sentence):
        assert match_spans(t2("NOUN", None, 3, "NOUN", None), leave_sentence) == []

    def test_word_set_membership(self, leave_sentence):
        agg = Template(
            slots=(Slot(pos="VERB", word_set=frozenset({"will", "shall"}), representative="will"),)
        )
        assert matches(agg, leave_sentence)
        spans = match_spans(agg, leave_sentence)
        assert [s.indices for s in spans] == [(2,)]

    def test_case_fold_flag(self, leave_sentence):
        lower = t2("DET", "the", 1, "VERB", "will")
        assert not matches(lower, leave_sentence)
        assert matches(lower, leave_sentence, case_fold=True)

    def test_span_indices_respect_gap(self, leave_sentence):
        for span in match_spans(t2("DET", None, 1, "VERB", None), leave_sentence):
            assert span.indices[1] - span.indices[0] == 2


class TestParents:
    def test_full_two_slot_has_four_parents(self):
        got = parents(THE_WILL)
        assert got == {
            t2("DET", None, 1, "VERB", "will"),
            t2("DET", "The", 1, "VERB", None),
            t1("VERB", "will"),
            t1("DET", "The"),
        }

    def test_pos_only_single_slot_is_root_level(self):
        assert parents(t1("VERB")) == set()

    def test_word_set_parent_is_pos_only(self):
        agg = Template(
            slots=(Slot(pos="PRON", word_set=frozenset({"he", "she"}), representative="he"),)
        )
        assert parents(agg) == {t1("PRON")}

    def test_ancestor_via_two_word_drops(self):
        assert is_ancestor(t2("DET", None, 1, "VERB", None), THE_WILL)

    def test_not_ancestor_of_itself(self):
        assert not is_ancestor(THE_WILL, THE_WILL)

    def test_gap_difference_breaks_ancestry(self):
        assert not is_ancestor(t2("DET", None, 2, "VERB", None), THE_WILL)

    def test_matching_monotonicity(self):
        rng = random.Random(7)
        instances = random_instances(rng, 30, max_tokens=8)
        for inst in instances[:10]:
            pairs = [(t.pos, t.surface) for t in inst.tokens]
            for key in ref_enumerate(pairs, None):
                template = _from_ref(key)
                for parent in parents(template):
                    for other in instances:
                        if matches(template, other):
                            assert matches(parent, other)

    def test_matches_iff_spans_nonempty(self):
        rng = random.Random(8)
        instances = random_instances(rng, 20, max_tokens=7)
        for inst in instances:
            pairs = [(t.pos, t.surface) for t in inst.tokens]
            for key in ref_enumerate(pairs, 3):
                template = _from_ref(key)
                for other in instances[:5]:
                    assert matches(template, other) == bool(match_spans(template, other))

    def test_brute_force_oracle_equivalence(self):
        rng = random.Random(9)
        instances = random_instances(rng, 25, max_tokens=12)
        for inst in instances[:8]:
            pairs = [(t.pos, t.surface) for t in inst.tokens]
            for key in ref_enumerate(pairs, None):
                template = _from_ref(key)
                for other in instances:
                    other_pairs = [(t.pos, t.surface) for t in other.tokens]
                    assert matches(template, other) == ref_match(key, other_pairs)


def _from_ref(key):
    if key[0] == "1":
        return Template(slots=(Slot(pos=key[1], word=key[2]),))
    return Template(slots=(Slot(pos=key[1], word=key[2]), Slot(pos=key[4], word=key[5])), gap=key[3])


class TestCanonicalForm:
    def test_two_slot_form(self):
        assert canonical(THE_WILL) == "[pos=DET word=The] gap=1 [pos=VERB word=will]"

    def test_parse_roundtrip(self):
        for template in [
            THE_WILL,
            t1("VERB"),
            t1("NOUN", "men"),
            t2("ADP", None, 0, "NOUN", None),
            Template(
                slots=(
                    Slot(pos="PRON", word_set=frozenset({"he", "she", "it"}), representative="he"),
                    Slot(pos="ADP", word="up"),
                ),
                gap=1,
            ),
        ]:
            assert parse(canonical(template)) == template

    def test_aggregate_display_abbreviates(self):
        agg = Template(
            slots=(
                Slot(pos="PRON", word_set=frozenset({"he", "she", "it", "they"}), representative="he"),
            )
        )
        assert display(agg) == "[pos=PRON words={he,+3}]"
        assert "words={he,it,she,they} repr=he" in canonical(agg)

    def test_id_is_stable_and_distinct(self):
        assert template_id(THE_WILL) == template_id(parse(canonical(THE_WILL)))
        assert template_id(THE_WILL) != template_id(t1("DET", "The"))


class TestValidation:
    def test_slot_word_xor_word_set(self):
        with pytest.raises(ValueError):
            Slot(pos="X", word="a", word_set=frozenset({"a", "b"}), representative="a")

    def test_word_set_needs_two_members(self):
        with pytest.raises(ValueError):
            Slot(pos="X", word_set=frozenset({"a"}), representative="a")

    def test_representative_must_be_member(self):
        with pytest.raises(ValueError):
            Slot(pos="X", word_set=frozenset({"a", "b"}), representative="zzz")

    def test_gap_only_on_two_slot(self):
        with pytest.raises(ValueError):
            Template(slots=(Slot(pos="X"),), gap=1)
        with pytest.raises(ValueError):
            Template(slots=(Slot(pos="X"), Slot(pos="Y")))

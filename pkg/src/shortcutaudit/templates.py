"""Template (shortcut pattern) algebra: slots, gaps, matching, and the
parent/abstraction lattice.

A template is one or two slots in sentence order. Each slot requires a POS
tag and may constrain the surface form, either to a single word literal or
(for aggregates) to a set of words with a designated representative. Two-slot
templates carry a gap: the exact number of tokens strictly between the slots.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .corpus import AnnotatedInstance, Token


@dataclass(frozen=True)
class Slot:
    pos: str
    word: str | None = None
    word_set: frozenset[str] | None = None
    representative: str | None = None

    def __post_init__(self) -> None:
        if self.word is not None and self.word_set is not None:
            raise ValueError("slot may carry a word or a word_set, not both")
        if self.word_set is not None:
            if len(self.word_set) < 2:
                raise ValueError("word_set needs at least 2 members")
            if self.representative not in self.word_set:
                raise ValueError("word_set representative must be a member")
        elif self.representative is not None:
            raise ValueError("representative only valid with a word_set")

    @property
    def constrained(self) -> bool:
        return self.word is not None or self.word_set is not None

    def accepts(self, token: Token, case_fold: bool = False) -> bool:
        if token.pos != self.pos:
            return False
        if self.word is not None:
            if case_fold:
                return token.surface.casefold() == self.word.casefold()
            return token.surface == self.word
        if self.word_set is not None:
            if case_fold:
                return token.surface.casefold() in {w.casefold() for w in self.word_set}
            return token.surface in self.word_set
        return True

    def dropped(self) -> Slot:
        """The POS-only abstraction of this slot."""
        return Slot(pos=self.pos)


@dataclass(frozen=True)
class Template:
    slots: tuple[Slot, ...]
    gap: int | None = None

    def __post_init__(self) -> None:
        if len(self.slots) not in (1, 2):
            raise ValueError("template has 1 or 2 slots")
        if len(self.slots) == 2:
            if self.gap is None or self.gap < 0:
                raise ValueError("two-slot template needs a non-negative gap")
        elif self.gap is not None:
            raise ValueError("one-slot template carries no gap")

    @property
    def final_slot(self) -> Slot:
        return self.slots[-1]

    def with_slot(self, index: int, slot: Slot) -> Template:
        slots = list(self.slots)
        slots[index] = slot
        return Template(slots=tuple(slots), gap=self.gap)


@dataclass(frozen=True)
class MatchSpan:
    instance_id: str
    indices: tuple[int, ...]


def match_spans(
    template: Template, instance: AnnotatedInstance, case_fold: bool = False
) -> list[MatchSpan]:
    """All (deduplicated) matches, ordered by slot-1 token index."""
    tokens = instance.tokens
    spans: list[MatchSpan] = []
    if len(template.slots) == 1:
        slot = template.slots[0]
        for i, tok in enumerate(tokens):
            if slot.accepts(tok, case_fold):
                spans.append(MatchSpan(instance.id, (i,)))
    else:
        s1, s2 = template.slots
        step = template.gap + 1
        for i in range(len(tokens) - step):
            if s1.accepts(tokens[i], case_fold) and s2.accepts(tokens[i + step], case_fold):
                spans.append(MatchSpan(instance.id, (i, i + step)))
    return spans


def matches(template: Template, instance: AnnotatedInstance, case_fold: bool = False) -> bool:
    """True iff some token position(s) satisfy every slot and the exact gap."""
    tokens = instance.tokens
    if len(template.slots) == 1:
        slot = template.slots[0]
        return any(slot.accepts(tok, case_fold) for tok in tokens)
    s1, s2 = template.slots
    step = template.gap + 1
    for i in range(len(tokens) - step):
        if s1.accepts(tokens[i], case_fold) and s2.accepts(tokens[i + step], case_fold):
            return True
    return False


def parents(template: Template) -> set[Template]:
    """Templates one abstraction step away.

    (a) each word-constrained slot with the constraint dropped (POS kept);
    (b) for two-slot templates, the two one-slot templates obtained by
        dropping either slot entirely.
    """
    out: set[Template] = set()
    for k, slot in enumerate(template.slots):
        if slot.constrained:
            out.add(template.with_slot(k, slot.dropped()))
    if len(template.slots) == 2:
        out.add(Template(slots=(template.slots[0],)))
        out.add(Template(slots=(template.slots[1],)))
    return out


def is_ancestor(a: Template, b: Template) -> bool:
    """True iff a is reachable from b by one or more parent steps (strict)."""
    frontier = parents(b)
    seen: set[Template] = set()
    while frontier:
        if a in frontier:
            return True
        seen |= frontier
        nxt: set[Template] = set()
        for t in frontier:
            nxt |= parents(t)
        frontier = nxt - seen
    return False


def _slot_text(slot: Slot) -> str:
    if slot.word is not None:
        return f"[pos={slot.pos} word={slot.word}]"
    if slot.word_set is not None:
        words = ",".join(sorted(slot.word_set))
        return f"[pos={slot.pos} words={{{words}}} repr={slot.representative}]"
    return f"[pos={slot.pos}]"


def canonical(template: Template) -> str:
    """Canonical textual form, e.g. `[pos=DET word=The] gap=1 [pos=VERB word=will]`."""
    if len(template.slots) == 1:
        return _slot_text(template.slots[0])
    return f"{_slot_text(template.slots[0])} gap={template.gap} {_slot_text(template.slots[1])}"


def display(template: Template) -> str:
    """Abbreviated form: aggregates render the representative plus member count."""

    def slot_text(slot: Slot) -> str:
        if slot.word_set is not None:
            return f"[pos={slot.pos} words={{{slot.representative},+{len(slot.word_set) - 1}}}]"
        return _slot_text(slot)

    if len(template.slots) == 1:
        return slot_text(template.slots[0])
    return f"{slot_text(template.slots[0])} gap={template.gap} {slot_text(template.slots[1])}"


def _parse_slot(text: str) -> Slot:
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"malformed slot: {text!r}")
    body = text[1:-1]
    if not body.startswith("pos="):
        raise ValueError(f"malformed slot: {text!r}")
    if " words={" in body:
        pos_part, rest = body.split(" words={", 1)
        words_part, repr_part = rest.rsplit("} repr=", 1)
        return Slot(
            pos=pos_part[4:],
            word_set=frozenset(words_part.split(",")),
            representative=repr_part,
        )
    if " word=" in body:
        pos_part, word = body.split(" word=", 1)
        return Slot(pos=pos_part[4:], word=word)
    return Slot(pos=body[4:])


def parse(text: str) -> Template:
    """Inverse of canonical(). Word literals containing '] gap=' or ',' in
    word sets are not representable; annotated corpora do not produce them."""
    if "] gap=" in text:
        left, rest = text.split("] gap=", 1)
        gap_str, right = rest.split(" ", 1)
        return Template(slots=(_parse_slot(left + "]"), _parse_slot(right)), gap=int(gap_str))
    return Template(slots=(_parse_slot(text),))


def template_id(template: Template) -> str:
    """Stable node id: hash of the canonical form."""
    return hashlib.sha256(canonical(template).encode("utf-8")).hexdigest()[:16]

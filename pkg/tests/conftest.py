from __future__ import annotations

from pathlib import Path

import pytest

from shortcutaudit.corpus import AnnotatedInstance, Token, dataset_from_instances

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def make_instance(iid, pairs, label="true", split="train", text=None):
    """pairs: list of (surface, pos)."""
    tokens = tuple(Token(surface=s, pos=p) for s, p in pairs)
    return AnnotatedInstance(
        id=iid,
        text=text if text is not None else " ".join(s for s, _ in pairs),
        tokens=tokens,
        label=label,
        split=split,
    )


@pytest.fixture
def leave_sentence():
    """'The men will all leave .' with DET NOUN VERB ADV VERB PUNCT tags."""
    return make_instance(
        "s-leave",
        [
            ("The", "DET"),
            ("men", "NOUN"),
            ("will", "VERB"),
            ("all", "ADV"),
            ("leave", "VERB"),
            (".", "PUNCT"),
        ],
    )


@pytest.fixture
def tiny_dataset():
    """Four instances with a planted DET..VERB pattern: 'The * will' matches
    t1, t2, t3 (labels true, true, false); t4 stays clear of it."""
    instances = [
        make_instance(
            "t1",
            [("The", "DET"), ("men", "NOUN"), ("will", "VERB"), ("leave", "VERB")],
            label="true",
            split="train",
        ),
        make_instance(
            "t2",
            [("The", "DET"), ("dog", "NOUN"), ("will", "VERB"), ("bark", "VERB")],
            label="true",
            split="test",
        ),
        make_instance(
            "t3",
            [("The", "DET"), ("car", "NOUN"), ("will", "VERB"), ("stop", "VERB")],
            label="false",
            split="test",
        ),
        make_instance(
            "t4",
            [("she", "PRON"), ("walked", "VERB"), ("home", "NOUN")],
            label="false",
            split="train",
        ),
    ]
    return dataset_from_instances("tiny", instances)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES

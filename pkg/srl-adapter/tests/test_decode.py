import pytest

from srl_adapter.srl import decode_triplets, split_sentences


def test_coffee_shop_tags_decode_to_example_triplet():
    tokens = ["I", "love", "this", "coffee", "shop"]
    tags = ["B-A0", "B-V", "B-A1", "I-A1", "I-A1"]
    [t] = decode_triplets(tokens, tags)
    assert (t.a0, t.verb_sense, t.a1) == ("I", "love", "this coffee shop")
    assert t.bare_sense


def test_sense_suffixed_verb_tag():
    tokens = ["you", "back", "macron"]
    tags = ["B-A0", "B-V-back.01", "B-A1"]
    [t] = decode_triplets(tokens, tags)
    assert t.verb_sense == "back.01"
    assert not t.bare_sense


def test_multi_token_verb_span():
    tokens = ["they", "gave", "up", "the", "fight"]
    tags = ["B-A0", "B-V", "I-V", "B-A1", "I-A1"]
    [t] = decode_triplets(tokens, tags)
    assert t.verb_sense == "gave up"
    assert t.a1 == "the fight"


def test_missing_role_emits_nothing():
    assert decode_triplets(["it", "rains"], ["O", "B-V"]) == []
    assert decode_triplets(["rains", "hard"], ["B-V", "B-A1"]) == []
    assert decode_triplets(["stop"], ["B-V"]) == []


def test_two_predicates_two_triplets():
    tokens = ["she", "opened", "the", "door", "and", "he", "closed", "the", "window"]
    tags = ["B-A0", "B-V-open.01", "B-A1", "I-A1", "O",
            "B-A0", "B-V-close.01", "B-A1", "I-A1"]
    first, second = decode_triplets(tokens, tags)
    assert (first.a0, first.a1) == ("she", "the door")
    assert (second.a0, second.a1) == ("he", "the window")
    assert second.verb_sense == "close.01"


def test_nearest_spans_bind_to_verb():
    tokens = ["a", "x", "b", "v", "c", "y"]
    tags = ["B-A0", "O", "B-A0", "B-V", "B-A1", "B-A1"]
    [t] = decode_triplets(tokens, tags)
    assert t.a0 == "b"   # nearest A0 before the verb
    assert t.a1 == "c"   # nearest A1 after the verb


def test_tags_tokens_length_mismatch():
    with pytest.raises(ValueError):
        decode_triplets(["a"], ["O", "O"])


def test_sentence_splitting():
    text = "First sentence. Second one!  Third?\nStill third continues"
    parts = split_sentences(text)
    assert parts == ["First sentence.", "Second one!", "Third?",
                     "Still third continues"]

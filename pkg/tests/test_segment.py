import warnings

from hypothesis import given, strategies as st

from wikisumkit.segment import count_tokens, load_abbreviations, split_sentences, tokenize


def test_simple_sentence():
    t = tokenize("Hello world.", "en")
    assert t.tokens == ["Hello", "world", "."]
    assert t.sentence_bounds == [(0, 3)]


def test_empty_input():
    t = tokenize("", "en")
    assert t.tokens == [] and t.sentence_bounds == []


def test_abbreviation_exception():
    t = tokenize("Dr. Smith left. He ran.", "en")
    assert len(t.sentence_bounds) == 2
    assert t.sentences[1] == ["He", "ran", "."]


def test_punctuation_is_own_token():
    assert tokenize("a,b;c!", "en").tokens == ["a", ",", "b", ";", "c", "!"]


def test_digit_starts_sentence():
    t = tokenize("Year one. 1990 followed.", "en")
    assert len(t.sentence_bounds) == 2


def test_lowercase_option():
    assert tokenize("Hello World.", "en", lowercase=True).tokens == ["hello", "world", "."]


def test_unknown_language_warns_and_falls_back():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = tokenize("Hola mundo.", "xx")
    assert t.tokens == ["Hola", "mundo", "."]
    assert any("xx" in str(w.message) for w in caught)


def test_abbreviation_lists_ship_for_all_languages():
    for lang in ("en", "de", "fr", "cs"):
        assert load_abbreviations(lang)
    assert "Dr." in load_abbreviations("en")


def test_split_sentences_no_false_split_before_lowercase():
    assert len(split_sentences("end. not upper", frozenset())) == 1


@given(st.text(alphabet="abcZ .!?", max_size=120))
def test_sentence_slices_cover_token_list(text):
    t = tokenize(text, "en")
    flat = [tok for a, b in t.sentence_bounds for tok in t.tokens[a:b]]
    assert flat == t.tokens
    # bounds are disjoint, ordered, and cover [0, len)
    pos = 0
    for a, b in t.sentence_bounds:
        assert a == pos and b > a
        pos = b
    assert pos == len(t.tokens)


def test_retokenization_fixed_point():
    text = "Dr. Smith left. He ran fast! Did he? Yes."
    t1 = tokenize(text, "en")
    t2 = tokenize(" ".join(t1.tokens), "en")
    assert t2.tokens == t1.tokens


def test_count_tokens_matches_tokenize():
    text = "One two, three."
    assert count_tokens(text, "en") == len(tokenize(text, "en").tokens)

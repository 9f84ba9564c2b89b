from __future__ import annotations

import io
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entsent.gazetteer import AnnotatedInstance
from entsent.lexicon import (
    LEXICAL_CLASSES,
    STRUCTURAL_CLASSES,
    FeatureClass as F,
    FeatureSequence,
    LexiconEntry as E,
    LexiconError,
    MergedLexicon,
    annotate,
    lexicon_stats,
    load_lexicon_entries,
    merge_dictionaries,
    parse_lexicon,
    read_lexicon,
)


def test_feature_class_enumeration():
    assert [c.value for c in F] == [
        "Positive", "Neutral", "Negative", "Up", "Down", "PositiveIfUp", "NegativeIfUp", "Negator",
        "Number", "Target", "Other", "Plain",
    ]
    assert len(LEXICAL_CLASSES) == 8 and len(STRUCTURAL_CLASSES) == 4


# ---------------------------------------------------------------- merge


def test_direction_dependent_beats_prior_polarity():
    lex = merge_dictionaries([E("profit", F.PositiveIfUp, "MALO"), E("profit", F.Positive, "GI")])
    assert lex.get("profit") is F.PositiveIfUp
    lex = merge_dictionaries([E("profit", F.Positive, "GI"), E("profit", F.PositiveIfUp, "MALO")])
    assert lex.get("profit") is F.PositiveIfUp


def test_singleton_passes_through():
    lex = merge_dictionaries([E("loss", F.NegativeIfUp, "MALO")])
    assert lex.classes == {"loss": F.NegativeIfUp}
    assert lex.provenance == {"loss": "MALO"}


def test_custom_beats_lm():
    lex = merge_dictionaries([E("rally", F.Positive, "LM"), E("rally", F.Up, "CUSTOM")])
    assert lex.get("rally") is F.Up
    assert lex.provenance["rally"] == "CUSTOM"


def test_source_precedence_outranks_class_precedence():
    lex = merge_dictionaries([E("surge", F.PositiveIfUp, "GI"), E("surge", F.Positive, "LM")])
    assert lex.get("surge") is F.Positive


def test_class_ladder_within_one_source_rank():
    ladder = [F.Positive, F.Negator, F.Down, F.NegativeIfUp]
    for i in range(len(ladder)):
        entries = [E("w", c, "MPQA") for c in ladder[: i + 1]]
        assert merge_dictionaries(entries).get("w") is ladder[i]
        assert merge_dictionaries(entries[::-1]).get("w") is ladder[i]


def test_unresolved_tie_keeps_first_and_warns(caplog):
    with caplog.at_level(logging.WARNING):
        lex = merge_dictionaries([E("flat", F.Neutral, "MPQA"), E("flat", F.Negative, "GI")])
    assert lex.get("flat") is F.Neutral
    assert lex.provenance["flat"] == "MPQA"
    assert "flat" in caplog.text


def test_identical_duplicates_do_not_warn(caplog):
    with caplog.at_level(logging.WARNING):
        merge_dictionaries([E("up", F.Up, "GI"), E("up", F.Up, "MPQA")])
    assert caplog.text == ""


@pytest.mark.parametrize("feature", STRUCTURAL_CLASSES)
def test_structural_class_rejected(feature):
    with pytest.raises(LexiconError):
        E("x", feature, "LM")


def test_entry_normalisation_and_validation():
    e = E("  Rally ", F.Up, "custom")
    assert (e.word, e.source) == ("rally", "CUSTOM")
    with pytest.raises(LexiconError):
        E("x", F.Up, "WORDNET")
    with pytest.raises(LexiconError):
        E("  ", F.Up, "LM")


_SOURCES = ["CUSTOM", "LM", "MPQA"]


@settings(max_examples=200, deadline=None)
@given(
    picks=st.lists(st.tuples(st.sampled_from(["a", "b", "c"]), st.sampled_from(list(LEXICAL_CLASSES)),
                             st.sampled_from(_SOURCES)), min_size=1, max_size=12),
    perm=st.randoms(use_true_random=False),
)
def test_merge_order_insensitive_for_distinct_keys(picks, perm):
    # keep one entry per (word, source rank, class rank) so no input-order tie-break is involved
    from entsent.lexicon import _CLASS_RANK, _SOURCE_RANK

    seen, entries = set(), []
    for word, feat, src in picks:
        key = (word, _SOURCE_RANK[src], _CLASS_RANK[feat])
        if key not in seen:
            seen.add(key)
            entries.append(E(word, feat, src))
    shuffled = list(entries)
    perm.shuffle(shuffled)
    a, b = merge_dictionaries(entries), merge_dictionaries(shuffled)
    assert a.classes == b.classes and a.provenance == b.provenance
    assert set(a.classes) == set(a.provenance) == {e.word for e in entries}
    for word, cls in a.classes.items():
        assert any(e.word == word and e.feature is cls and e.source == a.provenance[word] for e in entries)


# ---------------------------------------------------------------- files


def test_tsv_loader(tmp_path):
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    a.write_text("word\tfeature\tsource\nrally\tPositive\tLM\nnot\tNegator\tGI\n\n")
    b.write_text("word\tfeature\tsource\nrally\tUp\tCUSTOM\n")
    lex = read_lexicon([a, b])
    assert lex.classes == {"rally": F.Up, "not": F.Negator}
    assert read_lexicon(a).classes == {"rally": F.Positive, "not": F.Negator}


def test_tsv_requires_header():
    with pytest.raises(LexiconError, match="header"):
        load_lexicon_entries(io.StringIO("rally\tUp\tCUSTOM\n"))


def test_tsv_rejects_unknown_feature_with_line():
    with pytest.raises(LexiconError, match=r"lex\.tsv:3: unknown feature 'Bullish'"):
        load_lexicon_entries(io.StringIO("word\tfeature\tsource\nup\tUp\tLM\nmoon\tBullish\tLM\n"), name="lex.tsv")


def test_tsv_rejects_structural_feature_with_line():
    with pytest.raises(LexiconError, match=r":2:"):
        parse_lexicon("word\tfeature\tsource\nten\tNumber\tLM\n")


def test_tsv_rejects_short_rows():
    with pytest.raises(LexiconError, match=r":2:"):
        parse_lexicon("word\tfeature\tsource\nten\tUp\n")


def test_empty_file_is_empty_lexicon():
    assert len(parse_lexicon("")) == 0


# ---------------------------------------------------------------- annotate


def lex_of(**classes) -> MergedLexicon:
    return MergedLexicon({w: F(c) for w, c in classes.items()}, {w: "CUSTOM" for w in classes})


def test_annotate_rallies():
    seq = annotate(lex_of(stock="Neutral", rallies="Up"), ["TARGET", "stock", "rallies"])
    assert seq.literals == (F.Target, F.Neutral, F.Up)
    assert seq.surface == ("TARGET", "stock", "rallies")


def test_annotate_rally_ends():
    seq = annotate(lex_of(rally="Up", ends="Down"), ["OTHER", "rally", "ends"])
    assert seq.literals == (F.Other, F.Up, F.Down)


def test_annotate_six_token_fixture():
    seq = annotate(lex_of(up="Up"), ["TARGET", "q3", "net", "up", "26", "pc"])
    assert seq.literals == (F.Target, F.Plain, F.Plain, F.Up, F.Number, F.Plain)


@pytest.mark.parametrize("token,cls", [
    ("26", F.Number), ("0.8", F.Number), ("1200.5", F.Number), ("1,200", F.Number), ("12,34", F.Plain),
    ("q3", F.Plain), ("3.", F.Plain), ("pc", F.Plain), ("target", F.Plain), ("TARGET", F.Target),
])
def test_token_mapping(token, cls):
    assert annotate(lex_of(), [token]).literals == (cls,)


def test_no_lemmatisation():
    lex = lex_of(rally="Up")
    assert annotate(lex, ["rally", "rallies", "rallied"]).literals == (F.Up, F.Plain, F.Plain)


def test_annotate_instance_carries_label():
    inst = AnnotatedInstance("h", "X", ("TARGET", "falls"), "negative")
    seq = annotate(lex_of(falls="Down"), inst)
    assert seq == FeatureSequence((F.Target, F.Down), ("TARGET", "falls"), "negative")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["TARGET", "OTHER", "rally", "up", "26", "x", "not", "1.5"]), max_size=20))
def test_annotate_preserves_length_and_order(tokens):
    seq = annotate(lex_of(rally="Up", up="Up", **{"not": "Negator"}), tokens)
    assert len(seq) == len(tokens)
    assert seq.surface == tuple(tokens)


# ---------------------------------------------------------------- stats


def test_stats_empty():
    stats = lexicon_stats(MergedLexicon())
    assert stats["total"] == 0 and all(v == 0 for v in stats.values())
    assert len(stats) == 9


def test_stats_toy():
    lex = merge_dictionaries([E("good", F.Positive, "LM"), E("rise", F.Up, "CUSTOM"), E("not", F.Negator, "GI")])
    stats = lexicon_stats(lex)
    assert {k: v for k, v in stats.items() if v and k != "total"} == {"Positive": 1, "Up": 1, "Negator": 1}
    assert stats["total"] == 3


def test_fingerprint_tracks_content():
    a = lex_of(up="Up")
    assert a.fingerprint() == lex_of(up="Up").fingerprint()
    assert a.fingerprint() != lex_of(up="Down").fingerprint()

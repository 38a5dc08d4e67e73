from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_markup_line
from subqa.markup import (
    MarkupKind,
    MarkupSpan,
    SpanOutOfBounds,
    UnbalancedTag,
    apply_replacements,
    plain_text,
    reinsert_markup,
    strip_markup,
)


def test_plain_line_has_no_spans():
    assert strip_markup("Hallo Welt") == ("Hallo Welt", [])


def test_full_italic_wrap():
    plain, spans = strip_markup("<i>das im alltäglichen Palastleben lauerte.</i>")
    assert plain == "das im alltäglichen Palastleben lauerte."
    assert len(spans) == 1
    span = spans[0]
    assert (span.kind, span.start, span.end) == (MarkupKind.ITALIC, 0, len(plain))
    assert (span.open_tag, span.close_tag) == ("<i>", "</i>")


def test_partial_span_offsets():
    plain, spans = strip_markup("Es könnte auch kurz für <i>specularius</i> sein,")
    assert plain == "Es könnte auch kurz für specularius sein,"
    assert plain[spans[0].start : spans[0].end] == "specularius"


def test_unknown_tags_kept_verbatim():
    line = '<v Anna>Hi</v> <c.yellow.bg>there</c>'
    plain, spans = strip_markup(line)
    assert plain == "Hi there"
    assert [s.kind for s in spans] == [MarkupKind.OTHER, MarkupKind.OTHER]
    assert spans[0].open_tag == "<v Anna>"
    assert reinsert_markup(plain, spans) == line


def test_nesting_depth():
    _, spans = strip_markup("<b><i>x</i></b>")
    assert [(s.tag_name, s.depth) for s in spans] == [("b", 0), ("i", 1)]


def test_timestamp_tag_is_point():
    plain, spans = strip_markup("a <00:00:01.500>b")
    assert plain == "a b"
    assert (spans[0].start, spans[0].end, spans[0].is_pair) == (2, 2, False)


def test_literal_less_than_kept():
    assert strip_markup("x < y") == ("x < y", [])


@pytest.mark.parametrize("bad", ["<i>open", "close</i>", "<i><b>x</i></b>"])
def test_strict_rejects_unbalanced(bad):
    with pytest.raises(UnbalancedTag):
        strip_markup(bad)


@pytest.mark.parametrize("bad", ["<i>open", "close</i>", "<i><b>x</i></b>", "a</b>b<i>c"])
def test_lenient_mode_still_round_trips(bad):
    plain, spans = strip_markup(bad, strict=False)
    assert "<" not in plain
    assert reinsert_markup(plain, spans) == bad
    assert plain_text(bad) == plain


def test_reinsert_rejects_out_of_bounds():
    span = MarkupSpan(MarkupKind.ITALIC, "i", 0, 10, "<i>", "</i>")
    with pytest.raises(SpanOutOfBounds):
        reinsert_markup("short", [span])


def test_reinsert_rejects_crossing():
    a = MarkupSpan(MarkupKind.ITALIC, "i", 0, 3, "<i>", "</i>", 0)
    b = MarkupSpan(MarkupKind.BOLD, "b", 2, 5, "<b>", "</b>", 1)
    with pytest.raises(SpanOutOfBounds):
        reinsert_markup("abcdef", [a, b])


def test_apply_replacements_keeps_tags():
    line = "<i>- Danke.</i> - Oh, Junge."
    # remove the spaces after both hyphens (plain offsets 1 and 10)
    assert apply_replacements(line, [(1, 2, ""), (10, 11, "")]) == "<i>-Danke.</i> -Oh, Junge."


def test_apply_replacements_inside_span():
    assert apply_replacements("<i>Los, los!</i>", [(0, 9, "Los!")]) == "<i>Los!</i>"


def test_apply_replacements_rejects_overlap():
    with pytest.raises(SpanOutOfBounds):
        apply_replacements("abcdef", [(0, 3, "x"), (2, 4, "y")])


@settings(max_examples=500, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_spans_index_plain_text(seed):
    line = random_markup_line(random.Random(seed))
    plain, spans = strip_markup(line)
    for span in spans:
        assert 0 <= span.start <= span.end <= len(plain)
    assert reinsert_markup(plain, spans) == line


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="ab <>/i", max_size=30))
def test_lenient_round_trip_on_arbitrary_text(text):
    plain, spans = strip_markup(text, strict=False)
    assert reinsert_markup(plain, spans) == text

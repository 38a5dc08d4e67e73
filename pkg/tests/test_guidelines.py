from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import annotated_rows as pt
from generators import random_payload_line
from subqa.findings import ErrorCategory, Severity
from subqa.guidelines import (
    check_compound_length,
    check_line_count,
    check_line_length,
    check_markup_integrity,
    check_reading_speed,
    check_spacing,
    detect_repetitions,
    spacing_findings,
)
from subqa.alignment import align_by_time
from subqa.langid import detect_mixed_language, language_evidence
from subqa.markup import plain_text
from subqa.resources import GuidelineProfile, Spacing
from subqa.subtitles import Cue, Timestamp

C = ErrorCategory


def apply(plain: str, findings) -> str:
    out = plain
    for f in sorted(findings, key=lambda f: f.span, reverse=True):
        out = out[: f.span[0]] + f.suggestion + out[f.span[1] :]
    return out


class TestLineLength:
    def test_59_chars_flagged(self, de_profile):
        findings = check_line_length(pt.cue(pt.LENGTH[0].mt), de_profile)
        assert len(findings) == 1
        assert findings[0].category is C.LINE_TOO_LONG
        assert findings[0].span == (42, 59)
        assert findings[0].message == "line has 59 characters, limit is 42"

    def test_boundary(self, de_profile):
        assert check_line_length(pt.cue("x" * 42), de_profile) == []
        assert len(check_line_length(pt.cue("x" * 43), de_profile)) == 1

    def test_human_line(self, de_profile):
        assert check_line_length(pt.cue("Komm jederzeit zum Fahren vorbei."), de_profile) == []

    def test_markup_not_counted(self, de_profile):
        assert check_line_length(pt.cue("<i>" + "x" * 42 + "</i>"), de_profile) == []

    def test_per_line_spans(self, de_profile):
        findings = check_line_length(pt.cue("kurz\n" + "y" * 45), de_profile, 4)
        assert [(f.cue_index, f.span) for f in findings] == [(4, (5 + 42, 5 + 45))]

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.text(alphabet="abc äß<>", min_size=1, max_size=60), min_size=1, max_size=4),
           st.integers(1, 60))
    def test_flags_iff_longer_than_limit(self, lines, limit):
        lines = [line.replace("\n", "") or "a" for line in lines]
        cue = Cue(Timestamp(0), Timestamp(1000), tuple(lines))
        profile = GuidelineProfile("xx", max_chars_per_line=limit)
        expected = sum(len(line) > limit for line in cue.plain.split("\n"))
        assert len(check_line_length(cue, profile)) == expected


class TestLineCount:
    @pytest.mark.parametrize("lines, expected", [(4, 1), (3, 0), (1, 0)])
    def test_limits(self, de_profile, lines, expected):
        cue = pt.cue("\n".join(["Zeile"] * lines))
        assert len(check_line_count(cue, de_profile)) == expected


class TestReadingSpeed:
    def test_forty_chars_in_two_seconds(self, de_profile):
        findings = check_reading_speed(pt.cue("x" * 40, 0, 2000), de_profile)
        assert len(findings) == 1
        assert "20.0 CPS" in findings[0].message
        assert findings[0].severity is Severity.WARNING

    def test_at_limit(self, de_profile):
        assert check_reading_speed(pt.cue("x" * 34, 0, 2000), de_profile) == []

    def test_empty_after_markup(self, de_profile):
        assert check_reading_speed(pt.cue("<i></i>", 0, 100), de_profile) == []

    def test_line_breaks_not_counted(self, de_profile):
        assert check_reading_speed(pt.cue("x" * 17 + "\n" + "x" * 17, 0, 2000), de_profile) == []

    def test_zero_duration_is_a_finding_not_a_crash(self, de_profile):
        findings = check_reading_speed(pt.cue("Hallo", 1000, 1000), de_profile)
        assert [f.category for f in findings] == [C.READING_SPEED_EXCEEDED]


class TestSpacing:
    def test_spaced_speaker_hyphens(self, de_profile):
        plain = "- Danke. - Oh, Junge."
        findings = check_spacing(pt.cue(plain), de_profile)
        assert len(findings) == 2
        assert apply(plain, findings) == "-Danke. -Oh, Junge."

    def test_spaced_ellipsis(self, de_profile):
        plain = "... und eine silberne Sebright-Henne."
        findings = check_spacing(pt.cue(plain), de_profile)
        assert len(findings) == 1
        assert apply(plain, findings) == "...und eine silberne Sebright-Henne."

    @pytest.mark.parametrize("plain", ["-Danke. -Oh, Junge.", "...und eine silberne Sebright-Henne.",
                                       "Er kam... Dann ging er.", "Sebright-Henne", "Seite 3 - 5"])
    def test_clean(self, de_profile, plain):
        assert check_spacing(pt.cue(plain), de_profile) == []

    def test_unicode_ellipsis(self, de_profile):
        findings = check_spacing(pt.cue("… und dann"), de_profile)
        assert apply("… und dann", findings) == "…und dann"

    def test_double_space(self, de_profile):
        findings = check_spacing(pt.cue("zwei  Leerzeichen"), de_profile)
        assert apply("zwei  Leerzeichen", findings) == "zwei Leerzeichen"

    def test_spaced_profile_accepts_spaced_hyphen(self):
        profile = GuidelineProfile("fr", hyphen_spacing=Spacing.SPACED, ellipsis_spacing=Spacing.SPACED)
        assert check_spacing(pt.cue("- Merci. - Oh."), profile) == []

    def test_markup_offsets(self, de_profile):
        findings = check_spacing(pt.cue("<i>- Danke.</i>"), de_profile)
        # plain-text offsets: the hyphen and its space, replaced by the hyphen
        assert [(f.span, f.suggestion) for f in findings] == [((0, 2), "-")]


class TestRepetition:
    @pytest.mark.parametrize("text, suggestion", [("Los, los, los!", "Los!"), ("Ja, ja.", "Ja.")])
    def test_runs(self, text, suggestion):
        findings = detect_repetitions(pt.cue(text))
        assert len(findings) == 1
        assert findings[0].suggestion == suggestion

    def test_sehr_sehr(self):
        plain = "also ist es sehr, sehr frustrierend."
        findings = detect_repetitions(pt.cue(plain))
        assert apply(plain, findings) == "also ist es sehr frustrierend."

    def test_non_adjacent(self):
        assert detect_repetitions(pt.cue("das Boot im Boot")) == []

    def test_group_repetition(self):
        plain = "komm schon, komm schon, komm schon!"
        findings = detect_repetitions(pt.cue(plain))
        assert len(findings) == 1
        assert apply(plain, findings) == "komm schon!"

    def test_across_sentences_not_detected(self):
        assert detect_repetitions(pt.cue(pt.REPETITION[2].mt)) == []


class TestMarkupIntegrity:
    def _check(self, source, target):
        src, tgt = pt.document([source]), pt.document([target])
        return check_markup_integrity(align_by_time(src, tgt)[0], src, tgt)

    def test_missing_italic(self):
        findings = self._check(pt.MARKUP[0].source, pt.MARKUP[0].mt)
        assert [f.message for f in findings] == ["missing italic"]

    def test_line_break_count(self):
        findings = self._check(pt.MARKUP[2].source, pt.MARKUP[2].mt)
        assert [f.message for f in findings] == ["line-break count differs: 2→1 lines"]

    def test_identical_markup(self):
        assert self._check("<i>a</i>\n<b>b</b>", "<i>x</i>\n<b>y</b>") == []

    def test_speaker_hyphens(self):
        findings = self._check("-Hi. -Hello.", "Hallo.")
        assert [f.message for f in findings] == ["speaker hyphen count differs: 2→0"]

    def test_needs_one_to_one(self):
        src = pt.timed_document(pt.BLOCK_SOURCE)
        tgt = pt.timed_document(pt.BLOCK_HUMAN)
        merged = [p for p in align_by_time(src, tgt) if not p.one_to_one][0]
        with pytest.raises(ValueError):
            check_markup_integrity(merged, src, tgt)


class TestCompound:
    def test_oov_compound(self, de_lexicons):
        findings = check_compound_length(pt.cue(pt.LENGTH[3].mt), de_lexicons)
        assert [(f.category, f.severity) for f in findings] == [(C.COMPOUND_WORD_OOV, Severity.WARNING)]
        assert "Übereinstimmungsordner" in findings[0].message
        assert "22 characters" in findings[0].message

    def test_known_compound_suppressed(self, de_lexicons):
        cue = pt.cue(pt.MARKUP[2].mt)
        assert len(check_compound_length(cue, de_lexicons)) == 1
        extended = dataclasses.replace(
            de_lexicons, target_wordlist=de_lexicons.target_wordlist | {"unterwasservorsprünge"}
        )
        assert check_compound_length(cue, extended) == []

    def test_short_tokens(self, de_lexicons):
        assert check_compound_length(pt.cue("Kurze Wörter nur hier."), de_lexicons) == []


class TestMixedLanguage:
    def test_spanish_cue_in_english_document(self):
        # es: dónde, está, la = 3; en: 0; pt/fr/it: 1 each
        text = "¿Dónde está la estación?"
        assert language_evidence(text) == {"es": 3, "pt": 1, "fr": 1, "it": 1}
        doc = pt.document(["Where is the station?", text, "I do not know."])
        findings = detect_mixed_language(doc, "en")
        assert [(f.cue_index, f.category, f.severity) for f in findings] == [(1, C.MIXED_LANGUAGE, Severity.INFO)]
        assert findings[0].message == "cue looks like es (3 hits) rather than en (0 hits)"

    def test_monolingual(self):
        doc = pt.document(["Where is the station?", "I do not know.", "It is over there, by the river."])
        assert detect_mixed_language(doc, "en") == []

    def test_digits_only(self):
        assert detect_mixed_language(pt.document(["123 456", "...!?"]), "en") == []

    def test_script_evidence(self):
        findings = detect_mixed_language(pt.document(["Он сказал привет"]), "de")
        assert "ru" in findings[0].message


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_spans_valid_and_deterministic(seed):
    from subqa.resources import builtin_profile

    profile = builtin_profile("de")
    rng = random.Random(seed)
    cue = Cue(Timestamp(0), Timestamp(rng.randint(1, 5000)),
              tuple(random_payload_line(rng) for _ in range(rng.randint(1, 4))))
    plain = cue.plain
    run = lambda: (check_line_length(cue, profile) + check_spacing(cue, profile)  # noqa: E731
                   + detect_repetitions(cue) + check_reading_speed(cue, profile))
    findings = run()
    assert findings == run()
    for f in findings:
        if f.span is not None:
            assert 0 <= f.span[0] <= f.span[1] <= len(plain)


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="-. .…abJa,!", max_size=30))
def test_spacing_suggestions_converge(text):
    from subqa.resources import builtin_profile

    profile = builtin_profile("de")
    plain = plain_text(text)
    findings = spacing_findings(plain, profile)
    fixed = apply(plain, findings)
    for f in spacing_findings(fixed, profile):
        # no finding may remain on a span that was just fixed
        assert all(f.span[0] >= g.span[0] + len(g.suggestion) or f.span[1] <= g.span[0] for g in findings)

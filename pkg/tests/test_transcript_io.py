import pytest
from hypothesis import given, settings

from discusskit.model import Provenance, validate_discussion
from discusskit.transcript_io import (
    BASE_HEADER,
    ParseError,
    parse_transcript,
    serialize_transcript,
)
from strategies import discussions

HEADER_LINE = ",".join(BASE_HEADER)


def rows(*lines):
    return HEADER_LINE + "\r\n" + "\r\n".join(lines) + "\r\n"


MINIMAL = rows(
    "0,T,teacher,0,Welcome everyone.,,,,",
    "1,S1,student,0,I think the hero changes.,,claim,medium,new",
    "1,S1,student,1,He apologizes in the last chapter.,,evidence,high,",
)


class TestParse:
    def test_minimal_gold_file(self):
        d = parse_transcript(MINIMAL)
        assert len(d.turns) == 2
        assert d.provenance is Provenance.GOLD_CODED
        assert d.turns[1].adus[1].gold_argument.value == "evidence"
        assert validate_discussion(d) == []

    def test_unknown_specificity_label(self):
        bad = rows(
            "0,T,teacher,0,Welcome.,,,,",
            "1,S1,student,0,Hello.,,claim,very high,new",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert err.value.line == 3
        assert "low, medium, high" in err.value.reason

    def test_reference_not_before_turn(self):
        bad = rows(
            "0,T,teacher,0,Welcome.,,,,",
            "1,S1,student,0,Hello.,1,claim,low,extension",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "must be less than" in err.value.reason

    def test_duplicate_row(self):
        bad = rows(
            "0,S1,student,0,Hello.,,,,",
            "0,S1,student,0,Hello again.,,,,",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "duplicate" in err.value.reason

    def test_non_contiguous_adu_index(self):
        bad = rows(
            "0,S1,student,0,Hello.,,,,",
            "0,S1,student,2,More.,,,,",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "contiguous" in err.value.reason

    def test_turn_gap(self):
        bad = rows(
            "0,S1,student,0,Hello.,,,,",
            "2,S2,student,0,Reply.,,,,",
        )
        with pytest.raises(ParseError):
            parse_transcript(bad)

    def test_empty_text(self):
        bad = rows("0,S1,student,0,   ,,,,")
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "empty text" in err.value.reason

    def test_collaboration_on_second_adu(self):
        bad = rows(
            "0,S1,student,0,Hello.,,,,",
            "0,S1,student,1,More.,,,,agree",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "adu_index 0" in err.value.reason

    def test_teacher_with_labels(self):
        bad = rows("0,T,teacher,0,Welcome.,,claim,,")
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "teacher" in err.value.reason

    def test_teacher_with_two_adus(self):
        bad = rows(
            "0,T,teacher,0,Welcome.,,,,",
            "0,T,teacher,1,Again.,,,,",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "exactly one ADU" in err.value.reason

    def test_reference_to_teacher_turn(self):
        bad = rows(
            "0,T,teacher,0,Welcome.,,,,",
            "1,S1,student,0,Hello.,0,claim,low,extension",
        )
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "student turn" in err.value.reason

    def test_bad_header(self):
        with pytest.raises(ParseError) as err:
            parse_transcript("a,b,c\r\n1,2,3\r\n")
        assert err.value.line == 1

    def test_header_only(self):
        with pytest.raises(ParseError):
            parse_transcript(HEADER_LINE + "\r\n")

    def test_non_integer_turn_index(self):
        bad = rows("x,S1,student,0,Hello.,,,,")
        with pytest.raises(ParseError) as err:
            parse_transcript(bad)
        assert "turn_index" in err.value.reason

    def test_quoted_text_with_commas_and_newline(self):
        content = rows(
            '0,S1,student,0,"Hello, ""world""',
            'second line.",,claim,low,new',
        )
        d = parse_transcript(content)
        assert d.turns[0].adus[0].text == 'Hello, "world"\r\nsecond line.'

    def test_metadata_defaults(self):
        d = parse_transcript(MINIMAL)
        assert d.title == "Untitled discussion"
        assert len(d.discussion_id) == 12
        assert d.recorded_at is None


class TestSerialize:
    def test_uncoded_has_empty_gold_columns(self):
        uncoded = rows(
            "0,T,teacher,0,Welcome.,,,,",
            "1,S1,student,0,Hello.,,,,",
        )
        d = parse_transcript(uncoded)
        out = serialize_transcript(d)
        assert out.splitlines()[2] == "1,S1,student,0,Hello.,,,,"

    def test_teacher_only_discussion(self):
        d = parse_transcript(rows("0,T,teacher,0,Welcome.,,,,"))
        out = serialize_transcript(d)
        assert out.count("\r\n") == 2  # header + one row

    def test_deterministic_bytes(self):
        d = parse_transcript(MINIMAL)
        assert serialize_transcript(d) == serialize_transcript(d)

    def test_prediction_columns_round_to_6dp(self, sample_discussion, demo_heads, backend):
        from discusskit.predict import classify_discussion
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        out = serialize_transcript(coded, include_predictions=True)
        data_line = out.splitlines()[2]  # first student row
        probs = data_line.split(",")[12:]
        assert len(probs) == 10
        assert all("." in p and len(p.split(".")[1]) == 6 for p in probs if p)


def equivalent(d1, d2, tol=5e-6):
    """Field equality modulo probability rounding."""
    if (d1.discussion_id, d1.title, d1.recorded_at, d1.provenance) != \
       (d2.discussion_id, d2.title, d2.recorded_at, d2.provenance):
        return False
    if len(d1.turns) != len(d2.turns):
        return False
    for t1, t2 in zip(d1.turns, d2.turns):
        if (t1.turn_index, t1.speaker_id, t1.role, t1.reference_turn_index,
                t1.gold_collaboration) != \
           (t2.turn_index, t2.speaker_id, t2.role, t2.reference_turn_index,
                t2.gold_collaboration):
            return False
        if not dist_close(t1.predicted_collaboration, t2.predicted_collaboration, tol):
            return False
        if len(t1.adus) != len(t2.adus):
            return False
        for a1, a2 in zip(t1.adus, t2.adus):
            if (a1.adu_id, a1.text, a1.gold_argument, a1.gold_specificity) != \
               (a2.adu_id, a2.text, a2.gold_argument, a2.gold_specificity):
                return False
            if not dist_close(a1.predicted_argument, a2.predicted_argument, tol):
                return False
            if not dist_close(a1.predicted_specificity, a2.predicted_specificity, tol):
                return False
    return True


def dist_close(p1, p2, tol):
    if (p1 is None) != (p2 is None):
        return False
    if p1 is None:
        return True
    return set(p1) == set(p2) and all(abs(p1[k] - p2[k]) <= tol for k in p1)


class TestRoundTrip:
    @given(discussions(labelling="gold"))
    @settings(max_examples=60)
    def test_gold_round_trip_is_exact(self, d):
        out = serialize_transcript(d)
        back = parse_transcript(out, discussion_id=d.discussion_id, title=d.title,
                                recorded_at=d.recorded_at)
        assert back == d

    @given(discussions())
    @settings(max_examples=80)
    def test_round_trip_modulo_probability_rounding(self, d):
        out = serialize_transcript(d, include_predictions=True)
        back = parse_transcript(out, discussion_id=d.discussion_id, title=d.title,
                                recorded_at=d.recorded_at)
        assert equivalent(d, back)
        assert validate_discussion(back) == []

    @given(discussions(labelling="both"))
    @settings(max_examples=40)
    def test_flag_off_drops_predictions(self, d):
        out = serialize_transcript(d, include_predictions=False)
        back = parse_transcript(out, discussion_id=d.discussion_id, title=d.title,
                                recorded_at=d.recorded_at)
        assert all(a.predicted_argument is None
                   for t in back.turns for a in t.adus)

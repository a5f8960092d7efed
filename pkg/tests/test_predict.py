import numpy as np
import pytest

from discusskit.embedding import DeterministicBackend, DimensionMismatch
from discusskit.features import WindowConfig
from discusskit.head import Task
from discusskit.model import (
    Adu,
    Discussion,
    Provenance,
    SpeakerRole,
    Turn,
    validate_discussion,
)
from discusskit.predict import NEW_FALLBACK, classify_discussion
from discusskit.transcript_io import serialize_transcript


class TestClassifyDiscussion:
    def test_all_student_units_predicted(self, sample_discussion, demo_heads, backend):
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        for turn in coded.turns:
            if turn.role is SpeakerRole.STUDENT:
                assert turn.predicted_collaboration is not None
                for adu in turn.adus:
                    assert adu.predicted_argument is not None
                    assert adu.predicted_specificity is not None
            else:
                assert turn.predicted_collaboration is None
                for adu in turn.adus:
                    assert adu.predicted_argument is None

    def test_distributions_sum_to_one(self, sample_discussion, demo_heads, backend):
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        for turn in coded.turns:
            if turn.role is not SpeakerRole.STUDENT:
                continue
            assert abs(sum(turn.predicted_collaboration.values()) - 1.0) < 1e-6
            for adu in turn.adus:
                assert abs(sum(adu.predicted_argument.values()) - 1.0) < 1e-6
                assert abs(sum(adu.predicted_specificity.values()) - 1.0) < 1e-6

    def test_no_reference_gets_new_fallback(self, sample_discussion, demo_heads, backend):
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        for turn in coded.turns:
            if turn.role is SpeakerRole.STUDENT and turn.reference_turn_index is None:
                assert turn.predicted_collaboration == NEW_FALLBACK

    def test_input_not_mutated(self, sample_discussion, demo_heads, backend):
        before = serialize_transcript(sample_discussion, include_predictions=True)
        classify_discussion(sample_discussion, demo_heads, backend)
        assert serialize_transcript(sample_discussion, include_predictions=True) == before

    def test_gold_labels_preserved_and_provenance_mixed(
            self, sample_discussion, demo_heads, backend):
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        assert coded.provenance is Provenance.MIXED
        for original, new in zip(sample_discussion.turns, coded.turns):
            assert new.gold_collaboration == original.gold_collaboration
            for a_old, a_new in zip(original.adus, new.adus):
                assert a_new.gold_argument == a_old.gold_argument

    def test_uncoded_becomes_auto_coded(self, demo_heads, backend):
        turns = (
            Turn(0, "T", SpeakerRole.TEACHER, (Adu("t0a0", "Question?"),)),
            Turn(1, "S1", SpeakerRole.STUDENT, (Adu("t1a0", "An answer here."),)),
        )
        d = Discussion("x", "t", turns, Provenance.UNCODED)
        coded = classify_discussion(d, demo_heads, backend)
        assert coded.provenance is Provenance.AUTO_CODED

    def test_no_student_turns_unchanged_except_provenance(self, demo_heads, backend):
        d = Discussion("x", "t",
                       (Turn(0, "T", SpeakerRole.TEACHER, (Adu("t0a0", "Hi."),)),),
                       Provenance.UNCODED)
        coded = classify_discussion(d, demo_heads, backend)
        assert coded.turns == d.turns
        assert coded.provenance is Provenance.UNCODED

    def test_byte_identical_across_runs(self, sample_discussion, demo_heads, backend):
        a = serialize_transcript(
            classify_discussion(sample_discussion, demo_heads, backend),
            include_predictions=True)
        b = serialize_transcript(
            classify_discussion(sample_discussion, demo_heads, backend),
            include_predictions=True)
        assert a == b

    def test_result_validates(self, sample_discussion, demo_heads, backend):
        coded = classify_discussion(sample_discussion, demo_heads, backend)
        assert validate_discussion(coded) == []

    def test_wrong_backend_dimension_rejected(self, sample_discussion, demo_heads):
        other = DeterministicBackend(8)
        with pytest.raises(DimensionMismatch):
            classify_discussion(sample_discussion, demo_heads, other)

    def test_window_incompatible_with_argument_head(self, sample_discussion,
                                                    demo_heads, backend):
        with pytest.raises(DimensionMismatch):
            classify_discussion(sample_discussion, demo_heads, backend,
                                WindowConfig(1, 1))

    def test_missing_head_rejected(self, sample_discussion, demo_heads, backend):
        partial = {Task.ARGUMENT: demo_heads[Task.ARGUMENT]}
        with pytest.raises(ValueError):
            classify_discussion(sample_discussion, partial, backend)

    def test_invalid_discussion_rejected(self, demo_heads, backend):
        bad = Discussion(
            "x", "t",
            (Turn(0, "S1", SpeakerRole.STUDENT, (Adu("a", "ok"), ),
                  reference_turn_index=5),),
            Provenance.UNCODED)
        with pytest.raises(ValueError):
            classify_discussion(bad, demo_heads, backend)

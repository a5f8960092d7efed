"""Classroom discussion analytics toolkit."""

__version__ = "0.1.0"

from .model import (
    Adu,
    ArgumentMove,
    CollaborationType,
    Discussion,
    Provenance,
    SpeakerRole,
    SpecificityLevel,
    Turn,
    student_adu_sequence,
    validate_discussion,
)
from .transcript_io import ParseError, parse_transcript, serialize_transcript

__all__ = [
    "Adu", "ArgumentMove", "CollaborationType", "Discussion", "Provenance",
    "SpeakerRole", "SpecificityLevel", "Turn", "student_adu_sequence",
    "validate_discussion", "ParseError", "parse_transcript", "serialize_transcript",
]

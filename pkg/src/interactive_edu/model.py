"""Domain model: questions, answers, the question bank, and teachers.

Everything here is a plain value. Mutation happens only through functions
that return new values, so instances can be shared freely across threads.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass
from enum import Enum


class SegmentColor(str, Enum):
    RED = "red"
    BLUE = "blue"
    GREEN = "green"
    YELLOW = "yellow"


# Fixed, total, injective mapping for floor segments 0-3.
SEGMENT_COLORS: tuple[SegmentColor, ...] = (
    SegmentColor.RED,
    SegmentColor.BLUE,
    SegmentColor.GREEN,
    SegmentColor.YELLOW,
)

MAX_ANSWERS = 4
MIN_ANSWERS = 2


class ValidationCode(str, Enum):
    EMPTY_TEXT = "EmptyText"
    TOO_FEW_ANSWERS = "TooFewAnswers"
    TOO_MANY_ANSWERS = "TooManyAnswers"
    NO_CORRECT_ANSWER = "NoCorrectAnswer"
    MULTIPLE_CORRECT_ANSWERS = "MultipleCorrectAnswers"
    DUPLICATE_ANSWER_ID = "DuplicateAnswerId"
    EMPTY_ANSWER_TEXT = "EmptyAnswerText"
    DUPLICATE_QUESTION_ID = "DuplicateQuestionId"


@dataclass(frozen=True)
class ValidationIssue:
    code: ValidationCode
    detail: str

    def to_dict(self) -> dict:
        return {"code": self.code.value, "detail": self.detail}


class ValidationError(ValueError):
    """Raised when a candidate question (or bank) violates an invariant.

    Carries every violated rule, not just the first one found.
    """

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        super().__init__("; ".join(f"{i.code.value}: {i.detail}" for i in issues))


class ParseError(ValueError):
    """Malformed document: not even structurally valid JSON/schema."""

    def __init__(self, reason: str, path: str = "$"):
        self.reason = reason
        self.path = path
        super().__init__(f"{path}: {reason}")


@dataclass(frozen=True)
class Answer:
    id: str
    text: str
    is_correct: bool


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    answers: tuple[Answer, ...]


@dataclass(frozen=True)
class QuestionBank:
    questions: tuple[Question, ...] = ()
    revision: int = 0


@dataclass(frozen=True)
class TeacherAccount:
    username: str
    password_hash: str
    created_at: int  # UTC milliseconds


def new_id() -> str:
    """Collision-resistant opaque id; safe to mint offline."""
    return uuid.uuid4().hex


def validate_question(candidate: dict) -> Question:
    """Check a raw question dict against every invariant.

    Returns a well-formed Question or raises ValidationError carrying all
    violated rules at once.
    """
    issues: list[ValidationIssue] = []

    text = candidate.get("text")
    if not isinstance(text, str) or not text.strip():
        issues.append(ValidationIssue(ValidationCode.EMPTY_TEXT, "question text is empty"))
        text = ""

    raw_answers = candidate.get("answers")
    if not isinstance(raw_answers, list):
        raw_answers = []

    answers: list[Answer] = []
    seen_ids: set[str] = set()
    for pos, raw in enumerate(raw_answers):
        if not isinstance(raw, dict):
            issues.append(
                ValidationIssue(ValidationCode.EMPTY_ANSWER_TEXT, f"answer {pos} is not an object")
            )
            continue
        a_text = raw.get("text")
        if not isinstance(a_text, str) or not a_text.strip():
            issues.append(
                ValidationIssue(ValidationCode.EMPTY_ANSWER_TEXT, f"answer {pos} text is empty")
            )
            a_text = ""
        a_id = raw.get("id") or new_id()
        if a_id in seen_ids:
            issues.append(
                ValidationIssue(ValidationCode.DUPLICATE_ANSWER_ID, f"answer id {a_id!r} repeats")
            )
        seen_ids.add(a_id)
        answers.append(Answer(id=a_id, text=a_text, is_correct=bool(raw.get("is_correct", False))))

    if len(answers) < MIN_ANSWERS:
        issues.append(
            ValidationIssue(ValidationCode.TOO_FEW_ANSWERS, f"{len(answers)} answers, need >= {MIN_ANSWERS}")
        )
    if len(answers) > MAX_ANSWERS:
        issues.append(
            ValidationIssue(ValidationCode.TOO_MANY_ANSWERS, f"{len(answers)} answers, max {MAX_ANSWERS}")
        )

    correct = sum(1 for a in answers if a.is_correct)
    if correct == 0:
        issues.append(ValidationIssue(ValidationCode.NO_CORRECT_ANSWER, "no answer marked correct"))
    elif correct > 1:
        issues.append(
            ValidationIssue(ValidationCode.MULTIPLE_CORRECT_ANSWERS, f"{correct} answers marked correct")
        )

    if issues:
        raise ValidationError(issues)

    return Question(id=candidate.get("id") or new_id(), text=text, answers=tuple(answers))


def assign_segment_colors(question: Question) -> list[tuple[int, SegmentColor, str]]:
    """Pair each answer with its floor segment and fixed color.

    Entry k is (k, color-of-segment-k, answers[k].text). Segments beyond the
    answer count stay unmapped.
    """
    return [(k, SEGMENT_COLORS[k], a.text) for k, a in enumerate(question.answers)]


def _answer_doc(a: Answer) -> dict:
    return {"id": a.id, "text": a.text, "is_correct": a.is_correct}


def _question_doc(q: Question) -> dict:
    return {"id": q.id, "text": q.text, "answers": [_answer_doc(a) for a in q.answers]}


def bank_to_doc(bank: QuestionBank) -> dict:
    return {"revision": bank.revision, "questions": [_question_doc(q) for q in bank.questions]}


def serialize_bank(bank: QuestionBank) -> str:
    """Canonical JSON: fixed key order, compact separators, UTF-8 text.

    Byte equality of two serializations implies value equality.
    """
    return json.dumps(bank_to_doc(bank), separators=(",", ":"), ensure_ascii=False)


def _require(cond: bool, reason: str, path: str) -> None:
    if not cond:
        raise ParseError(reason, path)


def bank_from_doc(doc: object) -> QuestionBank:
    _require(isinstance(doc, dict), "document is not an object", "$")
    assert isinstance(doc, dict)
    revision = doc.get("revision")
    _require(isinstance(revision, int) and not isinstance(revision, bool) and revision >= 0,
             "revision must be a non-negative integer", "$.revision")
    raw_questions = doc.get("questions")
    _require(isinstance(raw_questions, list), "questions must be a list", "$.questions")

    issues: list[ValidationIssue] = []
    questions: list[Question] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_questions):
        _require(isinstance(raw, dict), "question must be an object", f"$.questions[{i}]")
        try:
            q = validate_question(raw)
        except ValidationError as e:
            issues.extend(e.issues)
            continue
        if q.id in seen:
            issues.append(
                ValidationIssue(ValidationCode.DUPLICATE_QUESTION_ID, f"question id {q.id!r} repeats in bank")
            )
        seen.add(q.id)
        questions.append(q)
    if issues:
        raise ValidationError(issues)
    return QuestionBank(questions=tuple(questions), revision=revision)


def parse_bank(document: bytes | str) -> QuestionBank:
    """Inverse of serialize_bank. parse(serialize(b)) == b.

    Raises ParseError for malformed documents, ValidationError when the
    structure parses but an invariant fails.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"invalid UTF-8 at byte {e.start}") from e
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"line {e.lineno} col {e.colno}") from e
    return bank_from_doc(doc)


def merge_sync_payload(
    bank: QuestionBank,
    payload: list[Question],
    deletions: list[str],
) -> QuestionBank:
    """Upsert payload questions into the bank, then drop deleted ids.

    Replacements keep their bank position; new ids append in payload order.
    Revision bumps by exactly 1 iff anything changed. Atomic: any invalid
    payload question rejects the whole merge (callers validate raw input via
    validate_question before building Questions, so here validity is a given).
    Idempotent: re-applying the same (payload, deletions) changes nothing but
    leaves revision alone.
    """
    by_id = {q.id: q for q in payload}
    merged: list[Question] = []
    for q in bank.questions:
        merged.append(by_id.pop(q.id, q))
    for q in payload:
        if q.id in by_id:  # not consumed by a replacement
            merged.append(by_id.pop(q.id))
    dropped = set(deletions)
    merged = [q for q in merged if q.id not in dropped]

    if tuple(merged) == bank.questions:
        return bank
    return QuestionBank(questions=tuple(merged), revision=bank.revision + 1)

"""Quiz session engine: a pure, deterministic transition system.

No clocks, no ambient randomness. Every transition takes the caller's
timestamp (UTC milliseconds) and returns a new state plus the events to
broadcast. Correctness flags never leave the engine except as the verdict
of the segment that was actually pressed.

Shuffled question order uses xorshift64* so golden permutations are
portable across implementations:

    x ^= x >> 12;  x ^= x << 25 (mod 2^64);  x ^= x >> 27
    output = (x * 0x2545F4914F6CDD1D) mod 2^64

A zero seed is remapped to 0x9E3779B97F4A7C15 (xorshift fixes zero).
The permutation is a Fisher-Yates shuffle of [0..n-1] drawing
j = output mod (i+1) for i = n-1 .. 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .model import Question, QuestionBank, SEGMENT_COLORS

FEEDBACK_CORRECT = "Correct!"
FEEDBACK_WRONG = "I'm sorry, but it is wrong!"

_MASK64 = (1 << 64) - 1
_XORSHIFT_STAR_MULT = 0x2545F4914F6CDD1D
_ZERO_SEED_SUBSTITUTE = 0x9E3779B97F4A7C15


class EmptyBank(ValueError):
    """A session needs at least one question."""


class SegmentOutOfRange(ValueError):
    """Segment above 3: a protocol violation, not a silent ignore."""


class Phase(str, Enum):
    IDLE = "idle"
    PRESENTING = "presenting"
    FEEDBACK = "feedback"
    FINISHED = "finished"


class Order(str, Enum):
    SEQUENTIAL = "sequential"
    SHUFFLED = "shuffled"


class WrongPolicy(str, Enum):
    ADVANCE = "advance"
    RETRY = "retry"


@dataclass(frozen=True)
class SessionConfig:
    order: Order = Order.SEQUENTIAL
    shuffle_seed: int = 0
    wrong_policy: WrongPolicy = WrongPolicy.ADVANCE
    feedback_hold_ms: int = 2000
    press_debounce_ms: int = 300

    def __post_init__(self) -> None:
        if self.feedback_hold_ms <= 0:
            raise ValueError("feedback_hold_ms must be positive")
        if self.press_debounce_ms < 0:
            raise ValueError("press_debounce_ms must be non-negative")


@dataclass(frozen=True)
class AnswerLogEntry:
    question_id: str
    segment: int
    was_correct: bool
    at: int
    attempt: int


@dataclass(frozen=True)
class QuestionPosted:
    index: int  # 1-based position within the session
    total: int
    text: str
    answers: tuple[tuple[str, str], ...]  # (label, color), no correctness


@dataclass(frozen=True)
class FeedbackIssued:
    correct: bool
    segment: int
    message: str


@dataclass(frozen=True)
class SessionFinished:
    correct_count: int
    total: int


SessionEvent = QuestionPosted | FeedbackIssued | SessionFinished


@dataclass(frozen=True)
class SessionState:
    config: SessionConfig
    questions: tuple[Question, ...]  # bank snapshot taken at start
    phase: Phase
    question_order: tuple[int, ...]
    cursor: int
    last_verdict: bool | None = None
    last_press_at: int | None = None
    feedback_until: int | None = None
    log: tuple[AnswerLogEntry, ...] = ()
    correct_count: int = 0


@dataclass(frozen=True)
class SessionSummary:
    total: int
    correct_count: int
    entries: tuple[AnswerLogEntry, ...]


def _xorshift64star(state: int) -> tuple[int, int]:
    x = state & _MASK64
    x ^= x >> 12
    x ^= (x << 25) & _MASK64
    x ^= x >> 27
    return x, (x * _XORSHIFT_STAR_MULT) & _MASK64


def shuffled_order(n: int, seed: int) -> tuple[int, ...]:
    """Fisher-Yates permutation of [0..n-1] driven by xorshift64*."""
    state = (seed & _MASK64) or _ZERO_SEED_SUBSTITUTE
    items = list(range(n))
    for i in range(n - 1, 0, -1):
        state, out = _xorshift64star(state)
        j = out % (i + 1)
        items[i], items[j] = items[j], items[i]
    return tuple(items)


def _current_question(state: SessionState) -> Question:
    return state.questions[state.question_order[state.cursor]]


def post_current(state: SessionState) -> QuestionPosted:
    q = _current_question(state)
    return QuestionPosted(
        index=state.cursor + 1,
        total=len(state.question_order),
        text=q.text,
        answers=tuple((a.text, SEGMENT_COLORS[k].value) for k, a in enumerate(q.answers)),
    )


def start_session(
    bank: QuestionBank, config: SessionConfig, now: int
) -> tuple[SessionState, list[SessionEvent]]:
    """Snapshot the bank, fix the question order, present question 1."""
    if not bank.questions:
        raise EmptyBank("cannot start a session on an empty bank")
    n = len(bank.questions)
    if config.order is Order.SHUFFLED:
        order = shuffled_order(n, config.shuffle_seed)
    else:
        order = tuple(range(n))
    state = SessionState(
        config=config,
        questions=bank.questions,
        phase=Phase.PRESENTING,
        question_order=order,
        cursor=0,
    )
    return state, [post_current(state)]


def handle_press(
    state: SessionState, segment: int, now: int
) -> tuple[SessionState, list[SessionEvent]]:
    """Evaluate one floor press. Ignored presses return state unchanged."""
    if segment < 0 or segment > 3:
        raise SegmentOutOfRange(f"segment {segment} outside 0-3")
    if state.phase is not Phase.PRESENTING:
        return state, []
    question = _current_question(state)
    if segment >= len(question.answers):
        return state, []  # unmapped segment
    if (
        state.last_press_at is not None
        and now - state.last_press_at < state.config.press_debounce_ms
    ):
        return state, []

    correct = question.answers[segment].is_correct
    attempt = 1 + sum(1 for e in state.log if e.question_id == question.id)
    entry = AnswerLogEntry(
        question_id=question.id, segment=segment, was_correct=correct, at=now, attempt=attempt
    )
    state = replace(
        state,
        phase=Phase.FEEDBACK,
        last_verdict=correct,
        last_press_at=now,
        feedback_until=now + state.config.feedback_hold_ms,
        log=state.log + (entry,),
        correct_count=state.correct_count + (1 if correct else 0),
    )
    message = FEEDBACK_CORRECT if correct else FEEDBACK_WRONG
    return state, [FeedbackIssued(correct=correct, segment=segment, message=message)]


def tick(state: SessionState, now: int) -> tuple[SessionState, list[SessionEvent]]:
    """Advance past an expired feedback hold. No-op in every other phase."""
    if state.phase is not Phase.FEEDBACK:
        return state, []
    assert state.feedback_until is not None
    if now < state.feedback_until:
        return state, []

    retry_same = (
        state.config.wrong_policy is WrongPolicy.RETRY and state.last_verdict is False
    )
    if retry_same:
        state = replace(state, phase=Phase.PRESENTING, feedback_until=None)
        return state, [post_current(state)]

    cursor = state.cursor + 1
    if cursor == len(state.question_order):
        state = replace(state, phase=Phase.FINISHED, cursor=cursor, feedback_until=None)
        return state, [
            SessionFinished(correct_count=state.correct_count, total=len(state.question_order))
        ]
    state = replace(state, phase=Phase.PRESENTING, cursor=cursor, feedback_until=None)
    return state, [post_current(state)]


def summarize(state: SessionState) -> SessionSummary:
    """Pure read of totals and the per-press log."""
    return SessionSummary(
        total=len(state.question_order),
        correct_count=state.correct_count,
        entries=state.log,
    )

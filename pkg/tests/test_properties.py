"""Property tests over the pure core: serialization, validation, the
shuffle, and the session state machine under random press/tick sequences."""

import json

from hypothesis import given, settings, strategies as st

from interactive_edu import engine, wire
from interactive_edu.engine import (
    Order,
    Phase,
    SessionConfig,
    WrongPolicy,
    handle_press,
    shuffled_order,
    start_session,
    tick,
)
from interactive_edu.model import (
    Answer,
    Question,
    QuestionBank,
    parse_bank,
    serialize_bank,
    validate_question,
)

text_st = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=30
).filter(lambda s: s.strip())

ids_st = st.uuids().map(lambda u: u.hex)


@st.composite
def questions_st(draw) -> Question:
    n = draw(st.integers(min_value=2, max_value=4))
    correct = draw(st.integers(min_value=0, max_value=n - 1))
    return Question(
        id=draw(ids_st),
        text=draw(text_st),
        answers=tuple(
            Answer(id=f"a{k}", text=draw(text_st), is_correct=k == correct) for k in range(n)
        ),
    )


@st.composite
def banks_st(draw, min_questions=1, max_questions=10) -> QuestionBank:
    n = draw(st.integers(min_value=min_questions, max_value=max_questions))
    questions = []
    seen = set()
    while len(questions) < n:
        q = draw(questions_st())
        if q.id not in seen:
            seen.add(q.id)
            questions.append(q)
    return QuestionBank(
        questions=tuple(questions), revision=draw(st.integers(min_value=0, max_value=100))
    )


# press/tick steps: (kind, argument) where press carries a segment,
# tick carries a time delta in ms
steps_st = st.lists(
    st.one_of(
        st.tuples(st.just("press"), st.integers(min_value=0, max_value=3)),
        st.tuples(st.just("tick"), st.integers(min_value=0, max_value=4000)),
    ),
    max_size=40,
)


def run_steps(bank, config, steps):
    """Drive the engine and collect (state, all events)."""
    t = 1_000_000
    state, events = start_session(bank, config, t)
    for kind, arg in steps:
        if kind == "press":
            t += 350  # above default debounce, keeps focus on phase rules
            state, out = handle_press(state, arg, t)
        else:
            t += arg
            state, out = tick(state, t)
        events.extend(out)
    return state, events


class TestSerializationProperties:
    @given(banks_st(min_questions=0))
    @settings(max_examples=250, deadline=None)
    def test_parse_serialize_identity(self, bank):
        assert parse_bank(serialize_bank(bank)) == bank

    @given(banks_st())
    @settings(max_examples=100, deadline=None)
    def test_every_question_has_exactly_one_correct(self, bank):
        for q in bank.questions:
            assert sum(a.is_correct for a in q.answers) == 1
            # and validation agrees with construction
            revalidated = validate_question(
                {
                    "id": q.id,
                    "text": q.text,
                    "answers": [
                        {"id": a.id, "text": a.text, "is_correct": a.is_correct}
                        for a in q.answers
                    ],
                }
            )
            assert revalidated == q


class TestShuffleProperties:
    @given(st.integers(min_value=1, max_value=50), st.integers(min_value=0, max_value=2**64 - 1))
    @settings(max_examples=300, deadline=None)
    def test_permutation_valid_and_deterministic(self, n, seed):
        order = shuffled_order(n, seed)
        assert sorted(order) == list(range(n))
        assert shuffled_order(n, seed) == order


class TestEngineProperties:
    @given(banks_st(), steps_st)
    @settings(max_examples=250, deadline=None)
    def test_no_event_leaks_answer_keys(self, bank, steps):
        _, events = run_steps(bank, SessionConfig(), steps)
        for event in events:
            assert "is_correct" not in json.dumps(wire.event_frame(event))

    @given(banks_st(), steps_st)
    @settings(max_examples=250, deadline=None)
    def test_correct_count_conservation_advance(self, bank, steps):
        state, _ = run_steps(bank, SessionConfig(), steps)
        first_attempt_correct = sum(
            1 for e in state.log if e.attempt == 1 and e.was_correct
        )
        assert state.correct_count == first_attempt_correct
        assert state.correct_count <= len({e.question_id for e in state.log})

    @given(banks_st(), steps_st)
    @settings(max_examples=100, deadline=None)
    def test_replay_determinism(self, bank, steps):
        a = run_steps(bank, SessionConfig(), steps)
        b = run_steps(bank, SessionConfig(), steps)
        assert a == b

    @given(banks_st(), steps_st, st.booleans())
    @settings(max_examples=150, deadline=None)
    def test_state_invariants_hold(self, bank, steps, retry):
        policy = WrongPolicy.RETRY if retry else WrongPolicy.ADVANCE
        state, _ = run_steps(bank, SessionConfig(wrong_policy=policy), steps)
        n = len(bank.questions)
        assert sorted(state.question_order) == list(range(n))
        if state.phase in (Phase.PRESENTING, Phase.FEEDBACK):
            assert 0 <= state.cursor < n
        if state.phase is Phase.FINISHED:
            assert state.cursor == n

    @given(banks_st(max_questions=5), st.integers(min_value=0, max_value=2**64 - 1))
    @settings(max_examples=100, deadline=None)
    def test_progress_under_advance(self, bank, seed):
        # one mapped press + one expired tick per question always finishes
        config = SessionConfig(order=Order.SHUFFLED, shuffle_seed=seed)
        t = 0
        state, _ = start_session(bank, config, t)
        for _ in range(len(bank.questions)):
            assert state.phase is Phase.PRESENTING
            state, events = handle_press(state, 0, t := t + 1000)
            assert any(isinstance(e, engine.FeedbackIssued) for e in events)
            state, _ = tick(state, t := t + 2000)
        assert state.phase is Phase.FINISHED

    @given(banks_st(), st.integers(min_value=1, max_value=299))
    @settings(max_examples=100, deadline=None)
    def test_debounced_press_changes_nothing(self, bank, gap):
        state, _ = start_session(bank, SessionConfig(feedback_hold_ms=100), 0)
        state, _ = handle_press(state, 0, 1000)
        state, _ = tick(state, 1100)
        if state.phase is not Phase.PRESENTING:
            return  # single-question bank finished
        after, events = handle_press(state, 1, 1000 + gap)
        assert after == state and events == []

import pytest

from interactive_edu.model import (
    Answer,
    ParseError,
    Question,
    QuestionBank,
    SegmentColor,
    ValidationCode,
    ValidationError,
    assign_segment_colors,
    merge_sync_payload,
    parse_bank,
    serialize_bank,
    validate_question,
)


def raw_question(n_answers=4, correct=0, text="Q?"):
    return {
        "text": text,
        "answers": [
            {"id": f"a{k}", "text": f"answer {k}", "is_correct": k == correct}
            for k in range(n_answers)
        ],
    }


class TestValidateQuestion:
    def test_four_answers_one_correct_is_valid(self):
        q = validate_question(raw_question(4, correct=2))
        assert isinstance(q, Question)
        assert len(q.answers) == 4
        assert [a.is_correct for a in q.answers] == [False, False, True, False]

    def test_five_answers_rejected(self):
        with pytest.raises(ValidationError) as e:
            validate_question(raw_question(5))
        assert [i.code for i in e.value.issues] == [ValidationCode.TOO_MANY_ANSWERS]

    def test_no_correct_answer(self):
        raw = raw_question(2)
        for a in raw["answers"]:
            a["is_correct"] = False
        with pytest.raises(ValidationError) as e:
            validate_question(raw)
        assert [i.code for i in e.value.issues] == [ValidationCode.NO_CORRECT_ANSWER]

    def test_all_violations_reported_together(self):
        raw = {"text": "  ", "answers": [{"id": "a0", "text": "x", "is_correct": True}]}
        with pytest.raises(ValidationError) as e:
            validate_question(raw)
        codes = {i.code for i in e.value.issues}
        assert codes == {ValidationCode.EMPTY_TEXT, ValidationCode.TOO_FEW_ANSWERS}

    def test_multiple_correct(self):
        raw = raw_question(3)
        raw["answers"][1]["is_correct"] = True
        with pytest.raises(ValidationError) as e:
            validate_question(raw)
        assert ValidationCode.MULTIPLE_CORRECT_ANSWERS in {i.code for i in e.value.issues}

    def test_duplicate_answer_id(self):
        raw = raw_question(2)
        raw["answers"][1]["id"] = "a0"
        with pytest.raises(ValidationError) as e:
            validate_question(raw)
        assert ValidationCode.DUPLICATE_ANSWER_ID in {i.code for i in e.value.issues}

    def test_empty_answer_text(self):
        raw = raw_question(2)
        raw["answers"][1]["text"] = "   "
        with pytest.raises(ValidationError) as e:
            validate_question(raw)
        assert ValidationCode.EMPTY_ANSWER_TEXT in {i.code for i in e.value.issues}

    def test_ids_minted_when_absent(self):
        raw = raw_question(2)
        for a in raw["answers"]:
            del a["id"]
        q = validate_question(raw)
        assert len({a.id for a in q.answers}) == 2


class TestSegmentColors:
    def test_four_answer_mapping(self):
        q = validate_question(raw_question(4))
        rows = assign_segment_colors(q)
        # expected from the fixed table: 0 red, 1 blue, 2 green, 3 yellow
        assert rows == [
            (0, SegmentColor.RED, "answer 0"),
            (1, SegmentColor.BLUE, "answer 1"),
            (2, SegmentColor.GREEN, "answer 2"),
            (3, SegmentColor.YELLOW, "answer 3"),
        ]

    def test_two_answer_prefix(self):
        q = validate_question(raw_question(2))
        rows = assign_segment_colors(q)
        assert [(s, c) for s, c, _ in rows] == [(0, SegmentColor.RED), (1, SegmentColor.BLUE)]

    def test_pure(self):
        q = validate_question(raw_question(3))
        assert assign_segment_colors(q) == assign_segment_colors(q)


class TestSerialization:
    def test_empty_bank_canonical_form(self):
        assert serialize_bank(QuestionBank()) == '{"revision":0,"questions":[]}'
        assert parse_bank('{"revision":0,"questions":[]}') == QuestionBank()

    def test_round_trip(self, bank3):
        assert parse_bank(serialize_bank(bank3)) == bank3

    def test_round_trip_bytes(self, bank3):
        assert parse_bank(serialize_bank(bank3).encode("utf-8")) == bank3

    def test_two_correct_rejected_at_parse_boundary(self):
        doc = serialize_bank(
            QuestionBank(
                questions=(
                    Question(
                        id="q",
                        text="t",
                        answers=(Answer("a", "x", True), Answer("b", "y", True)),
                    ),
                )
            )
        )
        with pytest.raises(ValidationError) as e:
            parse_bank(doc)
        assert ValidationCode.MULTIPLE_CORRECT_ANSWERS in {i.code for i in e.value.issues}

    def test_malformed_json_reports_position(self):
        with pytest.raises(ParseError) as e:
            parse_bank('{"revision":0,')
        assert "line" in str(e.value)

    def test_duplicate_question_ids_rejected(self, bank3):
        doc = serialize_bank(bank3).replace('"id":"q2"', '"id":"q1"')
        with pytest.raises(ValidationError):
            parse_bank(doc)


class TestMerge:
    def q(self, qid, text="t"):
        return validate_question(raw_question(2, text=text) | {"id": qid})

    def test_insert_into_empty(self):
        merged = merge_sync_payload(QuestionBank(), [self.q("q1")], [])
        assert [q.id for q in merged.questions] == ["q1"]
        assert merged.revision == 1

    def test_upsert_and_delete(self):
        bank = QuestionBank(questions=(self.q("q1", "old"), self.q("q2")), revision=5)
        merged = merge_sync_payload(bank, [self.q("q1", "new")], ["q2"])
        assert [q.id for q in merged.questions] == ["q1"]
        assert merged.questions[0].text == "new"
        assert merged.revision == 6

    def test_noop_keeps_revision(self, bank3):
        assert merge_sync_payload(bank3, [], []) == bank3

    def test_idempotent_modulo_revision(self, bank3):
        payload, deletions = [self.q("qx")], ["q2"]
        once = merge_sync_payload(bank3, payload, deletions)
        twice = merge_sync_payload(once, payload, deletions)
        assert twice.questions == once.questions
        assert twice.revision == once.revision

    def test_replacement_keeps_bank_order(self, bank3):
        merged = merge_sync_payload(bank3, [self.q("q2", "replaced")], [])
        assert [q.id for q in merged.questions] == ["q1", "q2", "q3"]

    def test_new_ids_append_in_payload_order(self, bank3):
        merged = merge_sync_payload(bank3, [self.q("zz"), self.q("aa")], [])
        assert [q.id for q in merged.questions] == ["q1", "q2", "q3", "zz", "aa"]

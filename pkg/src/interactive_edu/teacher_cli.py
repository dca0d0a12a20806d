"""Teacher CLI: offline-first question authoring, then credentialed sync.

Questions live in a local bank file (same canonical format as the server's
bank document). Removals are queued in a sidecar file and shipped with the
next sync, mirroring the local-store-then-synchronize workflow.
"""

from __future__ import annotations

import argparse
import getpass
import json
import os
import stat
import sys
from pathlib import Path

import requests

from .model import (
    ParseError,
    Question,
    QuestionBank,
    ValidationError,
    assign_segment_colors,
    bank_to_doc,
    merge_sync_payload,
    parse_bank,
    serialize_bank,
    validate_question,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_AUTH = 2
EXIT_CONNECTIVITY = 3
EXIT_CONFLICT = 4
EXIT_USAGE = 5

DEFAULT_CREDENTIALS = Path.home() / ".config" / "interactive-edu" / "credentials.json"


def credentials_path() -> Path:
    override = os.environ.get("INTERACTIVE_EDU_CREDENTIALS")
    return Path(override) if override else DEFAULT_CREDENTIALS


def save_credentials(hub: str, token: str, expires_at: int) -> None:
    path = credentials_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"hub": hub, "token": token, "expires_at": expires_at}))
    path.chmod(stat.S_IRUSR | stat.S_IWUSR)


def load_token() -> str | None:
    path = credentials_path()
    if not path.exists():
        return None
    try:
        return json.loads(path.read_text()).get("token")
    except (json.JSONDecodeError, OSError):
        return None


def load_local_bank(path: Path) -> QuestionBank:
    if not path.exists():
        return QuestionBank()
    return parse_bank(path.read_bytes())


def save_local_bank(path: Path, bank: QuestionBank) -> None:
    path.write_text(serialize_bank(bank), encoding="utf-8")


def pending_path(bank_path: Path) -> Path:
    return bank_path.with_name(bank_path.name + ".pending.json")


def load_pending_deletions(bank_path: Path) -> list[str]:
    path = pending_path(bank_path)
    if not path.exists():
        return []
    return json.loads(path.read_text()).get("deletions", [])


def save_pending_deletions(bank_path: Path, deletions: list[str]) -> None:
    path = pending_path(bank_path)
    if deletions:
        path.write_text(json.dumps({"deletions": deletions}))
    elif path.exists():
        path.unlink()


def _auth_headers() -> dict[str, str]:
    token = load_token()
    if token is None:
        raise SystemExit(_fail(EXIT_AUTH, "not logged in; run `edu-teacher login` first"))
    return {"Authorization": f"Bearer {token}"}


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _ask_password(args) -> str:
    if args.password is not None:
        return args.password
    return getpass.getpass("password: ")


def _http(method: str, url: str, **kwargs):
    try:
        return requests.request(method, url, timeout=10, **kwargs)
    except requests.ConnectionError as e:
        raise SystemExit(_fail(EXIT_CONNECTIVITY, f"cannot reach hub: {e}"))


def cmd_register(args) -> int:
    response = _http(
        "POST",
        f"{args.hub}/api/teachers/register",
        json={"username": args.username, "password": _ask_password(args)},
    )
    if response.status_code == 201:
        print(f"registered {args.username}")
        return EXIT_OK
    if response.status_code == 409:
        return _fail(EXIT_CONFLICT, f"username {args.username!r} is taken")
    return _fail(EXIT_VALIDATION, f"register failed: {response.status_code} {response.text}")


def cmd_login(args) -> int:
    response = _http(
        "POST",
        f"{args.hub}/api/teachers/login",
        json={"username": args.username, "password": _ask_password(args)},
    )
    if response.status_code != 200:
        return _fail(EXIT_AUTH, "login failed: bad credentials")
    body = response.json()
    save_credentials(args.hub, body["token"], body["expires_at"])
    print(f"logged in as {args.username}")
    return EXIT_OK


def _parse_answer_args(raw_answers: list[str]) -> list[dict]:
    answers = []
    for raw in raw_answers:
        if raw.endswith(":correct"):
            answers.append({"text": raw[: -len(":correct")], "is_correct": True})
        else:
            answers.append({"text": raw, "is_correct": False})
    return answers


def cmd_add(args) -> int:
    bank_path = Path(args.bank)
    try:
        bank = load_local_bank(bank_path)
        question = validate_question(
            {"text": args.text, "answers": _parse_answer_args(args.answer or [])}
        )
    except ValidationError as e:
        for issue in e.issues:
            print(f"error: {issue.code.value}: {issue.detail}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseError as e:
        return _fail(EXIT_VALIDATION, f"local bank is unreadable: {e}")
    save_local_bank(bank_path, merge_sync_payload(bank, [question], []))
    print(f"added {question.id}")
    return EXIT_OK


def cmd_list(args) -> int:
    try:
        bank = load_local_bank(Path(args.bank))
    except (ParseError, ValidationError) as e:
        return _fail(EXIT_VALIDATION, f"local bank is unreadable: {e}")
    print(f"revision {bank.revision}, {len(bank.questions)} question(s)")
    for q in bank.questions:
        print(f"[{q.id}] {q.text}")
        for segment, color, text in assign_segment_colors(q):
            marker = "*" if q.answers[segment].is_correct else " "
            print(f"  {segment} {color.value:<6} {marker} {text}")
    return EXIT_OK


def cmd_remove(args) -> int:
    bank_path = Path(args.bank)
    try:
        bank = load_local_bank(bank_path)
    except (ParseError, ValidationError) as e:
        return _fail(EXIT_VALIDATION, f"local bank is unreadable: {e}")
    if all(q.id != args.id for q in bank.questions):
        return _fail(EXIT_VALIDATION, f"no local question with id {args.id!r}")
    save_local_bank(bank_path, merge_sync_payload(bank, [], [args.id]))
    deletions = load_pending_deletions(bank_path)
    if args.id not in deletions:
        deletions.append(args.id)
    save_pending_deletions(bank_path, deletions)
    print(f"removed {args.id} (deletion queued for next sync)")
    return EXIT_OK


def cmd_sync(args) -> int:
    bank_path = Path(args.bank)
    try:
        bank = load_local_bank(bank_path)
    except (ParseError, ValidationError) as e:
        return _fail(EXIT_VALIDATION, f"local bank is unreadable: {e}")
    deletions = load_pending_deletions(bank_path)
    payload = {
        "questions": bank_to_doc(bank)["questions"],
        "deletions": deletions,
    }
    response = _http("POST", f"{args.hub}/api/sync", json=payload, headers=_auth_headers())
    if response.status_code == 401:
        return _fail(EXIT_AUTH, "token rejected; run `edu-teacher login` again")
    if response.status_code == 400:
        for issue in response.json().get("errors", []):
            print(f"error: {issue['code']}: {issue['detail']}", file=sys.stderr)
        return EXIT_VALIDATION
    if response.status_code != 200:
        return _fail(EXIT_CONNECTIVITY, f"sync failed: {response.status_code} {response.text}")
    revision = response.json()["revision"]
    save_local_bank(bank_path, QuestionBank(questions=bank.questions, revision=revision))
    save_pending_deletions(bank_path, [])
    print(f"synced, server revision {revision}")
    return EXIT_OK


def cmd_start(args) -> int:
    body: dict = {"order": "shuffled" if args.shuffle else "sequential"}
    if args.seed is not None:
        body["shuffle_seed"] = args.seed
    if args.retry:
        body["wrong_policy"] = "retry"
    if args.hold_ms is not None:
        body["feedback_hold_ms"] = args.hold_ms
    response = _http("POST", f"{args.hub}/api/session/start", json=body, headers=_auth_headers())
    if response.status_code == 401:
        return _fail(EXIT_AUTH, "token rejected; run `edu-teacher login` again")
    if response.status_code == 409:
        return _fail(EXIT_CONFLICT, response.json().get("detail", "conflict"))
    if response.status_code != 200:
        return _fail(EXIT_VALIDATION, f"start failed: {response.status_code} {response.text}")
    print(f"session started: {response.json()['total']} question(s)")
    return EXIT_OK


def cmd_stop(args) -> int:
    response = _http("POST", f"{args.hub}/api/session/stop", headers=_auth_headers())
    if response.status_code == 401:
        return _fail(EXIT_AUTH, "token rejected; run `edu-teacher login` again")
    if response.status_code == 409:
        return _fail(EXIT_CONFLICT, "no session running")
    summary = response.json()
    print(f"session stopped: {summary['correct_count']}/{summary['total']} correct, "
          f"{len(summary['entries'])} press(es) logged")
    return EXIT_OK


def cmd_watch(args) -> int:
    from websockets.sync.client import connect as ws_connect

    from . import wire
    from .wire import ClientRole

    ws_url = args.hub.replace("http://", "ws://").replace("https://", "wss://") + "/ws"
    try:
        ws = ws_connect(ws_url)
    except Exception as e:
        return _fail(EXIT_CONNECTIVITY, f"cannot reach hub: {e}")
    ws.send(wire.encode(wire.hello(ClientRole.OBSERVER)))
    try:
        for raw in ws:
            frame = json.loads(raw)
            kind = frame.get("type")
            if kind == "question":
                print(f"question {frame['index']}/{frame['total']}: {frame['text']}")
                for k, a in enumerate(frame["answers"]):
                    print(f"  {k} {a['color']:<6} {a['label']}")
            elif kind == "feedback":
                verdict = "correct" if frame["correct"] else "wrong"
                print(f"feedback: segment {frame['segment']} -> {verdict}: {frame['message']}")
            elif kind == "finished":
                print(f"finished: {frame['correct_count']}/{frame['total']} correct")
            elif kind != "welcome":
                print(raw)
    except KeyboardInterrupt:
        pass
    finally:
        ws.close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="edu-teacher", description="quiz authoring and control")
    parser.add_argument("--hub", default=os.environ.get("INTERACTIVE_EDU_HUB", "http://127.0.0.1:8080"))
    parser.add_argument("--bank", default="bank.json", help="local question bank file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register")
    p.add_argument("username")
    p.add_argument("--password")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("login")
    p.add_argument("username")
    p.add_argument("--password")
    p.set_defaults(func=cmd_login)

    p = sub.add_parser("add")
    p.add_argument("--text", required=True)
    p.add_argument("--answer", action="append",
                   help="answer text; suffix :correct marks the right one")
    p.set_defaults(func=cmd_add)

    p = sub.add_parser("list")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("remove")
    p.add_argument("id")
    p.set_defaults(func=cmd_remove)

    p = sub.add_parser("sync")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("start")
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--retry", action="store_true")
    p.add_argument("--hold-ms", type=int)
    p.set_defaults(func=cmd_start)

    p = sub.add_parser("stop")
    p.set_defaults(func=cmd_stop)

    p = sub.add_parser("watch")
    p.set_defaults(func=cmd_watch)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())

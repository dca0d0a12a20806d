"""File-backed persistence for the hub: teachers + question bank.

One canonical-JSON document, written atomically (temp file + fsync +
rename) so a crash mid-write never leaves a corrupt store on disk.
A corrupt store fails loud at load time; the server must refuse to start.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    ParseError,
    QuestionBank,
    TeacherAccount,
    bank_from_doc,
    bank_to_doc,
)


@dataclass(frozen=True)
class Store:
    teachers: tuple[TeacherAccount, ...] = ()
    bank: QuestionBank = field(default_factory=QuestionBank)


def store_to_doc(store: Store) -> dict:
    return {
        "teachers": [
            {"username": t.username, "password_hash": t.password_hash, "created_at": t.created_at}
            for t in store.teachers
        ],
        "bank": bank_to_doc(store.bank),
    }


def store_from_doc(doc: object) -> Store:
    if not isinstance(doc, dict):
        raise ParseError("store document is not an object")
    raw_teachers = doc.get("teachers")
    if not isinstance(raw_teachers, list):
        raise ParseError("teachers must be a list", "$.teachers")
    teachers = []
    for i, raw in enumerate(raw_teachers):
        if not isinstance(raw, dict):
            raise ParseError("teacher must be an object", f"$.teachers[{i}]")
        try:
            teachers.append(
                TeacherAccount(
                    username=raw["username"],
                    password_hash=raw["password_hash"],
                    created_at=raw["created_at"],
                )
            )
        except KeyError as e:
            raise ParseError(f"missing field {e}", f"$.teachers[{i}]") from e
    return Store(teachers=tuple(teachers), bank=bank_from_doc(doc.get("bank")))


def serialize_store(store: Store) -> str:
    return json.dumps(store_to_doc(store), separators=(",", ":"), ensure_ascii=False)


def persist_store(store: Store, path: Path) -> None:
    """Write-temp-then-rename so readers only ever see complete documents."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        os.write(fd, serialize_store(store).encode("utf-8"))
        os.fsync(fd)
        os.close(fd)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.close(fd)
        except OSError:
            pass
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_store(path: Path) -> Store:
    """Load the store; an absent file is a cold start (empty store)."""
    path = Path(path)
    if not path.exists():
        return Store()
    raw = path.read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"corrupt store at {path}: {e}") from e
    return store_from_doc(doc)

import socket
import threading
import time

import pytest
import uvicorn

from interactive_edu.hub import Hub, create_app
from interactive_edu.model import Answer, Question, QuestionBank


def make_bank() -> QuestionBank:
    """3-question fixture: correct segments are 2, 0, 1."""
    return QuestionBank(
        revision=3,
        questions=(
            Question(
                id="q1",
                text="What is 2+2?",
                answers=(
                    Answer("a1", "3", False),
                    Answer("a2", "5", False),
                    Answer("a3", "4", True),
                    Answer("a4", "22", False),
                ),
            ),
            Question(
                id="q2",
                text="Capital of France?",
                answers=(
                    Answer("b1", "Paris", True),
                    Answer("b2", "Lyon", False),
                ),
            ),
            Question(
                id="q3",
                text="Largest planet?",
                answers=(
                    Answer("c1", "Mars", False),
                    Answer("c2", "Jupiter", True),
                    Answer("c3", "Venus", False),
                ),
            ),
        ),
    )


@pytest.fixture
def bank3() -> QuestionBank:
    return make_bank()


class LiveHub:
    """The real hub served by uvicorn in a background thread."""

    def __init__(self, store_path, token_ttl_ms=12 * 3600 * 1000):
        self.store_path = store_path
        self.hub = Hub(store_path, token_ttl_ms=token_ttl_ms)
        app = create_app(self.hub)
        config = uvicorn.Config(
            app, host="127.0.0.1", port=0, log_level="warning",
            ws_ping_interval=15, ws_ping_timeout=30,
        )
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("hub did not start")
            time.sleep(0.01)
        self.port = self.server.servers[0].sockets[0].getsockname()[1]

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    @property
    def ws_url(self) -> str:
        return f"ws://127.0.0.1:{self.port}/ws"

    def stop(self) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture
def live_hub(tmp_path):
    hub = LiveHub(tmp_path / "store.json")
    yield hub
    hub.stop()


def register_and_login(base_url: str, username="teacher", password="pw123") -> str:
    import requests

    requests.post(f"{base_url}/api/teachers/register",
                  json={"username": username, "password": password}, timeout=5)
    response = requests.post(f"{base_url}/api/teachers/login",
                             json={"username": username, "password": password}, timeout=5)
    assert response.status_code == 200, response.text
    return response.json()["token"]


def bank_sync_payload(bank: QuestionBank) -> dict:
    from interactive_edu.model import bank_to_doc

    return {"questions": bank_to_doc(bank)["questions"], "deletions": []}


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]

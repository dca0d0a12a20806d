"""Floor simulator: a terminal stand-in for the physical mat.

Connects to the hub as role=floor and injects presses either from a script
file or interactively (keys 1-4 map to segments 0-3). Every received frame
is printed, so transcripts double as test fixtures.

Script format, one command per line, `#` comments allowed:

    wait <ms>
    press <0-3>
    expect feedback <correct|wrong>

Exit codes: 0 ok, 1 assertion failed, 2 connectivity, 3 parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import queue
import sys
import threading

from websockets.sync.client import connect as ws_connect

from . import wire
from .wire import ClientRole

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONNECTIVITY = 2
EXIT_PARSE = 3

FEEDBACK_TIMEOUT_S = 10.0


class ScriptParseError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclasses.dataclass(frozen=True)
class Wait:
    ms: int


@dataclasses.dataclass(frozen=True)
class Press:
    segment: int


@dataclasses.dataclass(frozen=True)
class ExpectFeedback:
    correct: bool


Command = Wait | Press | ExpectFeedback


def parse_script(text: str) -> list[Command]:
    commands: list[Command] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "wait" and len(parts) == 2:
            try:
                ms = int(parts[1])
            except ValueError:
                raise ScriptParseError(lineno, f"wait wants an integer, got {parts[1]!r}")
            if ms <= 0:
                raise ScriptParseError(lineno, "wait must be positive")
            commands.append(Wait(ms))
        elif parts[0] == "press" and len(parts) == 2:
            try:
                segment = int(parts[1])
            except ValueError:
                raise ScriptParseError(lineno, f"press wants an integer, got {parts[1]!r}")
            if not 0 <= segment <= 3:
                raise ScriptParseError(lineno, f"segment {segment} outside 0-3")
            commands.append(Press(segment))
        elif parts[:2] == ["expect", "feedback"] and len(parts) == 3:
            if parts[2] not in ("correct", "wrong"):
                raise ScriptParseError(lineno, f"expected correct|wrong, got {parts[2]!r}")
            commands.append(ExpectFeedback(parts[2] == "correct"))
        else:
            raise ScriptParseError(lineno, f"unrecognized command {line!r}")
    return commands


class FloorClient:
    """One socket, two activities: a receiver thread feeding a transcript
    (and a feedback queue for assertions) plus the command executor."""

    def __init__(self, hub_url: str, out=sys.stdout):
        self.out = out
        self.transcript: list[dict] = []
        self._feedback: queue.Queue[dict] = queue.Queue()
        try:
            self._ws = ws_connect(hub_url)
        except Exception as e:
            raise ConnectionRefusedError(f"cannot reach hub at {hub_url}: {e}") from e
        self._receiver = threading.Thread(target=self._receive_loop, daemon=True)
        self._receiver.start()
        self._ws.send(wire.encode(wire.hello(ClientRole.FLOOR)))

    def _receive_loop(self) -> None:
        try:
            for raw in self._ws:
                frame = json.loads(raw)
                self.transcript.append(frame)
                print(raw, file=self.out, flush=True)
                if frame.get("type") == "feedback":
                    self._feedback.put(frame)
        except Exception:
            pass  # socket closed

    def press(self, segment: int) -> None:
        self._ws.send(wire.encode(wire.press(segment)))

    def await_feedback(self, timeout: float = FEEDBACK_TIMEOUT_S) -> dict | None:
        try:
            return self._feedback.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        try:
            self._ws.close()
        except Exception:
            pass


def run_script(commands: list[Command], hub_url: str, out=sys.stdout) -> int:
    import time

    try:
        client = FloorClient(hub_url, out=out)
    except ConnectionRefusedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONNECTIVITY
    try:
        for i, command in enumerate(commands):
            if isinstance(command, Wait):
                time.sleep(command.ms / 1000)
            elif isinstance(command, Press):
                client.press(command.segment)
            else:
                frame = client.await_feedback()
                if frame is None:
                    print(f"error: command {i}: no feedback arrived", file=sys.stderr)
                    return EXIT_ASSERTION
                if frame["correct"] is not command.correct:
                    wanted = "correct" if command.correct else "wrong"
                    print(
                        f"error: command {i}: expected {wanted} feedback, got {frame}",
                        file=sys.stderr,
                    )
                    return EXIT_ASSERTION
        return EXIT_OK
    finally:
        client.close()


def run_interactive(hub_url: str) -> int:
    try:
        client = FloorClient(hub_url)
    except ConnectionRefusedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONNECTIVITY
    print("keys 1-4 press segments 0-3, q quits", flush=True)
    try:
        while True:
            key = sys.stdin.read(1)
            if not key or key == "q":
                return EXIT_OK
            if key in "1234":
                client.press(int(key) - 1)
    except KeyboardInterrupt:
        return EXIT_OK
    finally:
        client.close()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="floor-sim", description="simulated interactive floor")
    parser.add_argument("--hub", required=True, help="hub WebSocket URL, e.g. ws://host:8080/ws")
    parser.add_argument("--script", help="press script file")
    parser.add_argument("--interactive", action="store_true")
    args = parser.parse_args(argv)

    if args.script:
        try:
            text = open(args.script, encoding="utf-8").read()
            commands = parse_script(text)
        except OSError as e:
            print(f"error: cannot read script: {e}", file=sys.stderr)
            return EXIT_PARSE
        except ScriptParseError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_PARSE
        return run_script(commands, args.hub)
    if args.interactive:
        return run_interactive(args.hub)
    parser.error("need --script or --interactive")
    return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())

"""Mind backends: rule productions, transcript replay, external adapter.

The external adapter speaks a line-delimited protocol over a child
process pipe or an HTTP endpoint: one JSON request per line with fields
{agent, tick, mode, prompt}, one JSON response per line with {text}.
Every exchange can be recorded to a replay log, which the scripted
backend consumes verbatim, turning any external session into a
deterministic regression fixture.
"""

from __future__ import annotations

import json
import select
import subprocess
import urllib.error
import urllib.request

from geosim.errors import BackendError


def parse_steps(text: str) -> tuple:
    """Plan text to action names: separators are ';', ',' or whitespace."""
    for sep in (";", ","):
        text = text.replace(sep, " ")
    return tuple(tok for tok in text.split() if tok)


def plan_prompt(goal, memories, capabilities) -> str:
    mems = " | ".join(m.text for m in memories)
    caps = ", ".join(a.name for a in capabilities.capabilities)
    return f"goal: {goal.id}; memories: {mems}; capabilities: {caps}"


class RuleBasedMind:
    """Condition-action productions over goal ids; '*' matches any goal."""

    kind = "rule_based"

    def __init__(self, productions):
        self.productions = tuple(productions)  # (goal id or '*', action name)

    def plan_steps(self, goal, memories, capabilities, *, agent=0, tick=0):
        return tuple(action for target, action in self.productions
                     if target == goal.id or target == "*")

    def perceive(self, prompt, *, agent=0, tick=0):
        return None  # template rendering already happened


class ScriptedMind:
    """Replays a recorded transcript keyed by (agent, tick, mode)."""

    kind = "scripted"

    def __init__(self, transcript: dict):
        self.transcript = dict(transcript)

    def plan_steps(self, goal, memories, capabilities, *, agent=0, tick=0):
        try:
            text = self.transcript[(agent, tick, "plan")]
        except KeyError:
            raise BackendError(
                f"transcript has no plan for agent {agent} at tick {tick}")
        return parse_steps(text)

    def perceive(self, prompt, *, agent=0, tick=0):
        return self.transcript.get((agent, tick, "perceive"))


class ReplayLog:
    """Appends one JSON line per backend exchange."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "a", encoding="utf-8")

    def record(self, agent, tick, mode, prompt, text):
        line = json.dumps({"agent": agent, "tick": tick, "mode": mode,
                           "prompt": prompt, "text": text},
                          separators=(",", ":"), ensure_ascii=False)
        self._fh.write(line + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def load_transcript(path) -> dict:
    """Replay log (or hand-written transcript) to a scripted lookup table."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            table[(rec["agent"], rec["tick"], rec["mode"])] = rec["text"]
    return table


class PipeTransport:
    """Child process exchanging one JSON line per request on its stdio."""

    def __init__(self, argv, timeout: float = 30.0):
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        except OSError as exc:
            raise BackendError(f"could not start backend process: {exc}")

    def request(self, payload: dict) -> str:
        try:
            self.proc.stdin.write(json.dumps(payload, separators=(",", ":")) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise BackendError(f"backend pipe closed: {exc}")
        ready, _, _ = select.select([self.proc.stdout], [], [], self.timeout)
        if not ready:
            raise BackendError(f"backend timed out after {self.timeout:g}s")
        line = self.proc.stdout.readline()
        if not line:
            raise BackendError("backend closed its output")
        try:
            return json.loads(line)["text"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise BackendError(f"unparseable backend response: {exc}")

    def close(self):
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class HttpTransport:
    """Single endpoint receiving the same JSON payload via POST."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout

    def request(self, payload: dict) -> str:
        data = json.dumps(payload, separators=(",", ":")).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=data, headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = resp.read().decode("utf-8")
        except (urllib.error.URLError, OSError) as exc:
            raise BackendError(f"backend endpoint failed: {exc}")
        try:
            return json.loads(body)["text"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise BackendError(f"unparseable backend response: {exc}")


class ExternalMind:
    """Adapter over a transport, optionally recording a replay log."""

    kind = "external"

    def __init__(self, transport, log: ReplayLog | None = None,
                 perceive_mode: bool = False):
        self.transport = transport
        self.log = log
        self.perceive_mode = perceive_mode

    def _exchange(self, agent, tick, mode, prompt) -> str:
        text = self.transport.request(
            {"agent": agent, "tick": tick, "mode": mode, "prompt": prompt})
        if self.log is not None:
            self.log.record(agent, tick, mode, prompt, text)
        return text

    def plan_steps(self, goal, memories, capabilities, *, agent=0, tick=0):
        prompt = plan_prompt(goal, memories, capabilities)
        return parse_steps(self._exchange(agent, tick, "plan", prompt))

    def perceive(self, prompt, *, agent=0, tick=0):
        if not self.perceive_mode:
            return None
        return self._exchange(agent, tick, "perceive", prompt)

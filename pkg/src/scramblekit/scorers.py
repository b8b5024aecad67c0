"""Masked-token scoring: the scorer contract, built-ins, and the remote client.

A scorer answers one question: given a token sequence with one masked
position and a list of candidate strings, what natural-log probability does
each candidate get at that position? Built-in scorers (uniform, unigram) are
context-free reference points and test oracles; RemoteScorer bridges to any
external process speaking the wire protocol, so real masked LMs plug in from
any ecosystem.

Wire protocol: UTF-8 JSON objects, one per LF-terminated line, over the
subprocess's stdio or a TCP stream. The scorer speaks first with
``{"protocol": "scramblekit-score", "version": 1}``. Then each request line
``{"id":..., "tokens":[...], "mask_index":..., "candidates":[...]}`` is
answered by one ``{"id":..., "logprobs":[...], "skipped":[...]?}`` line;
responses may arrive out of order (matched by id) and are pipelined. A
scorer that cannot represent a candidate as a single vocabulary unit lists
its index in ``skipped`` instead of approximating. Error replies are
``{"id":..., "error": "..."}``.
"""

from __future__ import annotations

import json
import math
import queue
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import ProtocolError, ScorerTimeout
from .resample import AtomTable

PROTOCOL_NAME = "scramblekit-score"
PROTOCOL_VERSION = 1


@dataclass(frozen=True)
class ScoreRequest:
    id: str
    tokens: tuple[str, ...]
    mask_index: int
    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        if not (0 <= self.mask_index < len(self.tokens)):
            raise ValueError(
                f"mask_index {self.mask_index} outside {len(self.tokens)} tokens"
            )
        if not self.candidates:
            raise ValueError("candidates must be non-empty")

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "tokens": list(self.tokens),
                "mask_index": self.mask_index,
                "candidates": list(self.candidates),
            },
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class ScoreResponse:
    id: str
    logprobs: tuple[float, ...]
    skipped: tuple[int, ...] = ()


class Scorer:
    """Base scorer: implement ``score``; ``score_many`` may be overridden."""

    def score(self, request: ScoreRequest) -> ScoreResponse:
        raise NotImplementedError

    def score_many(self, requests: Sequence[ScoreRequest]) -> list[ScoreResponse]:
        return [self.score(r) for r in requests]

    def close(self) -> None:
        pass

    def __enter__(self) -> "Scorer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class UniformScorer(Scorer):
    """Every candidate gets probability 1/vocab_size, context ignored."""

    def __init__(self, vocab_size: int):
        if vocab_size < 1:
            raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
        self.vocab_size = vocab_size
        self._logprob = -math.log(vocab_size)

    def score(self, request: ScoreRequest) -> ScoreResponse:
        return ScoreResponse(
            id=request.id, logprobs=(self._logprob,) * len(request.candidates)
        )


class UnigramScorer(Scorer):
    """Additively smoothed unigram probabilities from an atom table.

    With alpha = 0 an unseen candidate would get log 0; such candidates are
    reported as skipped (logprob slot holds a placeholder 0.0) to keep every
    returned logprob finite.
    """

    def __init__(self, table: AtomTable, alpha: float = 1.0):
        if not table.entries:
            raise ValueError("unigram scorer needs a non-empty table")
        if alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        self.counts = dict(table.entries)
        self.total = sum(self.counts.values())
        self.alpha = alpha
        self.vocab_size = len(self.counts)

    def score(self, request: ScoreRequest) -> ScoreResponse:
        denom = self.total + self.alpha * self.vocab_size
        logprobs = []
        skipped = []
        for i, cand in enumerate(request.candidates):
            num = self.counts.get(cand, 0) + self.alpha
            if num == 0:
                logprobs.append(0.0)
                skipped.append(i)
            else:
                logprobs.append(math.log(num / denom))
        return ScoreResponse(
            id=request.id, logprobs=tuple(logprobs), skipped=tuple(skipped)
        )


class _StdioTransport:
    """Line transport over a child process; a pump thread enables timeouts."""

    def __init__(self, cmd: str):
        self.proc = subprocess.Popen(
            shlex.split(cmd),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._pump = threading.Thread(target=self._read_loop, daemon=True)
        self._pump.start()

    def _read_loop(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def send(self, line: str) -> None:
        assert self.proc.stdin is not None
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"scorer process closed stdin: {exc}") from exc

    def recv(self, timeout: float) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise ScorerTimeout(f"no response within {timeout} s") from None
        if line is None:
            raise ProtocolError("scorer process closed its output stream")
        return line

    def close(self) -> None:
        if self.proc.stdin:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()


class _TcpTransport:
    def __init__(self, host: str, port: int, connect_timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=connect_timeout)
        self.file = self.sock.makefile("rw", encoding="utf-8", newline="\n")

    def send(self, line: str) -> None:
        try:
            self.file.write(line + "\n")
            self.file.flush()
        except OSError as exc:
            raise ProtocolError(f"scorer connection closed: {exc}") from exc

    def recv(self, timeout: float) -> str:
        self.sock.settimeout(timeout)
        try:
            line = self.file.readline()
        except socket.timeout:
            raise ScorerTimeout(f"no response within {timeout} s") from None
        if line == "":
            raise ProtocolError("scorer connection closed")
        return line

    def close(self) -> None:
        try:
            self.file.close()
        finally:
            self.sock.close()


class RemoteScorer(Scorer):
    """Client for an external scorer speaking the line protocol.

    Writes are serialized; many requests may be in flight (``score_many``
    pipelines a whole batch before reading). Responses are matched by id and
    validated against the originating request.
    """

    def __init__(self, transport, timeout: float = 30.0):
        self._transport = transport
        self.timeout = timeout
        self._lock = threading.Lock()
        self._check_handshake()

    @classmethod
    def spawn(cls, cmd: str, timeout: float = 30.0) -> "RemoteScorer":
        """Launch ``cmd`` as a child process and attach over its stdio."""
        return cls(_StdioTransport(cmd), timeout=timeout)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 30.0) -> "RemoteScorer":
        return cls(_TcpTransport(host, port), timeout=timeout)

    @classmethod
    def from_endpoint(cls, endpoint: str, timeout: float = 30.0) -> "RemoteScorer":
        """``HOST:PORT`` connects over TCP; anything else runs as a command."""
        host, sep, port = endpoint.rpartition(":")
        if sep and host and "/" not in host and " " not in endpoint and port.isdigit():
            return cls.connect(host, int(port), timeout=timeout)
        return cls.spawn(endpoint, timeout=timeout)

    def _check_handshake(self) -> None:
        line = self._transport.recv(self.timeout)
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"bad handshake line: {line!r}") from exc
        if obj.get("protocol") != PROTOCOL_NAME or obj.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(f"unsupported handshake: {obj!r}")

    def _parse_response(
        self, line: str, outstanding: dict[str, ScoreRequest]
    ) -> ScoreResponse:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"response is not valid JSON: {line!r}") from exc
        if not isinstance(obj, dict):
            raise ProtocolError(f"response is not an object: {line!r}")
        if "error" in obj:
            raise ProtocolError(f"scorer error: {obj['error']}")
        rid = obj.get("id")
        if rid not in outstanding:
            raise ProtocolError(f"response id {rid!r} matches no outstanding request")
        request = outstanding[rid]
        logprobs = obj.get("logprobs")
        if not isinstance(logprobs, list) or len(logprobs) != len(request.candidates):
            raise ProtocolError(
                f"request {rid!r}: expected {len(request.candidates)} logprobs, "
                f"got {logprobs!r}"
            )
        skipped_raw = obj.get("skipped", [])
        if not isinstance(skipped_raw, list) or not all(
            isinstance(i, int) and 0 <= i < len(request.candidates) for i in skipped_raw
        ):
            raise ProtocolError(f"request {rid!r}: bad skipped list {skipped_raw!r}")
        skipped = set(skipped_raw)
        values: list[float] = []
        for i, lp in enumerate(logprobs):
            if i in skipped:
                values.append(0.0)
                continue
            if not isinstance(lp, (int, float)) or not math.isfinite(lp):
                raise ProtocolError(f"request {rid!r}: non-finite logprob at index {i}")
            values.append(float(lp))
        return ScoreResponse(id=rid, logprobs=tuple(values), skipped=tuple(sorted(skipped)))

    def score(self, request: ScoreRequest) -> ScoreResponse:
        return self.score_many([request])[0]

    def score_many(self, requests: Sequence[ScoreRequest]) -> list[ScoreResponse]:
        if not requests:
            return []
        outstanding = {r.id: r for r in requests}
        if len(outstanding) != len(requests):
            raise ValueError("request ids must be unique within a batch")
        with self._lock:
            for r in requests:
                self._transport.send(r.to_json())
            responses: dict[str, ScoreResponse] = {}
            while len(responses) < len(requests):
                line = self._transport.recv(self.timeout)
                resp = self._parse_response(line, outstanding)
                if resp.id in responses:
                    raise ProtocolError(f"duplicate response for id {resp.id!r}")
                responses[resp.id] = resp
        return [responses[r.id] for r in requests]

    def close(self) -> None:
        self._transport.close()

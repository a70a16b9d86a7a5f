"""Uniform gateway to entailment scorers.

Given (premise, hypothesis) pairs the gateway returns three-way entailment
distributions, regardless of where the model runs. Three scorer handles are
provided: a deterministic in-process mock for tests, a child process speaking
line-delimited JSON over stdio, and an HTTP endpoint.

Wire protocol (stdio variant):
    handshake (backend -> gateway, once):  {"protocol": 1, "concurrent": <bool>}
    request   (gateway -> backend):        {"id": "...", "premise": "...", "hypothesis": "..."}
    response  (backend -> gateway):        {"id": "...", "entailment": x, "neutral": y, "contradiction": z}

The HTTP variant POSTs a JSON array of request objects to the configured
endpoint and expects a JSON array of response objects back.
"""

from __future__ import annotations

import json
import queue
import random
import subprocess
import threading
import time
from dataclasses import dataclass

import requests

PROTOCOL_VERSION = 1
SUM_TOLERANCE = 1e-6
RENORM_TOLERANCE = 1e-3
DEFAULT_BATCH_SIZE = 32
DEFAULT_RETRIES = 2
DEFAULT_BACKOFF = 0.2
DEFAULT_TIMEOUT = 60.0

RESPONSE_FIELDS = ("entailment", "neutral", "contradiction")


class BackendProtocolError(ValueError):
    """The backend replied with something outside the wire contract."""


class BackendTransportError(RuntimeError):
    """The backend could not be reached or died mid-conversation."""


@dataclass(frozen=True)
class PremiseHypothesisPair:
    tweet_id: str
    hypothesis_id: str
    premise: str
    hypothesis: str

    def __post_init__(self):
        if not self.premise or not self.premise.strip():
            raise ValueError(f"pair ({self.tweet_id}, {self.hypothesis_id}): empty premise")
        if not self.hypothesis or not self.hypothesis.strip():
            raise ValueError(f"pair ({self.tweet_id}, {self.hypothesis_id}): empty hypothesis")


@dataclass(frozen=True)
class EntailmentDistribution:
    p_entail: float
    p_neutral: float
    p_contra: float

    def __post_init__(self):
        for name, value in (
            ("p_entail", self.p_entail),
            ("p_neutral", self.p_neutral),
            ("p_contra", self.p_contra),
        ):
            if value < 0:
                raise BackendProtocolError(f"negative probability {name}={value}")
        total = self.p_entail + self.p_neutral + self.p_contra
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise BackendProtocolError(
                f"distribution sums to {total}, outside 1 +/- {SUM_TOLERANCE}"
            )


def admit_distribution(entail: float, neutral: float, contra: float) -> EntailmentDistribution:
    """Validate a raw backend output and admit it as a distribution.

    Negative components are rejected outright. A unit-sum deviation within
    1e-6 passes through untouched (so exact rule outputs stay exact); up to
    1e-3 the values are renormalized (float serialization noise); anything
    larger is treated as a broken backend.
    """
    for value in (entail, neutral, contra):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise BackendProtocolError(f"non-numeric probability {value!r}")
        if value < 0:
            raise BackendProtocolError(f"negative probability {value}")
    total = entail + neutral + contra
    deviation = abs(total - 1.0)
    if deviation <= SUM_TOLERANCE:
        return EntailmentDistribution(entail, neutral, contra)
    if deviation <= RENORM_TOLERANCE:
        return EntailmentDistribution(entail / total, neutral / total, contra / total)
    raise BackendProtocolError(
        f"distribution sums to {total}; deviation {deviation} exceeds {RENORM_TOLERANCE}"
    )


# ---------------------------------------------------------------------------
# Scorer handles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MockRule:
    """First-match rule: all present patterns must be substrings."""

    distribution: EntailmentDistribution
    premise_contains: str | None = None
    hypothesis_contains: str | None = None

    def matches(self, premise: str, hypothesis: str) -> bool:
        if self.premise_contains is not None and self.premise_contains not in premise:
            return False
        if self.hypothesis_contains is not None and self.hypothesis_contains not in hypothesis:
            return False
        return True


class MockScorer:
    """Deterministic rule-table scorer for tests and demos."""

    concurrent = True

    def __init__(self, rules: list[MockRule], default: EntailmentDistribution):
        self.rules = list(rules)
        self.default = default

    def score_raw(self, reqs: list[dict]) -> list[dict]:
        out = []
        for req in reqs:
            dist = self.default
            for rule in self.rules:
                if rule.matches(req["premise"], req["hypothesis"]):
                    dist = rule.distribution
                    break
            out.append(
                {
                    "id": req["id"],
                    "entailment": dist.p_entail,
                    "neutral": dist.p_neutral,
                    "contradiction": dist.p_contra,
                }
            )
        return out

    def close(self):
        pass


def make_mock_scorer(
    rules: list[MockRule] | None = None,
    default: EntailmentDistribution | None = None,
) -> MockScorer:
    """Build a mock scorer; rule distributions are validated up front."""
    if default is None:
        default = EntailmentDistribution(0.0, 1.0, 0.0)
    return MockScorer(rules or [], default)


def _dist_from_record(record: dict) -> EntailmentDistribution:
    missing = [f for f in RESPONSE_FIELDS if f not in record]
    if missing:
        raise BackendProtocolError(f"rule missing field(s): {', '.join(missing)}")
    return admit_distribution(
        record["entailment"], record["neutral"], record["contradiction"]
    )


def load_mock_rules(path) -> MockScorer:
    """Load a mock scorer from a JSON rules file.

    Format: {"default": {"entailment": ..., "neutral": ..., "contradiction": ...},
             "rules": [{"premise_contains": ..., "hypothesis_contains": ...,
                        "entailment": ..., ...}, ...]}
    """
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    default = _dist_from_record(spec.get("default", {"entailment": 0, "neutral": 1, "contradiction": 0}))
    rules = [
        MockRule(
            distribution=_dist_from_record(entry),
            premise_contains=entry.get("premise_contains"),
            hypothesis_contains=entry.get("hypothesis_contains"),
        )
        for entry in spec.get("rules", [])
    ]
    return MockScorer(rules, default)


class ProcessScorer:
    """Child process speaking the line-delimited JSON protocol over stdio."""

    def __init__(self, cmd: list[str], timeout: float = DEFAULT_TIMEOUT):
        self.cmd = list(cmd)
        self.timeout = timeout
        self.concurrent = False
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue | None = None

    @staticmethod
    def _pump(stream, lines: queue.Queue):
        # Blocking reads happen here; the consumer side gets timeouts.
        for line in stream:
            lines.put(line)
        lines.put(None)

    def _ensure_started(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        try:
            self._proc = subprocess.Popen(
                self.cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendTransportError(f"cannot start backend {self.cmd}: {exc}") from exc
        self._lines = queue.Queue()
        threading.Thread(
            target=self._pump, args=(self._proc.stdout, self._lines), daemon=True
        ).start()
        handshake = self._read_line()
        try:
            head = json.loads(handshake)
        except json.JSONDecodeError as exc:
            raise BackendProtocolError(f"invalid handshake line: {handshake!r}") from exc
        if head.get("protocol") != PROTOCOL_VERSION:
            raise BackendProtocolError(
                f"unsupported protocol version {head.get('protocol')!r}"
            )
        self.concurrent = bool(head.get("concurrent", False))

    def _read_line(self) -> str:
        assert self._lines is not None
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise BackendTransportError(f"backend timed out after {self.timeout}s") from None
        if line is None:
            raise BackendTransportError("backend closed its output stream")
        return line

    def score_raw(self, reqs: list[dict]) -> list[dict]:
        self._ensure_started()
        proc = self._proc
        assert proc is not None and proc.stdin is not None
        try:
            for req in reqs:
                proc.stdin.write(json.dumps(req, ensure_ascii=False) + "\n")
            proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise BackendTransportError(f"cannot write to backend: {exc}") from exc
        responses = []
        for _ in reqs:
            line = self._read_line()
            try:
                responses.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise BackendProtocolError(f"invalid response line: {line!r}") from exc
        return responses

    def restart(self):
        self.close()

    def close(self):
        if self._proc is not None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.terminate()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
            self._proc = None


class HttpScorer:
    """POSTs request batches as JSON arrays to a configured endpoint."""

    concurrent = True

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.timeout = timeout
        self._session = requests.Session()

    def score_raw(self, reqs: list[dict]) -> list[dict]:
        try:
            resp = self._session.post(self.url, json=reqs, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendTransportError(f"POST {self.url} failed: {exc}") from exc
        if resp.status_code != 200:
            raise BackendTransportError(f"POST {self.url} returned {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise BackendProtocolError(f"non-JSON response from {self.url}") from exc
        if not isinstance(payload, list):
            raise BackendProtocolError("HTTP backend must return a JSON array")
        return payload

    def restart(self):
        pass

    def close(self):
        self._session.close()


# ---------------------------------------------------------------------------
# Batch scoring
# ---------------------------------------------------------------------------

def _validate_response(record) -> tuple[str, EntailmentDistribution]:
    if not isinstance(record, dict):
        raise BackendProtocolError(f"response is not an object: {record!r}")
    if "id" not in record:
        raise BackendProtocolError(f"response missing id: {record!r}")
    if record.get("error"):
        raise BackendProtocolError(f"backend error for id {record['id']!r}: {record['error']}")
    missing = [f for f in RESPONSE_FIELDS if f not in record]
    if missing:
        raise BackendProtocolError(
            f"response {record['id']!r} missing field(s): {', '.join(missing)}"
        )
    dist = admit_distribution(
        record["entailment"], record["neutral"], record["contradiction"]
    )
    return str(record["id"]), dist


def score_batch(
    pairs: list[PremiseHypothesisPair],
    backend,
    batch_size: int = DEFAULT_BATCH_SIZE,
    retries: int = DEFAULT_RETRIES,
    backoff: float = DEFAULT_BACKOFF,
) -> list[EntailmentDistribution]:
    """Score every pair, returning one admitted distribution per pair in order.

    Transport failures are retried (after restarting a process backend);
    protocol violations are not retried, they indicate a broken backend.
    """
    results: list[EntailmentDistribution] = []
    for start in range(0, len(pairs), batch_size):
        chunk = pairs[start : start + batch_size]
        reqs = [
            {"id": str(start + i), "premise": p.premise, "hypothesis": p.hypothesis}
            for i, p in enumerate(chunk)
        ]
        attempt = 0
        while True:
            try:
                raw = backend.score_raw(reqs)
                break
            except BackendTransportError:
                if attempt >= retries:
                    raise
                attempt += 1
                time.sleep(backoff * (2 ** (attempt - 1)))
                if hasattr(backend, "restart"):
                    backend.restart()
        if len(raw) != len(reqs):
            raise BackendProtocolError(
                f"expected {len(reqs)} responses, got {len(raw)}"
            )
        by_id: dict[str, EntailmentDistribution] = {}
        for record in raw:
            rid, dist = _validate_response(record)
            if rid in by_id:
                raise BackendProtocolError(f"duplicate response id {rid!r}")
            by_id[rid] = dist
        for req in reqs:
            if req["id"] not in by_id:
                raise BackendProtocolError(f"no response for request id {req['id']!r}")
            results.append(by_id[req["id"]])
    return results


def fuzz_backend(backend, n: int = 1000, seed: int = 0, batch_size: int = 25) -> list[str]:
    """Conformance fuzz: n random requests, every response must be admissible.

    Returns a list of violation descriptions; an empty list means the backend
    passes. Intended for wire-protocol backends before first use.
    """
    rng = random.Random(seed)
    words = (
        "vrouw man moeder vader jongen meisje werk gezin zorg school land "
        "partij kamer debat motie wet begroting jeugd onderwijs arbeid thuis"
    ).split()
    violations: list[str] = []
    done = 0
    while done < n:
        size = min(batch_size, n - done)
        pairs = []
        for i in range(size):
            premise = " ".join(rng.choice(words) for _ in range(rng.randint(1, 20)))
            hypothesis = " ".join(rng.choice(words) for _ in range(rng.randint(1, 12)))
            pairs.append(
                PremiseHypothesisPair(
                    tweet_id=f"fuzz{done + i}",
                    hypothesis_id="h",
                    premise=premise,
                    hypothesis=hypothesis,
                )
            )
        try:
            dists = score_batch(pairs, backend, batch_size=batch_size)
        except (BackendProtocolError, BackendTransportError) as exc:
            violations.append(f"batch at {done}: {exc}")
            return violations
        for i, dist in enumerate(dists):
            total = dist.p_entail + dist.p_neutral + dist.p_contra
            if abs(total - 1.0) > SUM_TOLERANCE:
                violations.append(f"request {done + i}: sum {total}")
        done += size
    return violations

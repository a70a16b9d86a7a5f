"""Wire-protocol server loop.

Emits the handshake, then answers every request line with a response line.
Malformed input yields an error response and the loop keeps serving; only
a model-load failure terminates the process (non-zero exit, diagnostic on
stderr, handled by the entry point).
"""

from __future__ import annotations

import json
import sys

from .config import BackendConfig
from .models import load_model

PROTOCOL_VERSION = 1


def _error_response(request_id, message: str) -> dict:
    return {"id": request_id, "error": message}


def handle_line(line: str, model, mapping: dict[str, int]) -> dict:
    """One request line -> one response dict (never raises on bad input)."""
    try:
        request = json.loads(line)
    except json.JSONDecodeError:
        return _error_response(None, "invalid JSON")
    if not isinstance(request, dict):
        return _error_response(None, "request must be a JSON object")
    request_id = request.get("id")
    premise = request.get("premise")
    hypothesis = request.get("hypothesis")
    if not isinstance(premise, str) or not isinstance(hypothesis, str):
        return _error_response(request_id, "missing premise or hypothesis")
    raw = model.predict(premise, hypothesis)
    return {
        "id": request_id,
        "entailment": raw[mapping["entailment"]],
        "neutral": raw[mapping["neutral"]],
        "contradiction": raw[mapping["contradiction"]],
    }


def serve(config: BackendConfig, stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    model = load_model(config)

    print(
        json.dumps({"protocol": PROTOCOL_VERSION, "concurrent": False}),
        file=stdout,
        flush=True,
    )
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = handle_line(line, model, config.label_mapping)
        print(json.dumps(response, ensure_ascii=False), file=stdout, flush=True)

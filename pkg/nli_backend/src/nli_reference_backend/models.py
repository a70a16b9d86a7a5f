"""Scoring models behind the protocol server.

``OverlapModel`` is a deterministic, dependency-free scorer for tests and
offline runs: token overlap drives the entailment logit and a negation
mismatch drives the contradiction logit. ``TransformersModel`` wraps any
sequence-classification checkpoint (loaded lazily so the package works
without torch installed).
"""

from __future__ import annotations

import math
import re

from .config import BackendConfig

TOKEN_RE = re.compile(r"\w+", re.UNICODE)
NEGATIONS = frozenset({"niet", "geen", "nooit", "niemand", "nergens", "zonder"})


def _tokens(text: str) -> set[str]:
    return set(TOKEN_RE.findall(text.lower()))


def _softmax(logits: list[float]) -> list[float]:
    peak = max(logits)
    exps = [math.exp(x - peak) for x in logits]
    total = sum(exps)
    return [x / total for x in exps]


class OverlapModel:
    """Lexical-overlap heuristic emitting (entailment, neutral, contradiction)."""

    output_order = ("entailment", "neutral", "contradiction")

    def predict(self, premise: str, hypothesis: str) -> list[float]:
        p_tokens = _tokens(premise)
        h_tokens = _tokens(hypothesis)
        overlap = len(p_tokens & h_tokens) / len(h_tokens) if h_tokens else 0.0
        negation_mismatch = bool(p_tokens & NEGATIONS) != bool(h_tokens & NEGATIONS)
        entail_logit = 3.0 * overlap - 1.5
        contra_logit = 0.75 if negation_mismatch else -0.75
        probs = _softmax([entail_logit, 0.0, contra_logit])
        total = sum(probs)
        return [p / total for p in probs]


class TransformersModel:
    """Pretrained sequence-classification checkpoint via transformers."""

    def __init__(self, config: BackendConfig):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise RuntimeError(
                "transformers/torch are not installed; install the 'model' extra "
                "or use --model overlap"
            ) from exc
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSequenceClassification.from_pretrained(config.model)
        self.model.to(config.device)
        self.model.eval()
        self.device = config.device

    def predict(self, premise: str, hypothesis: str) -> list[float]:
        torch = self._torch
        with torch.no_grad():
            encoded = self.tokenizer(
                premise, hypothesis, return_tensors="pt", truncation=True, max_length=512
            ).to(self.device)
            logits = self.model(**encoded).logits[0]
            probs = torch.softmax(logits, dim=-1)
        values = [float(v) for v in probs]
        total = sum(values)
        return [v / total for v in values]


def load_model(config: BackendConfig):
    if config.model == "overlap":
        return OverlapModel()
    return TransformersModel(config)

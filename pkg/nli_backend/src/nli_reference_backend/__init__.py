"""Reference entailment scorer for the stancekit gateway.

Speaks the line-delimited JSON wire protocol on stdio: one handshake line,
then one response per request. Scoring runs either on a pretrained
sequence-classification model (``--model <huggingface id or path>``,
requires the ``model`` extra) or on a built-in deterministic lexical
scorer (``--model overlap``) that needs no weights.
"""

__version__ = "0.1.0"

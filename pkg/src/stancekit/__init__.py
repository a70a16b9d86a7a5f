"""stancekit: zero-shot stance detection through textual entailment.

Texts are scored against stance hypotheses (a single target statement or a
bank of survey items) by a pluggable NLI backend; per-hypothesis entailment
distributions are mapped through hypothesis polarity into stance space,
averaged, and evaluated at tweet level (top-k precision against gold
labels) and group level (rank correlation against panel scores).
"""

__version__ = "0.1.0"

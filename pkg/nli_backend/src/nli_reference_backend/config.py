"""Backend configuration, including the output-index mapping.

Sequence-classification checkpoints disagree on which logit index means
entailment; a silently wrong mapping would invert stances downstream, so
the mapping is explicit config and validated as a permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

OUTCOMES = ("entailment", "neutral", "contradiction")


class BackendConfigError(ValueError):
    pass


@dataclass
class BackendConfig:
    model: str = "overlap"
    device: str = "cpu"
    batch_size: int = 16
    # outcome -> index of that outcome in the model's output vector
    label_mapping: dict[str, int] = field(
        default_factory=lambda: {"entailment": 0, "neutral": 1, "contradiction": 2}
    )

    def __post_init__(self):
        if set(self.label_mapping) != set(OUTCOMES):
            raise BackendConfigError(
                f"label mapping must cover exactly {OUTCOMES}, got {sorted(self.label_mapping)}"
            )
        if sorted(self.label_mapping.values()) != [0, 1, 2]:
            raise BackendConfigError(
                f"label mapping must be a permutation of indices 0..2, got {self.label_mapping}"
            )
        if self.batch_size <= 0:
            raise BackendConfigError(f"batch size must be positive, got {self.batch_size}")


def parse_label_mapping(spec: str) -> dict[str, int]:
    """Parse "entailment=0,neutral=1,contradiction=2" into a mapping."""
    mapping = {}
    for part in spec.split(","):
        name, _, index = part.partition("=")
        name = name.strip()
        if name not in OUTCOMES:
            raise BackendConfigError(f"unknown outcome {name!r} in label mapping")
        try:
            mapping[name] = int(index)
        except ValueError:
            raise BackendConfigError(f"non-integer index {index!r} for {name!r}") from None
    return mapping

"""Term extraction shared by indexing, queries, and vocabulary building.

Morphological analysis is out of scope: transcript text is either split on
whitespace (optionally lowercased, with stopword filtering) or taken as
already analyzed ("pre" mode, whitespace split only).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = False
    stopwords: frozenset[str] = field(default_factory=frozenset)
    mode: str = "whitespace"  # "whitespace" or "pre"

    def __post_init__(self) -> None:
        if self.mode not in ("whitespace", "pre"):
            raise ValueError(f"unknown tokenizer mode {self.mode!r}")
        # Accept any iterable of terms for convenience.
        if not isinstance(self.stopwords, frozenset):
            object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "stopwords": sorted(self.stopwords),
            "mode": self.mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TokenizerConfig":
        return cls(
            lowercase=d["lowercase"],
            stopwords=frozenset(d["stopwords"]),
            mode=d["mode"],
        )


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Split text into index terms. Deterministic for a given config."""
    config = config if config is not None else TokenizerConfig()
    terms = text.split()
    if config.mode == "pre":
        return terms
    if config.lowercase:
        terms = [t.lower() for t in terms]
    if config.stopwords:
        terms = [t for t in terms if t not in config.stopwords]
    return terms

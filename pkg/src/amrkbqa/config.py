"""Pipeline configuration and bundled resource resolution.

Configuration is a flat JSON file; every field has a default and the
bundled fixture resources are used when no path is given. The environment
variable ``AMRKBQA_CONFIG`` overrides the config path when set.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

__all__ = ["PipelineConfig", "bundled_path", "load_config", "CONFIG_ENV_VAR"]

CONFIG_ENV_VAR = "AMRKBQA_CONFIG"


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(resources.files("amrkbqa").joinpath("data", name))


@dataclass
class PipelineConfig:
    # relation-score aggregation weights: alignment, neural, lexical, kb boost
    weights: tuple[float, float, float, float] = (0.4, 0.0, 0.3, 0.3)
    entity_match_threshold: float = 0.8
    beam: int = 4  # candidates per bucket entering hypothesis enumeration
    top_k: int = 5  # hypotheses handed to the reasoner
    bucket_size: int = 10
    holonym_depth: int = 4
    holonym_relations: list[tuple[str, str]] = field(
        default_factory=lambda: [
            ("dbo:isPartOf", "forward"),
            ("dbo:country", "forward"),
            ("dbo:federalState", "forward"),
            ("dbo:hasPart", "inverse"),
        ]
    )
    exclusive_container_types: list[str] = field(default_factory=lambda: ["dbo:Country"])
    closed_world_output: bool = False  # report an undecided ASK as "false"
    prefixes_path: str | None = None
    entity_lexicon_path: str | None = None
    type_lexicon_path: str | None = None
    alignment_path: str | None = None
    attribute_lexicon_path: str | None = None
    kb_path: str | None = None

    def resolve(self, name: str, bundled: str) -> Path:
        value = getattr(self, name)
        return Path(value) if value else bundled_path(bundled)


def load_config(path: str | os.PathLike | None = None) -> PipelineConfig:
    """Load configuration from ``path``, the ``AMRKBQA_CONFIG`` environment
    variable, or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    config = PipelineConfig()
    if path is None:
        return config
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
    for key, value in data.items():
        if key == "weights":
            value = tuple(float(v) for v in value)
        elif key == "holonym_relations":
            value = [(str(p), str(d)) for p, d in value]
        setattr(config, key, value)
    return config

"""Rule templates keyed by sample compiler logs, and cosine retrieval."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .embed import HashedTfidf, normalize

SECTIONS = ("SAMPLE_LOG", "RULE", "BEFORE", "AFTER")
DEFAULT_RULES = Path(__file__).parent / "rules"


class EmptyLibrary(ValueError):
    pass


class RuleFormatError(ValueError):
    pass


@dataclass
class RuleTemplate:
    id: str
    sample_log: str
    rule: str
    before: str
    after: str
    raw: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def vector(self) -> np.ndarray:
        return normalize(self.raw)


def parse_rule(text: str) -> RuleTemplate:
    m = re.match(r"\s*ID:\s*(\S+)\s*\n", text)
    if not m:
        raise RuleFormatError("rule file must start with 'ID: <id>'")
    parts = re.split(r"^### (\w+)\s*$", text[m.end():], flags=re.M)
    sections = {parts[i]: parts[i + 1].strip("\n") for i in range(1, len(parts) - 1, 2)}
    missing = [s for s in SECTIONS if not sections.get(s, "").strip()]
    if missing:
        raise RuleFormatError(f"rule {m.group(1)}: missing or empty section(s) {', '.join(missing)}")
    return RuleTemplate(m.group(1), sections["SAMPLE_LOG"].strip(), sections["RULE"].strip(),
                        sections["BEFORE"], sections["AFTER"])


@dataclass
class RuleLibrary:
    templates: list
    embedder: HashedTfidf

    def __post_init__(self):
        if not self.templates:
            raise EmptyLibrary("rule library is empty")
        ids = [t.id for t in self.templates]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate rule ids")
        self.templates = sorted(self.templates, key=lambda t: t.id)
        for t in self.templates:
            if t.raw is None:
                t.raw = self.embedder.raw(t.sample_log)

    @classmethod
    def from_templates(cls, templates, dim: int = 256) -> "RuleLibrary":
        templates = list(templates)
        emb = HashedTfidf(dim).fit(t.sample_log for t in templates)
        return cls(templates, emb)

    @classmethod
    def load(cls, directory=None, dim: int = 256) -> "RuleLibrary":
        d = Path(directory) if directory else DEFAULT_RULES
        files = sorted(d.glob("*.rule"))
        return cls.from_templates([parse_rule(f.read_text()) for f in files], dim)

    def get(self, rule_id: str) -> RuleTemplate:
        for t in self.templates:
            if t.id == rule_id:
                return t
        raise KeyError(rule_id)

    def similarities(self, text: str) -> list:
        q = self.embedder.embed(text)
        return [float(np.dot(q, t.vector)) for t in self.templates]


def retrieve(error_log: str, lib: RuleLibrary):
    """Best template for ``error_log`` and its cosine similarity. Ties go to
    the lowest id."""
    if lib is None or not lib.templates:
        raise EmptyLibrary("rule library is empty")
    sims = lib.similarities(error_log)
    best = max(range(len(sims)), key=lambda i: (sims[i], -i))
    return lib.templates[best], sims[best]

"""Bundled MiniC programs: planted discrepancies, directive-free neutral
kernels and hardware-incompatible harnesses.

Program metadata sits in ``//!`` comment lines::

    //! planted: Overflow
    //! scenario: free text used in LLM prompts
    //! seed: 1 1 7 5          (repeatable; wire format)
    //! range: a 0 200         (element bounds of entry parameter a)
    //! length: a 1 16         (length bounds of entry parameter a)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

ROOT = Path(__file__).parent


@dataclass
class ProgramMeta:
    planted: Optional[str] = None
    scenario: Optional[str] = None
    seeds: list = field(default_factory=list)
    overrides: dict = field(default_factory=dict)


def _num(tok: str):
    return float(tok) if any(c in tok for c in ".eE") else int(tok)


def parse_meta(source: str) -> ProgramMeta:
    meta = ProgramMeta()
    for line in source.splitlines():
        line = line.strip()
        if not line.startswith("//!"):
            continue
        key, _, value = line[3:].partition(":")
        key, value = key.strip(), value.strip()
        if key == "planted":
            meta.planted = value
        elif key == "scenario":
            meta.scenario = value
        elif key == "seed":
            meta.seeds.append(value)
        elif key == "range":
            name, lo, hi = value.split()
            meta.overrides.setdefault(name, {}).update(lo=_num(lo), hi=_num(hi))
        elif key == "length":
            name, lo, hi = value.split()
            meta.overrides.setdefault(name, {}).update(min_len=int(lo), max_len=int(hi))
        else:
            raise ValueError(f"unknown metadata key {key!r}")
    return meta


def _files(sub: str) -> list:
    return sorted((ROOT / sub).glob("*.mc"))


def planted_programs() -> list:
    return _files("planted")


def neutral_programs() -> list:
    return _files("neutral")


def harness_programs() -> list:
    return _files("harness")

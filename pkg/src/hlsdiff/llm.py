"""LLM client abstraction: a remote chat-completions client, a canned-response
mock, and a deterministic responder that stands in for a model."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import urllib.error
import urllib.request
from pathlib import Path
from typing import Optional, Protocol

log = logging.getLogger(__name__)


class ClientError(RuntimeError):
    pass


class LLMClient(Protocol):
    def complete(self, prompt: str, params: Optional[dict] = None) -> str: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


class MockClient:
    """Serves ``<dir>/<prompt hash>.txt``; unknown prompts go to ``fallback``
    (or yield an empty response)."""

    def __init__(self, directory=None, fallback: Optional[LLMClient] = None):
        self.directory = Path(directory) if directory else None
        self.fallback = fallback
        self.calls = 0

    def complete(self, prompt: str, params: Optional[dict] = None) -> str:
        self.calls += 1
        if self.directory is not None:
            f = self.directory / f"{prompt_hash(prompt)}.txt"
            if f.is_file():
                return f.read_text()
        if self.fallback is not None:
            return self.fallback.complete(prompt, params)
        return ""


class RemoteClient:
    """Chat-completions style HTTP client.

    Configured from ``HLSDIFF_LLM_URL``, ``HLSDIFF_LLM_MODEL`` and
    ``HLSDIFF_LLM_KEY``.
    """

    def __init__(self, url: str, model: str, key: str = "", temperature: float = 0.2, timeout: float = 60.0):
        self.url = url
        self.model = model
        self.key = key
        self.temperature = temperature
        self.timeout = timeout

    @classmethod
    def from_env(cls, temperature: float = 0.2, model: Optional[str] = None) -> "RemoteClient":
        url = os.environ.get("HLSDIFF_LLM_URL")
        if not url:
            raise ClientError("HLSDIFF_LLM_URL is not set")
        return cls(url, model or os.environ.get("HLSDIFF_LLM_MODEL", "gpt-4o"),
                   os.environ.get("HLSDIFF_LLM_KEY", ""), temperature)

    def complete(self, prompt: str, params: Optional[dict] = None) -> str:
        params = params or {}
        body = {
            "model": params.get("model", self.model),
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.get("temperature", self.temperature),
        }
        req = urllib.request.Request(self.url, data=json.dumps(body).encode(), method="POST",
                                     headers={"Content-Type": "application/json",
                                              "Authorization": f"Bearer {self.key}"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                data = json.loads(resp.read().decode())
            return data["choices"][0]["message"]["content"]
        except (urllib.error.URLError, OSError, ValueError, KeyError, IndexError, TypeError) as e:
            raise ClientError(f"remote completion failed: {e}") from e


# ------------------------------------------------------------ deterministic mock

_ENTRY = re.compile(r"^entry (\d+): (\S+) : (scalar|1-D array of|2-D matrix of) (.+?), (.*)$")
_LEN = re.compile(r"(?:length|rows) (\d+)\.\.(\d+)")
_COLS = re.compile(r"columns (\d+)\.\.(\d+)")
_VALS = re.compile(r"values in \[(\S+), (\S+)\]")
_WIDTH = re.compile(r"@width\((\S+), (\d+), (signed|unsigned)\)")
_FIXED = re.compile(r"@fixed\((\S+), (\d+), (\d+)")
_STATIC = re.compile(r"@static_array\((\S+), (\d+)\)")
_DEPTH = re.compile(r"@(?:dataflow|stack_limit)\((\S+), (\d+)\)")
_COUNT = re.compile(r"Generate exactly (\d+) test inputs")
_FEED = re.compile(r"^(\w+) (\S+) (\S+) (\S+)$")


def _num(tok: str):
    return float(tok) if any(c in tok for c in ".eE") else int(tok)


class HeuristicResponder:
    """Rule-based stand-in for a model.

    Analysis stages get a short deterministic summary. The input stage is
    answered with boundary-seeking inputs: values around the powers of two
    implied by width directives, lengths around static capacities and
    directive depths, and the extremes of the feedback ranges. Every answer
    is seeded by the prompt text, so equal prompts give equal responses.
    """

    def complete(self, prompt: str, params: Optional[dict] = None) -> str:
        m = _COUNT.search(prompt)
        if not m:
            return self._analysis(prompt)
        return self._inputs(prompt, int(m.group(1)))

    @staticmethod
    def _analysis(prompt: str) -> str:
        dirs = sorted(set(re.findall(r"@\w+\([^)]*\)", prompt)))
        loops = len(re.findall(r"\b(?:for|while)\b", prompt))
        lines = [f"The program has {loops} loop(s)."]
        if dirs:
            lines.append("Directives to examine: " + " ".join(dirs))
        else:
            lines.append("No directives present.")
        lines.append("Extreme values, lengths near capacities and reordered data are the likely discrepancy points.")
        return "\n".join(lines)

    def _inputs(self, prompt: str, k: int) -> str:
        rng = random.Random(int(prompt_hash(prompt), 16))
        slots = []
        for line in prompt.splitlines():
            m = _ENTRY.match(line.strip())
            if not m:
                continue
            rest = m.group(5)
            ln = _LEN.search(rest)
            cols = _COLS.search(rest)
            vals = _VALS.search(rest)
            slots.append({
                "kind": m.group(3),
                "float": "float" in m.group(4) or "fixed" in m.group(4),
                "len": (int(ln.group(1)), int(ln.group(2))) if ln else (1, 1),
                "cols": (int(cols.group(1)), int(cols.group(2))) if cols else (1, 1),
                "vals": (_num(vals.group(1)), _num(vals.group(2))) if vals else (-100, 100),
            })
        if not slots:
            return "```\n```"
        magnitudes = {0, 1, 2, 7, 8}
        for w in _WIDTH.finditer(prompt):
            b = int(w.group(2))
            magnitudes |= {(1 << b) - 1, 1 << b, (1 << (b - 1)) - 1, 1 << (b - 1), ((1 << b) // 4) + 1}
        for f in _FIXED.finditer(prompt):
            i = int(f.group(3))
            magnitudes |= {1 << max(i - 1, 0), 1 << i, (1 << i) - 1}
        lengths = set()
        for s in _STATIC.finditer(prompt):
            n = int(s.group(2))
            lengths |= {n - 1, n, n + 1, n + 2}
            magnitudes |= {n, n + 1, n + 2}
        for d in _DEPTH.finditer(prompt):
            n = int(d.group(2))
            lengths |= {n + 1, n + 2, 2 * n}
            magnitudes |= {n + 1, n + 2, 2 * n, 3 * n}
        for line in prompt.splitlines():
            f = _FEED.match(line.strip())
            if f and f.group(1) in ("int", "uint", "float"):
                try:
                    lo, hi = _num(f.group(3)), _num(f.group(4))
                except ValueError:
                    continue
                magnitudes |= {abs(lo), abs(hi), 2 * abs(hi)}
        mags = sorted(int(x) for x in magnitudes if abs(x) < 1 << 62)

        def value(s):
            lo, hi = s["vals"]
            x = rng.choice(mags) * (-1 if rng.random() < 0.2 else 1)
            x = min(max(x, lo), hi)
            return float(x) + 0.5 if s["float"] and rng.random() < 0.5 and x + 0.5 <= hi else x

        def length(s, lim):
            lo, hi = lim
            pool = [n for n in lengths if lo <= n <= hi] + [lo, hi, rng.randint(lo, hi)]
            return rng.choice(pool)

        out = []
        for _ in range(k):
            parts = []
            for s in slots:
                if s["kind"] == "scalar":
                    parts.append(str(value(s)))
                elif s["kind"] == "1-D array of":
                    parts.append(" ".join(str(value(s)) for _ in range(length(s, s["len"]))))
                else:
                    r, c = length(s, s["len"]), length(s, s["cols"])
                    parts.append(" ; ".join(" ".join(str(value(s)) for _ in range(c)) for _ in range(r)))
            out.append(" | ".join(parts))
        return "```\n" + "\n".join(out) + "\n```"


def extract_fenced(text: str) -> Optional[str]:
    """Body of the first triple-backtick block, without a language tag."""
    m = re.search(r"```[^\n]*\n(.*?)```", text, re.S)
    return m.group(1) if m else None

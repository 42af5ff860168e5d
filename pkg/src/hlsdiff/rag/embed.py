"""Deterministic text embedder: hashed TF-IDF over lowercase alphanumeric tokens."""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter

import numpy as np

TOKEN = re.compile(r"[a-z0-9]+")
DEFAULT_DIM = 256


class EmptyText(ValueError):
    pass


def tokens(text: str) -> list:
    return TOKEN.findall(text.lower())


def bucket(token: str, dim: int = DEFAULT_DIM) -> int:
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(h, "big") % dim


class HashedTfidf:
    """Term frequency times smoothed inverse document frequency, hashed into
    ``dim`` buckets. Unfitted, every token weighs 1."""

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim
        self.idf: dict = {}
        self.default_idf = 1.0

    def fit(self, docs) -> "HashedTfidf":
        docs = list(docs)
        n = len(docs)
        df = Counter()
        for d in docs:
            df.update(set(tokens(d)))
        self.idf = {t: math.log((1 + n) / (1 + c)) + 1.0 for t, c in df.items()}
        self.default_idf = math.log(1 + n) + 1.0
        return self

    def raw(self, text: str) -> np.ndarray:
        toks = tokens(text)
        if not toks:
            raise EmptyText("text has no alphanumeric tokens")
        v = np.zeros(self.dim)
        for t, c in Counter(toks).items():
            v[bucket(t, self.dim)] += c * self.idf.get(t, self.default_idf)
        return v

    def embed(self, text: str) -> np.ndarray:
        return normalize(self.raw(text))


def normalize(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise EmptyText("zero vector")
    return v / n


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(normalize(a), normalize(b)))

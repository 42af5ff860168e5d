"""Retrieval-augmented repair of hardware-incompatible harnesses."""

from .embed import EmptyText, HashedTfidf, cosine
from .library import EmptyLibrary, RuleLibrary, RuleTemplate, parse_rule, retrieve
from .repair import InvalidCounts, RepairOutcome, RuleApplyingClient, pass_rate, repair_loop

__all__ = ["EmptyText", "HashedTfidf", "cosine", "EmptyLibrary", "RuleLibrary", "RuleTemplate",
           "parse_rule", "retrieve", "InvalidCounts", "RepairOutcome", "RuleApplyingClient", "pass_rate", "repair_loop"]

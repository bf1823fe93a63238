"""Result containers shared by the verification sweeps."""

import math
from dataclasses import dataclass

from .base_combinatorics import IntVec, SubsetJ


def _plain(v):
    if isinstance(v, SubsetJ):
        return sorted(v.members())
    if isinstance(v, IntVec):
        return list(v.entries)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, float) and math.isinf(v):
        return None  # knowledge floor beyond the truncation: unbounded
    return v


def witness(**kw):
    """Counterexample payload with JSON-friendly values."""
    return {k: _plain(v) for k, v in kw.items()}


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int = 0
    counterexample: dict | None = None
    info: dict | None = None

    def as_dict(self):
        d = {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "checked": self.checked,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.info:
            d.update(self.info)
        return d


class Sweep:
    """Counts tuples and records the first counterexample."""

    def __init__(self, name):
        self.name = name
        self.checked = 0
        self.failure = None

    def check(self, ok, **ctx):
        self.checked += 1
        if not ok and self.failure is None:
            self.failure = witness(**ctx)
        return ok

    def result(self, info=None):
        return CheckResult(self.name, self.failure is None, self.checked, self.failure, info)


def combine(name, results):
    """Collapse sub-results into one row; first failure wins, counts add."""
    checked = sum(r.checked for r in results)
    for r in results:
        if not r.passed:
            return CheckResult(name, False, checked, r.counterexample, {"failed_sub": r.name})
    return CheckResult(name, True, checked)

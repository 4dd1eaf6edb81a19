"""Verdict records produced by the various checkers."""

from __future__ import annotations

from dataclasses import dataclass, field

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass
class CheckReport:
    """Outcome of a numerical condition check.

    verdict is one of "holds", "fails", "inconclusive".  witnesses is a list
    of (point, margin) pairs; for a failing verdict at least one margin is
    negative beyond the corresponding tolerance.  zero_set lists approximate
    roots relevant to the condition (e.g. points where A(t) vanishes).
    """

    verdict: str
    witnesses: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    zero_set: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [[float(t), float(m)] for t, m in self.witnesses],
            "tolerances": {k: float(v) for k, v in self.tolerances.items()},
            "zero_set": [float(t) for t in self.zero_set],
            "detail": {k: (float(v) if isinstance(v, (int, float))
                           and not isinstance(v, bool) else v)
                       for k, v in self.detail.items()},
        }

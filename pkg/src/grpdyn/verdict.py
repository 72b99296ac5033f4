"""Three-valued answers with witnesses."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

HOLDS = "Holds"
FAILS = "Fails"
UNKNOWN = "Unknown"
NOT_APPLICABLE = "NotApplicable"


@dataclass
class Verdict:
    status: str
    witness: Any = None
    label: Optional[str] = None
    reason: Optional[str] = None

    @classmethod
    def holds(cls, witness=None, label=None) -> "Verdict":
        return cls(HOLDS, witness, label)

    @classmethod
    def fails(cls, witness=None, label=None) -> "Verdict":
        return cls(FAILS, witness, label)

    @classmethod
    def unknown(cls, reason: str) -> "Verdict":
        return cls(UNKNOWN, None, None, reason)

    @classmethod
    def not_applicable(cls, reason: str) -> "Verdict":
        return cls(NOT_APPLICABLE, None, None, reason)

    @classmethod
    def of(cls, flag: bool, witness=None, label=None) -> "Verdict":
        return cls.holds(witness, label) if flag else cls.fails(witness, label)

    @property
    def holds_(self) -> bool:
        return self.status == HOLDS

    @property
    def fails_(self) -> bool:
        return self.status == FAILS

    def __bool__(self) -> bool:
        return self.status == HOLDS

    def to_json(self) -> dict:
        d: dict = {"status": self.status}
        if self.label is not None:
            d["label"] = self.label
        if self.witness is not None:
            d["witness"] = self.witness
        if self.reason is not None:
            d["reason"] = self.reason
        return d

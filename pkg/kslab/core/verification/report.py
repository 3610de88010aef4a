"""Structured, serializable outcome of one check."""
from enum import Enum
import json
import math
from typing import Iterable, List

from attrs import define, field

__all__ = ["Verdict", "CheckKind", "VerificationReport", "dumps_reports", "loads_reports"]

# Interchange key accepted in place of the attribute name.
FIELD_ALIASES = {"paper_anchor": "anchor"}


class Verdict(Enum):
    passed = "pass"
    failed = "fail"
    informational = "informational"


class CheckKind(Enum):
    bound = "bound"
    equality = "equality"


@define(frozen=True)
class VerificationReport:
    """Measured value against a prediction.

    A ``bound`` passes when measured <= predicted * (1 + tolerance); an
    ``equality`` passes when |measured - predicted| <= tolerance.
    """

    check_id: str
    anchor: str
    kind: CheckKind = field(converter=CheckKind)
    predicted: float = field(converter=float)
    measured: float = field(converter=float)
    tolerance: float = field(converter=float)
    run_config_hash: str
    informational: bool = False

    @property
    def verdict(self) -> Verdict:
        if self.informational:
            return Verdict.informational
        if math.isnan(self.measured) or math.isnan(self.predicted):
            return Verdict.failed
        if self.kind is CheckKind.bound:
            ok = self.measured <= self.predicted * (1 + self.tolerance)
        else:
            ok = abs(self.measured - self.predicted) <= self.tolerance
        return Verdict.passed if ok else Verdict.failed

    @property
    def failed(self):
        return self.verdict is Verdict.failed

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "kind": self.kind.value,
            "predicted": self.predicted,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "run_config_hash": self.run_config_hash,
            "informational": self.informational,
            "verdict": self.verdict.value,
        }

    @classmethod
    def from_dict(cls, data: dict):
        fields = {key: value for key, value in data.items() if key != "verdict"}
        for alias, name in FIELD_ALIASES.items():
            if alias in fields:
                fields[name] = fields.pop(alias)
        return cls(**fields)


def dumps_reports(reports: Iterable[VerificationReport]) -> str:
    return json.dumps([report.to_dict() for report in reports], indent=2)


def loads_reports(text: str) -> List[VerificationReport]:
    return [VerificationReport.from_dict(item) for item in json.loads(text)]

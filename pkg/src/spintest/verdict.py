"""Tester answers shared by the Ising and coloring pipelines."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Answer(str, enum.Enum):
    YES = "YES"
    NO = "NO"


@dataclass
class TesterVerdict:
    answer: Answer
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"answer": self.answer.value, "diagnostics": self.diagnostics}

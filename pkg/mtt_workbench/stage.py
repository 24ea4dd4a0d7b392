"""
Common base for everything that can run as a pipeline stage
"""
from dataclasses import dataclass, field
from typing import List

from .trees import RankedAlphabet, Tree


class Stage:
    """Base class for transducers; subclasses implement apply()."""

    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet

    kind = "stage"

    def apply(self, s: Tree) -> Tree:
        raise NotImplementedError("Subclasses must implement apply()")


@dataclass
class ValidationReport:
    """Violations found while validating a transducer; empty means valid."""
    subject: str
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        return f"{self.subject}: " + "; ".join(self.violations)

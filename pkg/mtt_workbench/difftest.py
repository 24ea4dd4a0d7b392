"""
Bounded differential equivalence testing of two pipelines
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple, Union

from .errors import AlphabetMismatchError, StageError
from .pipeline import Pipeline, as_pipeline
from .stage import Stage
from .trees import Tree, enumerate_trees
from .workers import ordered_map

logger = logging.getLogger(__name__)

EQUAL = "equal-up-to-bound"
COUNTEREXAMPLE = "counterexample"
STAGE_ERROR = "stage-error"


@dataclass
class DiffReport:
    outcome: str
    bound: int
    tested: int = 0
    input: Optional[Tree] = None
    out1: Optional[Tree] = None
    out2: Optional[Tree] = None
    side: Optional[int] = None
    stage: Optional[int] = None
    error: Optional[str] = None

    @property
    def equal(self) -> bool:
        return self.outcome == EQUAL

    def __str__(self) -> str:
        if self.outcome == EQUAL:
            return f"equal on all {self.tested} inputs up to size {self.bound}"
        if self.outcome == COUNTEREXAMPLE:
            return f"counterexample {self.input}: {self.out1} vs {self.out2}"
        return f"pipeline {self.side} stage {self.stage} failed on {self.input}: {self.error}"


Outcome = Tuple[str, Optional[Tree], Optional[Tree], Optional[int], Optional[int], Optional[str]]


def _compare(p1: Pipeline, p2: Pipeline, s: Tree) -> Optional[Outcome]:
    outputs = []
    for side, p in ((1, p1), (2, p2)):
        try:
            outputs.append(p.apply(s))
        except StageError as exc:
            return STAGE_ERROR, None, None, side, exc.stage_index, str(exc.cause)
    if outputs[0] != outputs[1]:
        return COUNTEREXAMPLE, outputs[0], outputs[1], None, None, None
    return None


def equivalent_up_to(p1: Union[Pipeline, Stage], p2: Union[Pipeline, Stage], size_bound: int,
                     workers: int = 1) -> DiffReport:
    """
    Run both pipelines on every input with at most size_bound nodes.

    Args:
        p1: First pipeline (a single stage is wrapped)
        p2: Second pipeline
        size_bound: Largest input size
        workers: Worker processes for the enumeration

    Returns:
        DiffReport with the first mismatch in enumeration order, if any

    Raises:
        AlphabetMismatchError: The pipelines read different source alphabets
    """
    p1, p2 = as_pipeline(p1), as_pipeline(p2)
    if not p1.input_alphabet.same_symbols(p2.input_alphabet):
        raise AlphabetMismatchError(
            f"{p1.name} reads {p1.input_alphabet} but {p2.name} reads {p2.input_alphabet}"
        )
    inputs = list(enumerate_trees(p1.input_alphabet, size_bound))
    results = ordered_map(partial(_compare, p1, p2), inputs, workers)
    for tested, (s, found) in enumerate(zip(inputs, results), start=1):
        if found is None:
            continue
        outcome, out1, out2, side, stage, error = found
        logger.info("%s vs %s: %s on %s", p1.name, p2.name, outcome, s)
        return DiffReport(outcome, size_bound, tested, s, out1, out2, side, stage, error)
    return DiffReport(EQUAL, size_bound, len(inputs))

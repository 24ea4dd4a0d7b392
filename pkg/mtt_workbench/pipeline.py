"""
Left-to-right composition of transducer stages
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import AlphabetMismatchError, StageError, WorkbenchError
from .relabel import Brel, Trel, duplicating_brel, lift_stage
from .stage import Stage
from .trees import RankedAlphabet, Tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pipeline:
    """Stages applied left to right; the output alphabet of one is the input of the next."""
    stages: Tuple[Stage, ...] = ()
    name: str = "pipeline"

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        for i, (left, right) in enumerate(zip(self.stages, self.stages[1:])):
            if not left.output_alphabet.same_symbols(right.input_alphabet):
                raise AlphabetMismatchError(
                    f"stage {i} ({left.name}) outputs {left.output_alphabet}, "
                    f"stage {i + 1} ({right.name}) reads {right.input_alphabet}"
                )

    @classmethod
    def of(cls, *stages: Stage, name: Optional[str] = None) -> "Pipeline":
        return cls(tuple(stages), name or " ; ".join(s.name for s in stages) or "identity")

    @property
    def input_alphabet(self) -> Optional[RankedAlphabet]:
        return self.stages[0].input_alphabet if self.stages else None

    @property
    def output_alphabet(self) -> Optional[RankedAlphabet]:
        return self.stages[-1].output_alphabet if self.stages else None

    @property
    def relabelings(self) -> List[Stage]:
        return [s for s in self.stages if isinstance(s, (Brel, Trel))]

    @property
    def last(self) -> Stage:
        if not self.stages:
            raise AlphabetMismatchError("empty pipeline has no last stage")
        return self.stages[-1]

    def then(self, *stages: Stage) -> "Pipeline":
        return Pipeline.of(*(self.stages + tuple(stages)))

    def apply(self, s: Tree) -> Tree:
        return pipeline_apply(self, s)

    def __len__(self) -> int:
        return len(self.stages)


def pipeline_apply(p: Pipeline, s: Tree) -> Tree:
    """
    Run every stage in order (BREL final states are discarded).

    Raises:
        StageError: Wrapping the first failing stage's error
    """
    current = s
    for index, stage in enumerate(p.stages):
        try:
            current = stage.apply(current)
        except WorkbenchError as exc:
            logger.debug("%s: stage %d (%s) failed on %s", p.name, index, stage.name, s)
            raise StageError(index, exc) from exc
    return current


def as_pipeline(item) -> Pipeline:
    if isinstance(item, Pipeline):
        return item
    return Pipeline.of(item)


def trrel(b: Brel, t: Trel) -> Pipeline:
    """Look-around: a bottom-up relabeling followed by a top-down one."""
    return Pipeline.of(b, t, name=f"trrel({b.name},{t.name})")


def convolution_relabeling(left: Sequence[Stage], right: Sequence[Stage],
                           alphabet: RankedAlphabet, name: str = "conv") -> Pipeline:
    """
    Relabelings mapping s to the node-wise pairing of left(s) and right(s).

    Args:
        left: Relabelings applied to the first component, in order
        right: Relabelings applied to the second component, in order
        alphabet: Common source alphabet of both sides

    Returns:
        Pipeline over pair symbols "(l,r)"
    """
    stages: List[Stage] = [duplicating_brel(alphabet, name=f"{name}.dup")]
    second = alphabet
    for stage in left:
        stages.append(lift_stage(stage, second, 0))
    first = left[-1].output_alphabet if left else alphabet
    for stage in right:
        stages.append(lift_stage(stage, first, 1))
    return Pipeline.of(*stages, name=name)

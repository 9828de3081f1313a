"""
This module contains the exception hierarchy shared by all
subpackages.
"""

from typing import Iterable, Optional, Sequence


class MCTHFRError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(MCTHFRError, ValueError):
    """
    Raised on incompatible tensor shapes.

    Keyword arguments:
    op -- name of the operation
    shapes -- involved shapes (all of them are named in the message)
    detail -- optional additional explanation
              (default None)
    """

    def __init__(
        self,
        op: str,
        *shapes: Sequence[int],
        detail: Optional[str] = None,
    ) -> None:
        self.op = op
        self.shapes = tuple(tuple(s) for s in shapes)
        super().__init__(
            f"Dimension mismatch in '{op}': "
            + " vs. ".join(str(list(s)) for s in self.shapes)
            + (f" ({detail})" if detail else "")
        )


class DegenerateRowError(MCTHFRError, ValueError):
    """Raised if a softmax row has no finite logit."""


class GraphError(MCTHFRError, RuntimeError):
    """Raised on invalid use of the computation graph."""


class NonFiniteError(MCTHFRError, FloatingPointError):
    """Raised if a loss or gradient is not finite."""


class FormatError(MCTHFRError, ValueError):
    """
    Raised while decoding a binary container.

    Keyword arguments:
    msg -- problem description
    offset -- byte offset at which the problem was detected
    sample_index -- index of the affected record, if any
                    (default None)
    """

    def __init__(
        self, msg: str, offset: int, sample_index: Optional[int] = None
    ) -> None:
        self.offset = offset
        self.sample_index = sample_index
        super().__init__(
            f"{msg} (at byte offset {offset}"
            + (
                f", sample {sample_index})"
                if sample_index is not None
                else ")"
            )
        )


class ConfigError(MCTHFRError, ValueError):
    """
    Raised if a configuration is invalid. Collects all problems.

    Keyword arguments:
    problems -- list of problem descriptions
    """

    def __init__(self, problems: Iterable[str]) -> None:
        self.problems = list(problems)
        super().__init__(
            "Invalid configuration:\n"
            + "\n".join(f"* {p}" for p in self.problems)
        )


class CheckpointMismatchError(MCTHFRError, ValueError):
    """
    Raised if a checkpoint does not fit a configuration or dataset.

    Keyword arguments:
    expected -- expected shape signature
    found -- shape signature found in checkpoint
    """

    def __init__(self, expected: str, found: str) -> None:
        self.expected = expected
        self.found = found
        super().__init__(
            f"Checkpoint mismatch: expected signature '{expected}' but "
            + f"found '{found}'."
        )

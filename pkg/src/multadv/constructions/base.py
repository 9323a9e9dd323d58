from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..query import FunctionSpec


@dataclass(frozen=True)
class Construction:
    """An explicit adversary matrix with its threshold and function."""

    family: str
    params: dict
    spec: FunctionSpec
    gamma: np.ndarray
    lam: float
    partition_fn: Callable | None = field(default=None, repr=False, compare=False)

    def partition(self, i=1):
        """Projector set block-diagonalising ``Gamma`` and ``O_{i,1}``."""
        if self.partition_fn is None:
            raise NotImplementedError(f"no block structure known for {self.family}")
        return self.partition_fn(i)

    def partitions(self, indices=None):
        idx = range(1, self.spec.n + 1) if indices is None else indices
        return {i: self.partition(i) for i in idx}

"""Independent products: the Fisher-Rao distance is Pythagorean."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .core import ParamPoint, distance, fisher
from .errors import DomainError, MismatchError


@dataclass(frozen=True)
class ProductPoint:
    """A point on a product of statistical manifolds."""

    components: tuple

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise DomainError("a product point needs at least one component")
        for i, c in enumerate(comps):
            if not isinstance(c, ParamPoint):
                raise DomainError(f"component {i} is not a ParamPoint")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)


def product_distance(p: ProductPoint, q: ProductPoint) -> float:
    """``sqrt(sum_i d_i(p_i, q_i)**2)`` over matching components.

    Raises
    ------
    MismatchError
        If the component counts differ, or naming the first index whose
        families differ.
    """
    if len(p) != len(q):
        raise MismatchError(f"component counts differ: {len(p)} vs {len(q)}")
    total = 0.0
    for i, (a, b) in enumerate(zip(p.components, q.components)):
        if a.family != b.family:
            raise MismatchError(
                f"component {i}: {a.family.label} vs {b.family.label}"
            )
        total += distance(a, b) ** 2
    return math.sqrt(total)


def product_fisher(p: ProductPoint) -> np.ndarray:
    """Block-diagonal Fisher matrix of an independent product."""
    return block_diag(*(fisher(c) for c in p.components))

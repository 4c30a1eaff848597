"""Local agreement between Kullback-Leibler divergence and Rao distance.

For nearby points ``KL(p, q) = d(p, q)**2 / 2 + O(d**3)``, so the ratio
``KL / (d**2 / 2)`` tends to one as the points merge.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .. import core
from ..core import ParamPoint
from ..errors import DegenerateError, DomainError, UnsupportedError


def kl_divergence(p: ParamPoint, q: ParamPoint) -> float:
    """Closed-form ``KL(p || q)``.

    Raises
    ------
    UnsupportedError
        If the family has no closed form registered.
    """
    fam = core._same_family(p, q)
    if fam.kl is None:
        raise UnsupportedError(f"{fam.name} has no closed-form KL divergence")
    return float(fam.kl(p.array, q.array))


def kl_local_ratio(p: ParamPoint, q: ParamPoint) -> float:
    """``KL(p || q) / (d(p, q)**2 / 2)``.

    Raises
    ------
    DegenerateError
        If ``p`` and ``q`` coincide.
    UnsupportedError
        If the family has no closed-form KL divergence.
    """
    fam = core._same_family(p, q)
    if fam.kl is None:
        raise UnsupportedError(f"{fam.name} has no closed-form KL divergence")
    d = core.distance(p, q)
    if d == 0.0:
        raise DegenerateError("the KL ratio is undefined for coincident points")
    return kl_divergence(p, q) / (0.5 * d * d)


def point_at_distance(p: ParamPoint, d: float, axis: int = 0, sign: float = 1.0) -> ParamPoint:
    """Point along one coordinate axis at Rao distance ``d`` from ``p``.

    The offset is found by bracketing and Brent's method, so the distance
    matches ``d`` to roughly machine precision.
    """
    fam = p.family
    if not d > 0:
        raise DomainError("d must be positive")
    base = p.array
    e = np.zeros(fam.dim)
    e[axis] = 1.0 if sign >= 0 else -1.0

    def shifted(s):
        return ParamPoint(fam, tuple(float(v) for v in base + s * e))

    def gap(s):
        return core.distance(p, shifted(s)) - d

    hi = 1e-3 * max(abs(base[axis]), 1.0)
    while gap(hi) < 0:
        nxt = 2.0 * hi
        if not fam.domain(base + nxt * e):
            raise DomainError("the requested distance leaves the domain along this axis")
        hi = nxt
    s = brentq(gap, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    return shifted(s)

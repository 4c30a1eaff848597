"""Family registry, parameter validation and dispatch.

Every distribution family is described by a :class:`FamilyDescriptor`
registered under a name.  Descriptors are built by factory functions that
take the fixed hyperparameters, so ``get_family("binomial", n=4)`` and
``get_family("binomial", n=5)`` are distinct manifolds.

Points on a manifold are :class:`ParamPoint` instances created through
:func:`validate_params`; all public operations (:func:`distance`,
:func:`fisher`, :func:`geodesic_path`, :func:`log_density`) take those.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from .errors import (
    DomainError,
    MismatchError,
    SupportError,
    UnknownFamilyError,
    UnsupportedError,
)


@dataclass(frozen=True)
class Constants:
    """Numerical constants shared by the family modules."""

    euler_gamma: float = 0.5772156649015329
    pi: float = math.pi
    clamp_eps: float = 1e-12


CONSTANTS = Constants()
EULER_GAMMA = CONSTANTS.euler_gamma


# -- boundary clamps --------------------------------------------------------


def clamped_acosh(x: float) -> float:
    """``arccosh(max(x, 1))``; rounding often yields ``1 - 1e-16``."""
    return math.acosh(max(x, 1.0))


def clamped_acos(x: float) -> float:
    """``arccos`` with the argument clipped to ``[-1, 1]``."""
    return math.acos(min(max(x, -1.0), 1.0))


def clamped_atanh(x: float) -> float:
    """``arctanh`` of an argument expected in ``[0, 1)``.

    Negative rounding noise is clipped to 0.  An argument that reaches 1
    (a coordinate on the manifold boundary) gives ``+inf``.
    """
    x = max(x, 0.0)
    if x >= 1.0:
        return math.inf
    return math.atanh(x)


# -- descriptors ------------------------------------------------------------


@dataclass(frozen=True)
class ChartMap:
    """Isometric chart of a 2-parameter family into a scaled half-plane.

    ``to_chart`` and ``from_chart`` act on arrays of shape ``(..., 2)``;
    the metric on the chart side is ``diag(a, b) / v**2``.
    """

    family: str
    to_chart: Callable[[np.ndarray], np.ndarray]
    from_chart: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float

    @property
    def spec(self):
        from .hyperbolic import ScaledMetricSpec

        return ScaledMetricSpec(self.a, self.b)


@dataclass(frozen=True, eq=False)
class FamilyDescriptor:
    """Registry entry for one statistical manifold.

    Attributes
    ----------
    name : str
        Registered family name.
    dim : int
        Manifold dimension, i.e. the length of the coordinate vector.
    hyper : tuple of (str, value) pairs
        Fixed hyperparameters, sorted by key.
    coord_names : tuple of str
        Human-readable names of the coordinates.
    kind : {"discrete", "continuous", "matrix"}
        Sample space type, used by the oracle.
    violation : callable
        ``violation(coords) -> str or None``; names the first violated
        domain constraint.
    inside : callable
        Vectorised domain mask over arrays of shape ``(..., dim)``.
    logpdf : callable
        ``logpdf(coords, x)`` vectorised over sample points ``x``; no
        support checking.
    support_violation : callable
        ``support_violation(coords, x) -> str or None``.
    metric : callable
        Analytic Fisher matrix, ``(..., dim) -> (..., dim, dim)``.
    dist : callable
        Closed-form Fisher-Rao distance between two coordinate arrays.
    path : callable or None
        ``path(c1, c2, ts) -> (len(ts), dim)`` closed-form geodesic.
    chart : ChartMap or None
        Half-plane chart for charted 2-parameter families.
    sampler : callable
        ``sampler(rng) -> coords`` drawing from the property-test box.
    sample_space : callable or None
        Oracle hook: support enumeration (discrete) or integration
        substitution (continuous).
    score_sides : tuple of int
        Finite-difference side per coordinate for the score: 0 central,
        -1 backward, +1 forward.  One-sided steps keep the perturbed
        support containing every sample point.
    fixed_support : bool
        False when the support depends on the parameters.
    parse : callable or None
        Converts raw user input to the stored coordinate vector.
    canonical : tuple
        A pair of coordinate tuples used by the ``table`` command.
    kl : callable or None
        Closed-form Kullback-Leibler divergence ``kl(c1, c2)``.
    """

    name: str
    dim: int
    hyper: tuple
    coord_names: tuple
    kind: str
    violation: Callable[[np.ndarray], Optional[str]]
    inside: Callable[[np.ndarray], np.ndarray]
    logpdf: Callable[[np.ndarray, Any], np.ndarray]
    support_violation: Callable[[np.ndarray, Any], Optional[str]]
    metric: Callable[[np.ndarray], np.ndarray]
    dist: Callable[[np.ndarray, np.ndarray], float]
    sampler: Callable[[np.random.Generator], np.ndarray]
    path: Optional[Callable] = None
    chart: Optional[ChartMap] = None
    sample_space: Optional[Callable] = None
    score_sides: Optional[tuple] = None
    fixed_support: bool = True
    parse: Optional[Callable[[Any], np.ndarray]] = None
    canonical: tuple = ()
    kl: Optional[Callable[[np.ndarray, np.ndarray], float]] = None
    description: str = ""

    @property
    def key(self) -> tuple:
        return (self.name, self.hyper)

    @property
    def hyperparams(self) -> dict:
        return dict(self.hyper)

    def __eq__(self, other):
        if not isinstance(other, FamilyDescriptor):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if not self.hyper:
            return f"FamilyDescriptor({self.name!r})"
        args = ", ".join(f"{k}={v!r}" for k, v in self.hyper)
        return f"FamilyDescriptor({self.name!r}, {args})"

    @property
    def label(self) -> str:
        """Name with hyperparameters, e.g. ``binomial(n=4)``."""
        if not self.hyper:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.hyper) + ")"

    def domain(self, coords) -> bool:
        """Domain predicate on a coordinate vector."""
        c = np.asarray(coords, dtype=float)
        return c.shape == (self.dim,) and self.violation(c) is None

    def sides(self) -> tuple:
        return self.score_sides if self.score_sides is not None else (0,) * self.dim


@dataclass(frozen=True)
class ParamPoint:
    """A point on a statistical manifold.

    Create instances with :func:`validate_params`; the constructor does not
    check the domain.
    """

    family: FamilyDescriptor
    coords: tuple

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def __repr__(self):
        vals = ", ".join(repr(float(c)) for c in self.coords)
        return f"ParamPoint({self.family.label}, ({vals}))"


# -- registry ---------------------------------------------------------------

_BUILDERS: dict = {}
_INFER: dict = {}


def register(name: str, infer: Optional[Callable[[np.ndarray], dict]] = None):
    """Decorator registering a descriptor factory under ``name``.

    ``infer`` optionally derives missing hyperparameters from raw
    coordinates (simplex families infer the number of categories).
    """

    def deco(builder):
        _BUILDERS[name] = builder
        if infer is not None:
            _INFER[name] = infer
        return builder

    return deco


def family_names() -> tuple:
    """Names of all registered families, sorted."""
    return tuple(sorted(_BUILDERS))


@functools.lru_cache(maxsize=None)
def _build(name: str, items: tuple) -> FamilyDescriptor:
    return _BUILDERS[name](**dict(items))


def _normalise_hyper_value(v):
    if isinstance(v, (bool, np.bool_)):
        raise DomainError("hyperparameters must be numbers")
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def normalise_name(name) -> str:
    """Canonical registry key: lower case with underscores."""
    return str(name).strip().lower().replace("-", "_")


def get_family(name, **hyper) -> FamilyDescriptor:
    """Return the descriptor for ``name`` with the given hyperparameters.

    Parameters
    ----------
    name : str or FamilyDescriptor
        Registered family name.  A descriptor is returned unchanged when no
        hyperparameters are given.
    **hyper
        Fixed hyperparameters, e.g. ``n=4`` for the binomial.

    Raises
    ------
    UnknownFamilyError
        If no family of that name exists.
    DomainError
        If a hyperparameter violates its constraint.
    """
    if isinstance(name, FamilyDescriptor):
        if hyper:
            return get_family(name.name, **{**name.hyperparams, **hyper})
        return name
    key = normalise_name(name)
    if key not in _BUILDERS:
        raise UnknownFamilyError(
            f"unknown family {name!r}; known: {', '.join(family_names())}"
        )
    items = tuple(sorted((k, _normalise_hyper_value(v)) for k, v in hyper.items()))
    try:
        return _build(key, items)
    except TypeError as exc:
        # unexpected keyword for this builder
        raise DomainError(f"{key}: {exc}") from None


def _raw_coords(coords) -> np.ndarray:
    try:
        arr = np.asarray(coords, dtype=float)
    except (TypeError, ValueError):
        raise DomainError("coordinates must be real numbers") from None
    if not np.all(np.isfinite(arr)):
        raise DomainError("coordinates must be finite")
    return arr


def validate_params(family, coords, **hyper) -> ParamPoint:
    """Check ``coords`` against the family domain and build a point.

    Parameters
    ----------
    family : str or FamilyDescriptor
        Family name or descriptor.  With a name, simplex families may infer
        the number of categories from ``coords``.
    coords : array_like
        Coordinate vector.  Simplex families accept all ``n``
        probabilities (summing to 1 within 1e-9) or the ``n - 1`` free
        ones; matrix families accept an ``m x m`` matrix or its
        half-vectorisation.
    **hyper
        Hyperparameters when ``family`` is a name.

    Raises
    ------
    DomainError
        Naming the violated constraint.
    """
    raw = _raw_coords(coords)
    if not isinstance(family, FamilyDescriptor):
        key = str(family).strip().lower().replace("-", "_")
        if key in _INFER:
            hyper = {**_INFER[key](raw, hyper), **hyper}
        family = get_family(key, **hyper)
    elif hyper:
        family = get_family(family, **hyper)
    fam = family
    arr = fam.parse(raw) if fam.parse is not None else raw.ravel()
    if arr.shape != (fam.dim,):
        raise DomainError(
            f"{fam.name} expects {fam.dim} coordinate(s), got {arr.size}"
        )
    msg = fam.violation(arr)
    if msg is not None:
        raise DomainError(msg)
    return ParamPoint(fam, tuple(float(c) for c in arr))


def point(family, coords, **hyper) -> ParamPoint:
    """Shorthand for :func:`validate_params`."""
    return validate_params(family, coords, **hyper)


def _same_family(p: ParamPoint, q: ParamPoint) -> FamilyDescriptor:
    if p.family != q.family:
        raise MismatchError(
            f"points belong to different manifolds: {p.family.label} vs {q.family.label}"
        )
    return p.family


def log_density(p: ParamPoint, x) -> float:
    """Log probability mass or density ``log p(x; coords)``.

    Raises
    ------
    SupportError
        If ``x`` lies outside the support at ``p``.
    """
    fam = p.family
    msg = fam.support_violation(p.array, x)
    if msg is not None:
        raise SupportError(msg)
    return float(fam.logpdf(p.array, np.asarray(x, dtype=float)))


def distance(p: ParamPoint, q: ParamPoint) -> float:
    """Closed-form Fisher-Rao distance between two points.

    Returns exactly 0.0 for equal coordinates and ``inf`` when a boundary
    argument saturates.

    Raises
    ------
    MismatchError
        If ``p`` and ``q`` belong to different manifolds.
    """
    fam = _same_family(p, q)
    if p.coords == q.coords:
        return 0.0
    return float(fam.dist(p.array, q.array))


def fisher(p: ParamPoint) -> np.ndarray:
    """Analytic Fisher information matrix at ``p``."""
    return np.asarray(p.family.metric(p.array), dtype=float)


def geodesic_path(p: ParamPoint, q: ParamPoint, steps: int) -> list:
    """Sample the closed-form minimising geodesic from ``p`` to ``q``.

    Parameters
    ----------
    steps : int
        Number of intervals; ``steps + 1`` points are returned.

    Raises
    ------
    UnsupportedError
        If the family has no closed-form geodesic.
    """
    fam = _same_family(p, q)
    if isinstance(steps, bool) or int(steps) != steps or steps < 1:
        raise DomainError("steps must be a positive integer")
    steps = int(steps)
    if fam.path is None:
        raise UnsupportedError(f"{fam.name} has no closed-form geodesic")
    ts = np.linspace(0.0, 1.0, steps + 1)
    if p.coords == q.coords:
        return [p] * (steps + 1)
    pts = np.asarray(fam.path(p.array, q.array, ts), dtype=float)
    out = [p]
    out.extend(ParamPoint(fam, tuple(float(c) for c in row)) for row in pts[1:-1])
    out.append(q)
    return out


def geodesic_array(p: ParamPoint, q: ParamPoint, ts) -> np.ndarray:
    """Closed-form geodesic evaluated at parameters ``ts`` in ``[0, 1]``."""
    fam = _same_family(p, q)
    if fam.path is None:
        raise UnsupportedError(f"{fam.name} has no closed-form geodesic")
    ts = np.asarray(ts, dtype=float)
    if p.coords == q.coords:
        return np.tile(p.array, (ts.size, 1))
    return np.asarray(fam.path(p.array, q.array, ts), dtype=float)


def halfplane_chart(family, **hyper) -> ChartMap:
    """Half-plane chart of a charted 2-parameter family.

    Raises
    ------
    UnsupportedError
        If the family has no such chart.
    """
    fam = get_family(family, **hyper)
    if fam.chart is None:
        raise UnsupportedError(f"{fam.name} has no half-plane chart")
    return fam.chart


def sample_point(family: FamilyDescriptor, rng: np.random.Generator) -> ParamPoint:
    """Draw a point from the family's property-test sampling box."""
    c = np.asarray(family.sampler(rng), dtype=float)
    return ParamPoint(family, tuple(float(v) for v in c))


# -- helpers used by the family modules -------------------------------------


def log_uniform(rng: np.random.Generator, lo: float = 0.1, hi: float = 10.0) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def uniform_mean(rng: np.random.Generator) -> float:
    return float(rng.uniform(-5.0, 5.0))


def probability(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.05, 0.95))


def simplex_sample(rng: np.random.Generator, n: int, floor: float = 0.02) -> np.ndarray:
    """Normalised positive uniforms with every entry at least ``floor``."""
    w = rng.uniform(0.0, 1.0, size=n)
    w = w / w.sum()
    p = floor + (1.0 - n * floor) * w
    return p[:-1]


def positive_int(value, name: str, minimum: int = 1) -> int:
    """Validate an integer hyperparameter given as int, integral float or str."""
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be an integer >= {minimum}") from None
    if not math.isfinite(f) or f != int(f) or f < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}")
    return int(f)


def positive_real(value, name: str, minimum: float = 0.0) -> float:
    """Validate a real hyperparameter strictly greater than ``minimum``."""
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number > {minimum:g}") from None
    if not math.isfinite(f) or f <= minimum:
        raise DomainError(f"{name} must be a real number > {minimum:g}")
    return f


def is_integer_array(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(np.isfinite(x)) and np.all(x == np.round(x)))


def linear_path(phi: Callable, phi_inv: Callable) -> Callable:
    """Geodesic for a 1-D family: straight line in arc-length coordinate."""

    def path(c1, c2, ts):
        s1, s2 = phi(c1[0]), phi(c2[0])
        s = (1.0 - ts) * s1 + ts * s2
        return phi_inv(s)[:, None]

    return path


def metric_1d(g: Callable[[np.ndarray], np.ndarray]) -> Callable:
    """Wrap a scalar metric ``g(theta)`` as ``(..., 1) -> (..., 1, 1)``."""

    def metric(c):
        c = np.asarray(c, dtype=float)
        return np.asarray(g(c[..., 0]), dtype=float)[..., None, None]

    return metric


def diag_metric(d0: Callable, d1: Callable) -> Callable:
    """Diagonal 2x2 metric from entry functions of the coordinate array."""

    def metric(c):
        c = np.asarray(c, dtype=float)
        out = np.zeros(c.shape[:-1] + (2, 2))
        out[..., 0, 0] = d0(c)
        out[..., 1, 1] = d1(c)
        return out

    return metric


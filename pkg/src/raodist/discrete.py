"""Discrete families: binomial, Poisson, geometric, negative binomial,
categorical, multinomial and negative multinomial.

Simplex families store the ``n - 1`` free probabilities ``p_1 .. p_{n-1}``;
``p_n = 1 - sum``.  The categorical distance is the great-circle distance
of the embedded points ``2 sqrt(p)`` on the radius-2 sphere.  The negative
multinomial distance is measured on the same sphere with the hyperbolic
metric of the half-space whose height coordinate is ``2 sqrt(p_n)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import stats
from scipy.special import gammaln

from . import core
from .core import FamilyDescriptor, ParamPoint, register
from .errors import DimensionError, DomainError
from .hyperbolic import scaled_geodesic

SIMPLEX_TOL = 1e-9


# -- simplex helpers --------------------------------------------------------


def full_probs(free) -> np.ndarray:
    """Append ``p_n = 1 - sum(free)`` to the free coordinates."""
    free = np.asarray(free, dtype=float)
    last = 1.0 - free.sum(axis=-1, keepdims=True)
    return np.concatenate([free, last], axis=-1)


def _simplex_violation(c: np.ndarray):
    if np.any(c <= 0.0):
        return "simplex coordinates must be positive"
    if not float(c.sum()) < 1.0:
        return "simplex coordinates must sum to < 1"
    return None


def _simplex_inside(c):
    c = np.asarray(c, dtype=float)
    return np.all(c > 0.0, axis=-1) & (c.sum(axis=-1) < 1.0)


def _infer_categories(raw: np.ndarray, given: dict) -> dict:
    if "categories" in given:
        return {}
    v = raw.ravel()
    if abs(float(v.sum()) - 1.0) <= SIMPLEX_TOL:
        return {"categories": v.size}
    return {"categories": v.size + 1}


def _simplex_parser(n: int):
    def parse(raw):
        v = np.asarray(raw, dtype=float).ravel()
        if v.size == n:
            s = float(v.sum())
            if abs(s - 1.0) > SIMPLEX_TOL:
                raise DomainError("full probability vector must sum to 1 (within 1e-9)")
            if np.any(v <= 0.0):
                raise DomainError("simplex coordinates must be positive")
            return (v / s)[:-1]
        if v.size == n - 1:
            return v
        raise DomainError(f"simplex with {n} categories needs {n} or {n - 1} values, got {v.size}")

    return parse


def as_probabilities(s) -> np.ndarray:
    """Full probability vector from a simplex :class:`ParamPoint` or array.

    Arrays must be full probability vectors (positive, summing to 1 within
    1e-9).
    """
    if isinstance(s, ParamPoint):
        return full_probs(s.array)
    p = np.asarray(s, dtype=float).ravel()
    if np.any(p < 0.0) or abs(float(p.sum()) - 1.0) > SIMPLEX_TOL:
        raise DomainError("probability vector must be non-negative and sum to 1 (within 1e-9)")
    return p


def simplex_sphere_embedding(s) -> np.ndarray:
    """Embed a simplex point on the radius-2 sphere as ``2 sqrt(p)``."""
    return 2.0 * np.sqrt(as_probabilities(s))


def bhattacharyya_coefficient(s1, s2) -> float:
    """``sum(sqrt(p_i q_i))``."""
    p, q = as_probabilities(s1), as_probabilities(s2)
    if p.shape != q.shape:
        raise DimensionError(f"dimension mismatch: {p.size} vs {q.size}")
    return float(np.sqrt(p * q).sum())


def hellinger_distance(s1, s2) -> float:
    """Euclidean distance ``|sqrt(p) - sqrt(q)|``.

    Twice this value is the chord of the categorical Fisher-Rao arc.
    """
    p, q = as_probabilities(s1), as_probabilities(s2)
    if p.shape != q.shape:
        raise DimensionError(f"dimension mismatch: {p.size} vs {q.size}")
    return float(np.linalg.norm(np.sqrt(p) - np.sqrt(q)))


def _categorical_dist(c1, c2) -> float:
    # 2 arccos(BC) written as 4 arcsin(H / 2) to stay accurate for close points
    h = float(np.linalg.norm(np.sqrt(full_probs(c1)) - np.sqrt(full_probs(c2))))
    return 4.0 * math.asin(min(h / 2.0, 1.0))


def categorical_sphere_distance(s1, s2) -> float:
    """Great-circle length ``2 arccos(<f(s1)/2, f(s2)/2>)`` of embedded points."""
    u = simplex_sphere_embedding(s1) / 2.0
    v = simplex_sphere_embedding(s2) / 2.0
    return 2.0 * core.clamped_acos(float(u @ v))


def _slerp(c1, c2, ts):
    u, v = np.sqrt(full_probs(c1)), np.sqrt(full_probs(c2))
    ang = 2.0 * math.asin(min(float(np.linalg.norm(u - v)) / 2.0, 1.0))
    ts = np.asarray(ts, dtype=float)[:, None]
    w = (np.sin((1.0 - ts) * ang) * u + np.sin(ts * ang) * v) / math.sin(ang)
    p = w * w
    p /= p.sum(axis=1, keepdims=True)
    return p[:, :-1]


def _categorical_metric(c):
    c = np.asarray(c, dtype=float)
    pn = 1.0 - c.sum(axis=-1)
    d = c.shape[-1]
    out = np.broadcast_to((1.0 / pn)[..., None, None], c.shape[:-1] + (d, d)).copy()
    idx = np.arange(d)
    out[..., idx, idx] += 1.0 / c
    return out


def _simplex_sampler(n):
    def sample(rng):
        return core.simplex_sample(rng, n)

    return sample


def _compositions(total: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``."""
    rows = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(total + parts - 2 - prev)
        rows.append(row)
    return np.array(rows, dtype=float).reshape(-1, parts)


def _count_vector_violation(x, size: int):
    x = np.asarray(x, dtype=float)
    if x.shape != (size,):
        return f"sample must be a vector of {size} counts"
    if not core.is_integer_array(x) or np.any(x < 0):
        return "counts must be non-negative integers"
    return None


def _scalar_count_violation(x, lo: int, hi=None):
    x = np.asarray(x, dtype=float)
    if x.ndim != 0 or not core.is_integer_array(x):
        return "sample must be an integer"
    if x < lo or (hi is not None and x > hi):
        rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        return f"sample must be an integer in {rng}"
    return None


def _theta_violation(c):
    t = c[0]
    if not (0.0 < t < 1.0):
        return "theta must lie in (0, 1)"
    return None


def _theta_inside(c):
    c = np.asarray(c)
    return (c[..., 0] > 0.0) & (c[..., 0] < 1.0)


def _tail_cut(dist, tail: float) -> int:
    """Largest support value needed so the remaining mass is below ``tail``."""
    return int(dist.isf(tail)) + 2


# -- binomial ---------------------------------------------------------------


def _binomial_base(t1: float, t2: float) -> float:
    return 2.0 * abs(math.asin(math.sqrt(t1)) - math.asin(math.sqrt(t2)))


@register("binomial")
def binomial(n=1) -> FamilyDescriptor:
    """Binomial with ``n`` trials, coordinate ``theta``."""
    n = core.positive_int(n, "n")
    rn = math.sqrt(n)

    def logpdf(c, x):
        t = c[0]
        return (gammaln(n + 1) - gammaln(x + 1) - gammaln(n - x + 1)
                + x * np.log(t) + (n - x) * np.log1p(-t))

    return FamilyDescriptor(
        name="binomial", dim=1, hyper=(("n", n),), coord_names=("theta",),
        kind="discrete",
        violation=_theta_violation, inside=_theta_inside, logpdf=logpdf,
        support_violation=lambda c, x: _scalar_count_violation(x, 0, n),
        metric=core.metric_1d(lambda t: n / (t * (1.0 - t))),
        dist=lambda c1, c2: rn * _binomial_base(c1[0], c2[0]),
        path=core.linear_path(lambda t: math.asin(math.sqrt(t)), lambda s: np.sin(s) ** 2),
        sampler=lambda rng: np.array([core.probability(rng)]),
        sample_space=lambda c, tail: np.arange(n + 1, dtype=float),
        canonical=((0.25,), (0.75,)),
        description="2 sqrt(n) |arcsin sqrt(theta1) - arcsin sqrt(theta2)|",
    )


# -- Poisson ----------------------------------------------------------------


def _positive_violation(name):
    def violation(c):
        if not c[0] > 0.0:
            return f"{name} must be positive"
        return None

    return violation


def _positive_inside(c):
    return np.asarray(c)[..., 0] > 0.0


def _poisson_kl(c1, c2):
    l1, l2 = c1[0], c2[0]
    return l1 * math.log(l1 / l2) - l1 + l2


@register("poisson")
def poisson() -> FamilyDescriptor:
    """Poisson with rate ``lambda``."""

    def logpdf(c, x):
        lam = c[0]
        return x * np.log(lam) - lam - gammaln(x + 1)

    return FamilyDescriptor(
        name="poisson", dim=1, hyper=(), coord_names=("lambda",), kind="discrete",
        violation=_positive_violation("lambda"), inside=_positive_inside, logpdf=logpdf,
        support_violation=lambda c, x: _scalar_count_violation(x, 0),
        metric=core.metric_1d(lambda lam: 1.0 / lam),
        dist=lambda c1, c2: 2.0 * abs(math.sqrt(c1[0]) - math.sqrt(c2[0])),
        path=core.linear_path(math.sqrt, lambda s: s * s),
        sampler=lambda rng: np.array([core.log_uniform(rng)]),
        sample_space=lambda c, tail: np.arange(_tail_cut(stats.poisson(c[0]), tail) + 1, dtype=float),
        canonical=((1.0,), (4.0,)),
        kl=_poisson_kl,
        description="2 |sqrt(lambda1) - sqrt(lambda2)|",
    )


# -- geometric and negative binomial ----------------------------------------


def _geometric_phi(t):
    # arctanh(sqrt(1 - t)) without cancellation near t = 0
    w = np.sqrt(1.0 - t)
    return np.log1p(w) - 0.5 * np.log(t)


def _geometric_phi_inv(s):
    return 1.0 / np.cosh(s) ** 2


def _geometric_base(t1: float, t2: float) -> float:
    return 2.0 * abs(float(_geometric_phi(t1)) - float(_geometric_phi(t2)))


@register("geometric")
def geometric() -> FamilyDescriptor:
    """Number of Bernoulli(theta) trials up to and including the first success."""

    def logpdf(c, x):
        t = c[0]
        return np.log(t) + (x - 1.0) * np.log1p(-t)

    return FamilyDescriptor(
        name="geometric", dim=1, hyper=(), coord_names=("theta",), kind="discrete",
        violation=_theta_violation, inside=_theta_inside, logpdf=logpdf,
        support_violation=lambda c, x: _scalar_count_violation(x, 1),
        metric=core.metric_1d(lambda t: 1.0 / (t * t * (1.0 - t))),
        dist=lambda c1, c2: _geometric_base(c1[0], c2[0]),
        path=core.linear_path(_geometric_phi, _geometric_phi_inv),
        sampler=lambda rng: np.array([core.probability(rng)]),
        sample_space=lambda c, tail: np.arange(1, _tail_cut(stats.geom(c[0]), tail) + 1, dtype=float),
        canonical=((0.75,), (0.19,)),
        description="2 |arctanh sqrt(1 - theta1) - arctanh sqrt(1 - theta2)|",
    )


@register("negative_binomial")
def negative_binomial(r=1) -> FamilyDescriptor:
    """Failures before the ``r``-th success of Bernoulli(theta) trials."""
    r = core.positive_int(r, "r")
    rr = math.sqrt(r)

    def logpdf(c, x):
        t = c[0]
        return (gammaln(x + r) - gammaln(r) - gammaln(x + 1)
                + r * np.log(t) + x * np.log1p(-t))

    return FamilyDescriptor(
        name="negative_binomial", dim=1, hyper=(("r", r),), coord_names=("theta",),
        kind="discrete",
        violation=_theta_violation, inside=_theta_inside, logpdf=logpdf,
        support_violation=lambda c, x: _scalar_count_violation(x, 0),
        metric=core.metric_1d(lambda t: r / (t * t * (1.0 - t))),
        dist=lambda c1, c2: rr * _geometric_base(c1[0], c2[0]),
        path=core.linear_path(_geometric_phi, _geometric_phi_inv),
        sampler=lambda rng: np.array([core.probability(rng)]),
        sample_space=lambda c, tail: np.arange(_tail_cut(stats.nbinom(r, c[0]), tail) + 1, dtype=float),
        canonical=((0.75,), (0.19,)),
        description="2 sqrt(r) |arctanh sqrt(1 - theta1) - arctanh sqrt(1 - theta2)|",
    )


# -- categorical and multinomial --------------------------------------------

_FIG2 = ((0.7, 0.2), (0.1, 0.3))


def _categorical_kl(c1, c2):
    p, q = full_probs(c1), full_probs(c2)
    return float(np.sum(p * np.log(p / q)))


def _simplex_canonical(n):
    if n == 3:
        return _FIG2
    p = np.full(n - 1, 1.0 / n)
    q = np.linspace(1.0, 2.0, n)
    q = q / q.sum()
    return (tuple(p), tuple(q[:-1]))


def _simplex_coord_names(n):
    return tuple(f"p{i}" for i in range(1, n))


@register("categorical", infer=_infer_categories)
def categorical(categories) -> FamilyDescriptor:
    """Categorical distribution on ``categories`` outcomes."""
    n = core.positive_int(categories, "categories", minimum=2)

    def logpdf(c, x):
        p = full_probs(c)
        idx = np.asarray(x, dtype=int) - 1
        return np.log(p[idx])

    return FamilyDescriptor(
        name="categorical", dim=n - 1, hyper=(("categories", n),),
        coord_names=_simplex_coord_names(n), kind="discrete",
        violation=_simplex_violation, inside=_simplex_inside, logpdf=logpdf,
        support_violation=lambda c, x: _scalar_count_violation(x, 1, n),
        metric=_categorical_metric, dist=_categorical_dist, path=_slerp,
        sampler=_simplex_sampler(n),
        sample_space=lambda c, tail: np.arange(1, n + 1, dtype=float),
        parse=_simplex_parser(n), canonical=_simplex_canonical(n),
        kl=_categorical_kl,
        description="2 arccos(sum sqrt(p_i q_i))",
    )


@register("multinomial", infer=_infer_categories)
def multinomial(categories, trials=1) -> FamilyDescriptor:
    """Counts of ``trials`` independent categorical draws."""
    n = core.positive_int(categories, "categories", minimum=2)
    m = core.positive_int(trials, "trials")
    rm = math.sqrt(m)

    def logpdf(c, x):
        p = full_probs(c)
        x = np.asarray(x, dtype=float)
        return gammaln(m + 1) + np.sum(x * np.log(p) - gammaln(x + 1), axis=-1)

    def support_violation(c, x):
        msg = _count_vector_violation(x, n)
        if msg is None and float(np.sum(x)) != m:
            msg = f"counts must sum to trials = {m}"
        return msg

    return FamilyDescriptor(
        name="multinomial", dim=n - 1, hyper=(("categories", n), ("trials", m)),
        coord_names=_simplex_coord_names(n), kind="discrete",
        violation=_simplex_violation, inside=_simplex_inside, logpdf=logpdf,
        support_violation=support_violation,
        metric=lambda c: m * _categorical_metric(c),
        dist=lambda c1, c2: rm * _categorical_dist(c1, c2), path=_slerp,
        sampler=_simplex_sampler(n),
        sample_space=lambda c, tail: _compositions(m, n),
        parse=_simplex_parser(n), canonical=_simplex_canonical(n),
        description="2 sqrt(trials) arccos(sum sqrt(p_i q_i))",
    )


# -- negative multinomial ---------------------------------------------------


def _negmult_unit(c1, c2) -> float:
    # hyperbolic distance of 2 sqrt(p), 2 sqrt(q) on the radius-2 hemisphere
    p, q = full_probs(c1), full_probs(c2)
    h = float(np.linalg.norm(np.sqrt(p) - np.sqrt(q)))
    return 2.0 * math.asinh(h / (2.0 * math.sqrt(math.sqrt(p[-1] * q[-1]))))


def negative_multinomial_hemisphere_points(c1, c2):
    """Embedded points ``2 sqrt(p)`` of two negative-multinomial coordinate vectors."""
    return 2.0 * np.sqrt(full_probs(c1)), 2.0 * np.sqrt(full_probs(c2))


def _negmult_path(c1, c2, ts):
    P, Q = negative_multinomial_hemisphere_points(c1, c2)
    # geodesic of H^n in the vertical plane through P and Q
    e = Q[:-1] - P[:-1]
    span = float(np.linalg.norm(e))
    e = e / span
    pts = scaled_geodesic((1.0, 1.0), (0.0, P[-1]), (span, Q[-1]), ts)
    X = P[:-1][None, :] + pts[:, :1] * e[None, :]
    full = np.concatenate([X, pts[:, 1:]], axis=1)
    prob = (full / 2.0) ** 2
    prob /= prob.sum(axis=1, keepdims=True)
    return prob[:, :-1]


@register("negative_multinomial", infer=_infer_categories)
def negative_multinomial(categories, x_n=1) -> FamilyDescriptor:
    """Counts of the first ``n - 1`` outcomes before the ``x_n``-th occurrence of outcome ``n``."""
    n = core.positive_int(categories, "categories", minimum=2)
    xn = core.positive_int(x_n, "x_n")
    rx = math.sqrt(xn)

    def logpdf(c, x):
        p = full_probs(c)
        x = np.asarray(x, dtype=float)
        tot = np.sum(x, axis=-1)
        return (xn * math.log(p[-1]) + gammaln(tot + xn) - gammaln(xn)
                + np.sum(x * np.log(p[:-1]) - gammaln(x + 1), axis=-1))

    def metric(c):
        c = np.asarray(c, dtype=float)
        pn = 1.0 - c.sum(axis=-1)
        return (xn / pn)[..., None, None] * _categorical_metric(c)

    def sample_space(c, tail):
        pn = 1.0 - float(np.sum(c))
        # total count of the first n-1 outcomes is NB(x_n, p_n)
        top = _tail_cut(stats.nbinom(xn, pn), tail)
        return np.concatenate([_compositions(s, n - 1) for s in range(top + 1)])

    return FamilyDescriptor(
        name="negative_multinomial", dim=n - 1, hyper=(("categories", n), ("x_n", xn)),
        coord_names=_simplex_coord_names(n), kind="discrete",
        violation=_simplex_violation, inside=_simplex_inside, logpdf=logpdf,
        support_violation=lambda c, x: _count_vector_violation(x, n - 1),
        metric=metric,
        dist=lambda c1, c2: 2.0 * rx * _negmult_unit(c1, c2), path=_negmult_path,
        sampler=_simplex_sampler(n), sample_space=sample_space,
        parse=_simplex_parser(n), canonical=_simplex_canonical(n),
        description="2 sqrt(x_n) arccosh((1 - sum_{i<n} sqrt(p_i q_i)) / sqrt(p_n q_n))",
    )

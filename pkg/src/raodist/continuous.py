"""Continuous non-elliptical families.

One-parameter families (exponential, Rayleigh, Erlang) use their
arc-length coordinate.  The two-parameter families (log-Gaussian, inverse
Gaussian, Gumbel, Fréchet, Weibull, reversed Weibull, Pareto, power
function) carry a chart onto a scaled half-plane, and their distances are
computed there.

Fréchet and Weibull maps go through the Gumbel chart at
``(log beta, 1/lambda)`` and ``(-log beta, 1/lambda)``; this is the
change of sample space ``Y = log X`` (resp. ``-log X``), so the distances
coincide with the Gumbel ones to the last bit.
"""

from __future__ import annotations

import math

import numpy as np

from . import core
from .core import EULER_GAMMA, ChartMap, FamilyDescriptor, register
from .hyperbolic import log_ratio, scaled_geodesic, scaled_halfplane_distance

_ONE_MINUS_GAMMA = 1.0 - EULER_GAMMA
_GUMBEL_AB = math.pi ** 2 / 6.0
_PI_SQRT6 = math.pi / math.sqrt(6.0)


# -- shared plumbing ----------------------------------------------------------


def _positive_1d(name):
    def violation(c):
        if not c[0] > 0.0:
            return f"{name} must be positive"
        return None

    return violation


def _inside_positive(c):
    return np.all(np.asarray(c) > 0.0, axis=-1)


def _both_positive(n0, n1):
    def violation(c):
        if not c[0] > 0.0:
            return f"{n0} must be positive"
        if not c[1] > 0.0:
            return f"{n1} must be positive"
        return None

    return violation


def _second_positive(n1):
    def violation(c):
        if not c[1] > 0.0:
            return f"{n1} must be positive"
        return None

    return violation


def _inside_second(c):
    return np.asarray(c)[..., 1] > 0.0


def _scalar(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 0 or not math.isfinite(float(x)):
        return None
    return float(x)


def _support_positive(c, x):
    v = _scalar(x)
    if v is None or not v > 0.0:
        return "sample must be a positive real"
    return None


def _support_nonneg(c, x):
    v = _scalar(x)
    if v is None or v < 0.0:
        return "sample must be a non-negative real"
    return None


def _support_real(c, x):
    if _scalar(x) is None:
        return "sample must be a finite real"
    return None


def _support_negative(c, x):
    v = _scalar(x)
    if v is None or not v < 0.0:
        return "sample must be a negative real"
    return None


def charted(chart: ChartMap):
    """Distance and geodesic through a half-plane chart."""
    spec = (chart.a, chart.b)

    def dist(c1, c2):
        u1 = chart.to_chart(c1)
        u2 = chart.to_chart(c2)
        return scaled_halfplane_distance(spec, u1, u2)

    def path(c1, c2, ts):
        pts = scaled_geodesic(spec, chart.to_chart(c1), chart.to_chart(c2), ts)
        return chart.from_chart(pts)

    return dist, path


def _two_by_two(g00, g01, g11):
    def metric(c):
        c = np.asarray(c, dtype=float)
        out = np.empty(c.shape[:-1] + (2, 2))
        out[..., 0, 0] = g00(c)
        out[..., 0, 1] = out[..., 1, 0] = g01(c)
        out[..., 1, 1] = g11(c)
        return out

    return metric


def _logu(rng):
    return core.log_uniform(rng)


# -- one-parameter families ---------------------------------------------------


def _exponential_kl(c1, c2):
    r = c2[0] / c1[0]
    return r - 1.0 - math.log(r)


def _logdist(scale: float):
    def dist(c1, c2):
        return scale * log_ratio(c1[0], c2[0])

    return dist


@register("exponential")
def exponential() -> FamilyDescriptor:
    """Exponential with rate ``lambda``."""
    return FamilyDescriptor(
        name="exponential", dim=1, hyper=(), coord_names=("lambda",), kind="continuous",
        violation=_positive_1d("lambda"), inside=_inside_positive,
        logpdf=lambda c, x: math.log(c[0]) - c[0] * x,
        support_violation=_support_nonneg,
        metric=core.metric_1d(lambda lam: 1.0 / lam ** 2),
        dist=_logdist(1.0),
        path=core.linear_path(math.log, np.exp),
        sampler=lambda rng: np.array([_logu(rng)]),
        sample_space=lambda c: ("exp", 1.0 / c[0]),
        canonical=((1.0,), (math.e,)),
        kl=_exponential_kl,
        description="|log lambda1 - log lambda2|",
    )


@register("rayleigh")
def rayleigh() -> FamilyDescriptor:
    """Rayleigh with scale ``sigma``."""

    def logpdf(c, x):
        s = c[0]
        return np.log(x) - 2.0 * math.log(s) - x * x / (2.0 * s * s)

    return FamilyDescriptor(
        name="rayleigh", dim=1, hyper=(), coord_names=("sigma",), kind="continuous",
        violation=_positive_1d("sigma"), inside=_inside_positive, logpdf=logpdf,
        support_violation=_support_nonneg,
        metric=core.metric_1d(lambda s: 4.0 / s ** 2),
        dist=_logdist(2.0),
        path=core.linear_path(math.log, np.exp),
        sampler=lambda rng: np.array([_logu(rng)]),
        sample_space=lambda c: ("exp", c[0]),
        canonical=((1.0,), (2.0,)),
        description="2 |log sigma1 - log sigma2|",
    )


@register("erlang")
def erlang(k=1) -> FamilyDescriptor:
    """Erlang with integer shape ``k`` and rate ``lambda``."""
    k = core.positive_int(k, "k")
    rk = math.sqrt(k)
    lgk = math.lgamma(k)

    def logpdf(c, x):
        lam = c[0]
        return k * math.log(lam) + (k - 1) * np.log(x) - lam * x - lgk

    return FamilyDescriptor(
        name="erlang", dim=1, hyper=(("k", k),), coord_names=("lambda",), kind="continuous",
        violation=_positive_1d("lambda"), inside=_inside_positive, logpdf=logpdf,
        support_violation=_support_nonneg if k == 1 else _support_positive,
        metric=core.metric_1d(lambda lam: k / lam ** 2),
        dist=_logdist(rk),
        path=core.linear_path(math.log, np.exp),
        sampler=lambda rng: np.array([_logu(rng)]),
        sample_space=lambda c: ("exp", k / c[0]),
        canonical=((1.0,), (math.e,)),
        description="sqrt(k) |log lambda1 - log lambda2|",
    )


# -- log-Gaussian -------------------------------------------------------------


def _identity_chart(name, a, b):
    def to_chart(c):
        return np.asarray(c, dtype=float)

    return ChartMap(name, to_chart, to_chart, a, b)


def _location_scale_violation(c):
    if not c[1] > 0.0:
        return "sigma must be positive"
    return None


def _mean_scale_sampler(rng):
    return np.array([core.uniform_mean(rng), _logu(rng)])


@register("log_gaussian")
def log_gaussian() -> FamilyDescriptor:
    """Law of ``exp(Z)``, ``Z ~ N(mu, sigma**2)``."""
    chart = _identity_chart("log_gaussian", 1.0, 2.0)
    dist, path = charted(chart)
    half_log_2pi = 0.5 * math.log(2.0 * math.pi)

    def logpdf(c, x):
        mu, s = c
        lx = np.log(x)
        z = (lx - mu) / s
        return -lx - math.log(s) - half_log_2pi - 0.5 * z * z

    return FamilyDescriptor(
        name="log_gaussian", dim=2, hyper=(), coord_names=("mu", "sigma"), kind="continuous",
        violation=_location_scale_violation, inside=_inside_second, logpdf=logpdf,
        support_violation=_support_positive,
        metric=core.diag_metric(lambda c: 1.0 / c[..., 1] ** 2, lambda c: 2.0 / c[..., 1] ** 2),
        dist=dist, path=path, chart=chart,
        sampler=_mean_scale_sampler,
        sample_space=lambda c: ("exp", math.exp(c[0])),
        canonical=((2.0, 0.5), (5.0, 1.0)),
        description="Gaussian distance on (mu, sigma)",
    )


# -- inverse Gaussian -----------------------------------------------------------


def _ig_to_chart(c):
    c = np.asarray(c, dtype=float)
    lam, mu = c[..., 0], c[..., 1]
    return np.stack([np.sqrt(2.0 / mu), 1.0 / np.sqrt(lam)], axis=-1)


def _ig_from_chart(uv):
    uv = np.asarray(uv, dtype=float)
    u, v = uv[..., 0], uv[..., 1]
    return np.stack([1.0 / (v * v), 2.0 / (u * u)], axis=-1)


@register("inverse_gaussian")
def inverse_gaussian() -> FamilyDescriptor:
    """Inverse Gaussian with shape ``lambda`` and mean ``mu``.

    The chart ``(u, v) = (sqrt(2/mu), 1/sqrt(lambda))`` with ``a = b = 2``
    pulls back to ``diag(1/(2 lambda**2), lambda/mu**3)``.
    """
    chart = ChartMap("inverse_gaussian", _ig_to_chart, _ig_from_chart, 2.0, 2.0)
    dist, path = charted(chart)

    def logpdf(c, x):
        lam, mu = c
        return 0.5 * (math.log(lam) - math.log(2.0 * math.pi) - 3.0 * np.log(x)) - lam * (x - mu) ** 2 / (2.0 * mu * mu * x)

    return FamilyDescriptor(
        name="inverse_gaussian", dim=2, hyper=(), coord_names=("lambda", "mu"),
        kind="continuous",
        violation=_both_positive("lambda", "mu"), inside=_inside_positive, logpdf=logpdf,
        support_violation=_support_positive,
        metric=core.diag_metric(lambda c: 0.5 / c[..., 0] ** 2, lambda c: c[..., 0] / c[..., 1] ** 3),
        dist=dist, path=path, chart=chart,
        sampler=lambda rng: np.array([_logu(rng), _logu(rng)]),
        sample_space=lambda c: ("exp", c[1]),
        canonical=((2.0, 1.0), (2.0, 4.0)),
        description="2 sqrt(2) arctanh sqrt(...) in (sqrt(2/mu), 1/sqrt(lambda))",
    )


# -- Gumbel and its sample-space relatives ------------------------------------


def gumbel_to_chart(c):
    """``(mu, sigma) -> (mu - (1 - gamma) sigma, pi sigma / sqrt(6))``."""
    c = np.asarray(c, dtype=float)
    mu, s = c[..., 0], c[..., 1]
    return np.stack([mu - _ONE_MINUS_GAMMA * s, _PI_SQRT6 * s], axis=-1)


def gumbel_from_chart(uv):
    uv = np.asarray(uv, dtype=float)
    s = uv[..., 1] / _PI_SQRT6
    return np.stack([uv[..., 0] + _ONE_MINUS_GAMMA * s, s], axis=-1)


def _gumbel_metric(c):
    c = np.asarray(c, dtype=float)
    s2 = c[..., 1] ** 2
    out = np.empty(c.shape[:-1] + (2, 2))
    out[..., 0, 0] = 1.0 / s2
    out[..., 0, 1] = out[..., 1, 0] = (EULER_GAMMA - 1.0) / s2
    out[..., 1, 1] = ((EULER_GAMMA - 1.0) ** 2 + _GUMBEL_AB) / s2
    return out


@register("gumbel")
def gumbel() -> FamilyDescriptor:
    """Gumbel (maximum) with location ``mu`` and scale ``sigma``."""
    chart = ChartMap("gumbel", gumbel_to_chart, gumbel_from_chart, _GUMBEL_AB, _GUMBEL_AB)
    dist, path = charted(chart)

    def logpdf(c, x):
        mu, s = c
        z = (x - mu) / s
        with np.errstate(over="ignore"):
            return -math.log(s) - z - np.exp(-z)

    return FamilyDescriptor(
        name="gumbel", dim=2, hyper=(), coord_names=("mu", "sigma"), kind="continuous",
        violation=_location_scale_violation, inside=_inside_second, logpdf=logpdf,
        support_violation=_support_real, metric=_gumbel_metric,
        dist=dist, path=path, chart=chart, sampler=_mean_scale_sampler,
        sample_space=lambda c: ("sinh", c[0], c[1]),
        canonical=((0.0, 1.0), (1.0, 1.0)),
        description="sqrt(b) d_H in (mu - (1 - gamma) sigma, pi sigma / sqrt(6)), a = b = pi^2/6",
    )


def _frechet_to_chart(c):
    c = np.asarray(c, dtype=float)
    return gumbel_to_chart(np.stack([np.log(c[..., 0]), 1.0 / c[..., 1]], axis=-1))


def _frechet_from_chart(uv):
    g = gumbel_from_chart(uv)
    return np.stack([np.exp(g[..., 0]), 1.0 / g[..., 1]], axis=-1)


def _weibull_to_chart(c):
    c = np.asarray(c, dtype=float)
    return gumbel_to_chart(np.stack([-np.log(c[..., 0]), 1.0 / c[..., 1]], axis=-1))


def _weibull_from_chart(uv):
    g = gumbel_from_chart(uv)
    return np.stack([np.exp(-g[..., 0]), 1.0 / g[..., 1]], axis=-1)


def _shape_scale_metric(sign: float):
    # Frechet (sign=+1) and Weibull (sign=-1) in (beta, lambda)
    def metric(c):
        c = np.asarray(c, dtype=float)
        beta, lam = c[..., 0], c[..., 1]
        out = np.empty(c.shape[:-1] + (2, 2))
        out[..., 0, 0] = lam ** 2 / beta ** 2
        out[..., 0, 1] = out[..., 1, 0] = sign * _ONE_MINUS_GAMMA / beta
        out[..., 1, 1] = ((EULER_GAMMA - 1.0) ** 2 + _GUMBEL_AB) / lam ** 2
        return out

    return metric


@register("frechet")
def frechet() -> FamilyDescriptor:
    """Fréchet with scale ``beta`` and shape ``lambda``."""
    chart = ChartMap("frechet", _frechet_to_chart, _frechet_from_chart, _GUMBEL_AB, _GUMBEL_AB)
    dist, path = charted(chart)

    def logpdf(c, x):
        beta, lam = c
        lz = np.log(x / beta)
        return math.log(lam / beta) - (lam + 1.0) * lz - np.exp(-lam * lz)

    return FamilyDescriptor(
        name="frechet", dim=2, hyper=(), coord_names=("beta", "lambda"), kind="continuous",
        violation=_both_positive("beta", "lambda"), inside=_inside_positive, logpdf=logpdf,
        support_violation=_support_positive, metric=_shape_scale_metric(1.0),
        dist=dist, path=path, chart=chart,
        sampler=lambda rng: np.array([_logu(rng), _logu(rng)]),
        sample_space=lambda c: ("exp", c[0]),
        canonical=((1.0, 1.0), (math.e, 1.0)),
        description="Gumbel distance at (log beta, 1/lambda)",
    )


def _weibull_logpdf(c, x):
    beta, lam = c
    lz = np.log(x / beta)
    return math.log(lam / beta) + (lam - 1.0) * lz - np.exp(lam * lz)


@register("weibull")
def weibull() -> FamilyDescriptor:
    """Weibull with scale ``beta`` and shape ``lambda``."""
    chart = ChartMap("weibull", _weibull_to_chart, _weibull_from_chart, _GUMBEL_AB, _GUMBEL_AB)
    dist, path = charted(chart)
    return FamilyDescriptor(
        name="weibull", dim=2, hyper=(), coord_names=("beta", "lambda"), kind="continuous",
        violation=_both_positive("beta", "lambda"), inside=_inside_positive,
        logpdf=_weibull_logpdf,
        support_violation=_support_positive, metric=_shape_scale_metric(-1.0),
        dist=dist, path=path, chart=chart,
        sampler=lambda rng: np.array([_logu(rng), _logu(rng)]),
        sample_space=lambda c: ("exp", c[0]),
        canonical=((1.0, 2.0), (2.0, 2.0)),
        description="Gumbel distance at (-log beta, 1/lambda)",
    )


@register("reversed_weibull")
def reversed_weibull() -> FamilyDescriptor:
    """Law of ``-X`` for ``X`` Weibull; same geometry as the Weibull."""
    w = weibull()
    return FamilyDescriptor(
        name="reversed_weibull", dim=2, hyper=(), coord_names=w.coord_names,
        kind="continuous",
        violation=w.violation, inside=w.inside,
        logpdf=lambda c, x: _weibull_logpdf(c, -np.asarray(x, dtype=float)),
        support_violation=_support_negative, metric=w.metric,
        dist=w.dist, path=w.path, chart=w.chart, sampler=w.sampler,
        sample_space=lambda c: ("negexp", c[0]),
        canonical=w.canonical,
        description="alias of the Weibull distance",
    )


# -- Pareto and power function ------------------------------------------------


def _pareto_to_chart(c):
    c = np.asarray(c, dtype=float)
    return np.stack([np.log(c[..., 1]), 1.0 / c[..., 0]], axis=-1)


def _pareto_from_chart(uv):
    uv = np.asarray(uv, dtype=float)
    return np.stack([1.0 / uv[..., 1], np.exp(uv[..., 0])], axis=-1)


def _pareto_metric(c):
    c = np.asarray(c, dtype=float)
    theta, scale = c[..., 0], c[..., 1]
    out = np.zeros(c.shape[:-1] + (2, 2))
    out[..., 0, 0] = 1.0 / theta ** 2
    out[..., 1, 1] = theta ** 2 / scale ** 2
    return out


@register("pareto")
def pareto() -> FamilyDescriptor:
    """Pareto with shape ``theta`` and scale ``alpha``; support ``x >= alpha``."""
    chart = ChartMap("pareto", _pareto_to_chart, _pareto_from_chart, 1.0, 1.0)
    dist, path = charted(chart)

    def logpdf(c, x):
        theta, alpha = c
        return math.log(theta) + theta * math.log(alpha) - (theta + 1.0) * np.log(x)

    def support(c, x):
        v = _scalar(x)
        if v is None or v < c[1]:
            return f"sample must be >= alpha = {c[1]:g}"
        return None

    return FamilyDescriptor(
        name="pareto", dim=2, hyper=(), coord_names=("theta", "alpha"), kind="continuous",
        violation=_both_positive("theta", "alpha"), inside=_inside_positive, logpdf=logpdf,
        support_violation=support, metric=_pareto_metric,
        dist=dist, path=path, chart=chart,
        sampler=lambda rng: np.array([_logu(rng), _logu(rng)]),
        sample_space=lambda c: ("lower", c[1]),
        score_sides=(0, -1), fixed_support=False,
        canonical=((1.0, 1.0), (2.0, 1.0)),
        description="d_H in (log alpha, 1/theta)",
    )


def _power_to_chart(c):
    c = np.asarray(c, dtype=float)
    return np.stack([np.log(c[..., 1]), 1.0 / c[..., 0]], axis=-1)


@register("power_function")
def power_function() -> FamilyDescriptor:
    """Power function with exponent ``theta`` on ``(0, beta]``."""
    chart = ChartMap("power_function", _power_to_chart, _pareto_from_chart, 1.0, 1.0)
    dist, path = charted(chart)

    def logpdf(c, x):
        theta, beta = c
        return math.log(theta) - theta * math.log(beta) + (theta - 1.0) * np.log(x)

    def support(c, x):
        v = _scalar(x)
        if v is None or not (0.0 < v <= c[1]):
            return f"sample must lie in (0, beta = {c[1]:g}]"
        return None

    return FamilyDescriptor(
        name="power_function", dim=2, hyper=(), coord_names=("theta", "beta"),
        kind="continuous",
        violation=_both_positive("theta", "beta"), inside=_inside_positive, logpdf=logpdf,
        support_violation=support, metric=_pareto_metric,
        dist=dist, path=path, chart=chart,
        sampler=lambda rng: np.array([_logu(rng), _logu(rng)]),
        sample_space=lambda c: ("upper", c[1]),
        score_sides=(0, 1), fixed_support=False,
        canonical=((1.0, 1.0), (2.0, 1.0)),
        description="Pareto distance at (theta, 1/beta)",
    )

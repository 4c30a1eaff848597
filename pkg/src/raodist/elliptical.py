"""Univariate elliptical families ``p(x) = h(((x - mu) / sigma)**2) / sigma``.

For a density generator ``h`` the Fisher matrix is ``diag(a, b) / sigma**2``
with

    a = 4 int z**2 h'(z**2)**2 / h(z**2) dz
    b = 4 int z**4 h'(z**2)**2 / h(z**2) dz - 1,

so every instance is a scaled half-plane in ``(mu, sigma)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import core
from .core import ChartMap, FamilyDescriptor, register
from .errors import DomainError, QuadratureError, UnknownGeneratorError
from .hyperbolic import scaled_geodesic, scaled_halfplane_distance
from .oracle.quadrature import gk_integrate

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class EllipticalGenerator:
    """Density generator with its metric constants.

    Attributes
    ----------
    name : str
    log_h : callable
        Vectorised ``log h(u)`` for ``u >= 0``.
    a, b : float
        Metric constants, ``Fisher = diag(a, b) / sigma**2``.
    hyper : tuple
        Generator hyperparameters (``beta``, ``nu``), sorted pairs.
    """

    name: str
    log_h: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    hyper: tuple = ()

    def h(self, u):
        return np.exp(self.log_h(np.asarray(u)))

    def __repr__(self):
        return f"EllipticalGenerator({self.name!r}, a={self.a!r}, b={self.b!r})"


def _exp_nodes(s):
    """``z = e^s`` for integration nodes; nodes beyond ``|s| > 300`` are flagged.

    The map ``t = u / (1 - u**2)`` sends the outermost nodes far past the
    double range; the integrands are negligible there and are set to zero.
    """
    far = np.abs(s) > 300.0
    return np.exp(np.clip(s, -300.0, 300.0)), far


def _check_normalised(name: str, log_h) -> None:
    # integrand is even in z: integrate over (0, inf) with z = e^s
    def f(s):
        z, far = _exp_nodes(s)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(far, 0.0, np.exp(log_h(z * z)) * z)

    val, _ = gk_integrate(f, -np.inf, np.inf, abs_tol=1e-12)
    if abs(2.0 * val - 1.0) > 1e-8:
        raise DomainError(f"generator {name!r} is not normalised: integral = {2.0 * val!r}")


def make_generator(name: str, log_h, a: Optional[float] = None, b: Optional[float] = None,
                   hyper: tuple = ()) -> EllipticalGenerator:
    """Build a generator, checking its normalisation by quadrature.

    Missing constants are computed with :func:`elliptical_constants_numeric`.
    """
    _check_normalised(name, log_h)
    if a is None or b is None:
        a, b = elliptical_constants_numeric(lambda u: np.exp(log_h(u)), log_h=log_h)
    if not (a > 0.0 and b > 0.0):
        raise DomainError("generator constants must be positive")
    return EllipticalGenerator(name, log_h, float(a), float(b), hyper)


# -- named generators -------------------------------------------------------


def _gaussian_log_h(u):
    return -0.5 * u - 0.5 * _LOG_2PI


def _laplace_log_h(u):
    return math.log(0.5) - np.sqrt(u)


def _logistic_log_h(u):
    s = np.sqrt(u)
    return -s - 2.0 * np.log1p(np.exp(-s))


def _cauchy_log_h(u):
    return -math.log(math.pi) - np.log1p(u)


def _gg_log_h(beta: float):
    c = math.log(beta / (2.0 * math.gamma(1.0 / beta)))

    def log_h(u):
        return c - np.power(u, 0.5 * beta)

    return log_h


def _student_log_h(nu: float):
    c = math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu) - 0.5 * math.log(math.pi * nu)

    def log_h(u):
        return c - 0.5 * (nu + 1.0) * np.log1p(u / nu)

    return log_h


def _gg_beta(beta) -> float:
    beta = core.positive_real(beta, "beta")
    if not beta > 0.5:
        raise DomainError("beta must be > 1/2 (Gamma(2 - 1/beta) has a pole at beta = 1/2)")
    return beta


def elliptical_constants(name: str, **hyper) -> tuple:
    """Closed-form metric constants ``(a, b)`` of a named generator.

    Parameters
    ----------
    name : str
        One of ``gaussian``, ``laplace``, ``generalised_gaussian`` (needs
        ``beta``), ``logistic``, ``cauchy``, ``student_t`` (needs ``nu``).

    Raises
    ------
    UnknownGeneratorError
    """
    key = str(name).lower().replace("-", "_")
    if key == "gaussian":
        return 1.0, 2.0
    if key == "laplace":
        return 1.0, 1.0
    if key == "logistic":
        return 1.0 / 3.0, (math.pi ** 2 + 3.0) / 9.0
    if key == "cauchy":
        return 0.5, 0.5
    if key in ("generalised_gaussian", "generalized_gaussian"):
        beta = _gg_beta(hyper.get("beta", 2.0))
        return beta * math.gamma(2.0 - 1.0 / beta) / math.gamma(1.0 + 1.0 / beta), beta
    if key == "student_t":
        nu = core.positive_real(hyper.get("nu", 1.0), "nu")
        return (nu + 1.0) / (nu + 3.0), 2.0 * nu / (nu + 3.0)
    raise UnknownGeneratorError(f"unknown elliptical generator {name!r}")


@functools.lru_cache(maxsize=None)
def generator(name: str, **hyper) -> EllipticalGenerator:
    """Named generator with closed-form constants."""
    key = str(name).lower().replace("-", "_")
    a, b = elliptical_constants(key, **hyper)
    if key == "gaussian":
        return make_generator(key, _gaussian_log_h, a, b)
    if key == "laplace":
        return make_generator(key, _laplace_log_h, a, b)
    if key == "logistic":
        return make_generator(key, _logistic_log_h, a, b)
    if key == "cauchy":
        return make_generator(key, _cauchy_log_h, a, b)
    if key in ("generalised_gaussian", "generalized_gaussian"):
        beta = _gg_beta(hyper.get("beta", 2.0))
        return make_generator("generalised_gaussian", _gg_log_h(beta), a, b, (("beta", beta),))
    nu = core.positive_real(hyper.get("nu", 1.0), "nu")
    return make_generator("student_t", _student_log_h(nu), a, b, (("nu", nu),))


def elliptical_constants_numeric(h: Callable[[np.ndarray], np.ndarray],
                                 abs_tol: float = 1e-10, rel_step: float = 1e-6,
                                 log_h: Optional[Callable] = None,
                                 derivative: str = "complex") -> tuple:
    """Metric constants of a generator by quadrature of their definitions.

    Parameters
    ----------
    h : callable
        Vectorised generator ``h(u)``, ``u >= 0``.
    abs_tol : float
        Absolute tolerance on each constant.
    rel_step : float
        Relative step of the central difference (``derivative="central"``).
    log_h : callable, optional
        ``log h``; defaults to ``log(h(u))``.  Supplying it keeps far tails
        accurate where ``h`` underflows.
    derivative : {"complex", "central"}
        How ``d log h / du`` is obtained.  The complex step
        ``Im log h(u + i d) / d`` has no subtractive cancellation; it needs
        ``h`` to accept complex input and falls back to central differences
        otherwise.  Central differences lose accuracy where ``log h`` is
        nearly flat relative to its value (``u -> 0`` when ``h'`` is
        singular there, as for generalised Gaussians with ``beta < 2``).

    Notes
    -----
    The integrands are even in ``z``, so the integrals run over ``z > 0``
    with ``z = e^s``.  This also removes the ``|z|**(2 beta - 2)``
    singularity of generalised-Gaussian generators at the origin.  They are
    evaluated as ``exp(k s + 2 log|d log h / du| + log h)`` so no
    intermediate overflows.

    Raises
    ------
    QuadratureError
        If the tolerance cannot be reached.
    """
    if derivative not in ("complex", "central"):
        raise ValueError("derivative must be 'complex' or 'central'")
    if log_h is None:
        def log_h(u):
            with np.errstate(divide="ignore"):
                return np.log(h(u))

    def dlog_central(u):
        du = rel_step * u
        return (np.real(log_h(u + du)) - np.real(log_h(u - du))) / (2.0 * du)

    def dlog_complex(u):
        step = 1e-20 * u
        return np.imag(log_h(u + 1j * step)) / step

    dlog_fn = dlog_central
    if derivative == "complex":
        try:
            with np.errstate(all="ignore"):
                probe = dlog_complex(np.array([0.5, 1.0, 2.0]))
            if np.all(np.isfinite(probe)) and np.any(probe != 0.0):
                dlog_fn = dlog_complex
        except (TypeError, ValueError):
            pass

    def f(s):
        s = np.clip(s, -300.0, 300.0)
        u = np.exp(2.0 * s)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            lh = np.real(log_h(u))
            base = 2.0 * np.log(np.abs(dlog_fn(u))) + lh
            # z**2 h'^2/h dz = z**3 h'^2/h ds, and h'^2/h = (d log h)^2 h
            out = np.stack([np.exp(3.0 * s + base), np.exp(5.0 * s + base)], axis=-1)
        out[~np.isfinite(lh)] = 0.0
        return np.nan_to_num(out, nan=0.0, posinf=np.inf)

    val, err = gk_integrate(f, -np.inf, np.inf, abs_tol=abs_tol / 8.0)
    if not np.all(np.isfinite(val)):
        raise QuadratureError("generator integrals diverged")
    a = 8.0 * float(val[0])
    b = 8.0 * float(val[1]) - 1.0
    return a, b


def elliptical_fisher(g: EllipticalGenerator, p) -> np.ndarray:
    """``diag(a, b) / sigma**2`` at ``p = (mu, sigma)``."""
    mu, sigma = _location_scale(p)
    return np.diag([g.a / sigma ** 2, g.b / sigma ** 2])


def elliptical_distance(g: EllipticalGenerator, p, q) -> float:
    """Fisher-Rao distance between ``(mu1, sigma1)`` and ``(mu2, sigma2)``.

    Equal to ``2 sqrt(b) arctanh sqrt((a dmu**2 + b dsigma**2) /
    (a dmu**2 + b (sigma1 + sigma2)**2))``; at equal means it is
    ``sqrt(b) |log(sigma1 / sigma2)|``.
    """
    return scaled_halfplane_distance((g.a, g.b), _location_scale(p), _location_scale(q))


def _location_scale(p):
    from .core import ParamPoint

    if isinstance(p, ParamPoint):
        p = p.coords
    mu, sigma = (float(v) for v in p)
    if not sigma > 0.0:
        raise DomainError("sigma must be positive")
    return mu, sigma


# -- descriptors ------------------------------------------------------------


def _gaussian_kl(c1, c2):
    (m1, s1), (m2, s2) = c1, c2
    return math.log(s2 / s1) + (s1 * s1 + (m1 - m2) ** 2) / (2.0 * s2 * s2) - 0.5


def _violation(c):
    if not c[1] > 0.0:
        return "sigma must be positive"
    return None


def elliptical_family(g: EllipticalGenerator, name: Optional[str] = None, hyper: tuple = (),
                      kl=None, kink: bool = False) -> FamilyDescriptor:
    """Descriptor for the location-scale family of a generator.

    ``kink`` marks generators whose log-density is not smooth at ``x = mu``
    so the numerical oracle can keep its difference stencils off the cusp.
    """
    name = name or f"elliptical[{g.name}]"
    a, b = g.a, g.b
    spec = (a, b)
    log_h = g.log_h

    def to_chart(c):
        return np.asarray(c, dtype=float)

    def logpdf(c, x):
        mu, s = c
        z = (np.asarray(x, dtype=float) - mu) / s
        return log_h(z * z) - np.log(s)

    def metric(c):
        c = np.asarray(c, dtype=float)
        s2 = c[..., 1] ** 2
        out = np.zeros(c.shape[:-1] + (2, 2))
        out[..., 0, 0] = a / s2
        out[..., 1, 1] = b / s2
        return out

    def support(c, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 0 or not np.isfinite(x):
            return "sample must be a finite real"
        return None

    return FamilyDescriptor(
        name=name, dim=2, hyper=hyper, coord_names=("mu", "sigma"), kind="continuous",
        violation=_violation, inside=lambda c: np.asarray(c)[..., 1] > 0.0,
        logpdf=logpdf, support_violation=support, metric=metric,
        dist=lambda c1, c2: scaled_halfplane_distance(spec, c1, c2),
        path=lambda c1, c2, ts: scaled_geodesic(spec, c1, c2, ts),
        chart=ChartMap(name, to_chart, to_chart, a, b),
        sampler=lambda rng: np.array([core.uniform_mean(rng), core.log_uniform(rng)]),
        sample_space=(lambda c: ("sinh", c[0], c[1], "kink")) if kink
        else (lambda c: ("sinh", c[0], c[1])),
        canonical=((2.0, 0.5), (5.0, 1.0)),
        kl=kl,
        description=f"2 sqrt(b) arctanh sqrt(...), a = {a:.10g}, b = {b:.10g}",
    )


@register("gaussian")
def gaussian() -> FamilyDescriptor:
    """Normal distribution in ``(mu, sigma)``."""
    return elliptical_family(generator("gaussian"), "gaussian", kl=_gaussian_kl)


@register("laplace")
def laplace() -> FamilyDescriptor:
    """Laplace distribution ``exp(-|x - mu| / sigma) / (2 sigma)``."""
    return elliptical_family(generator("laplace"), "laplace", kink=True)


@register("logistic")
def logistic() -> FamilyDescriptor:
    return elliptical_family(generator("logistic"), "logistic")


@register("cauchy")
def cauchy() -> FamilyDescriptor:
    return elliptical_family(generator("cauchy"), "cauchy")


@register("generalised_gaussian")
def generalised_gaussian(beta=2.0) -> FamilyDescriptor:
    """Density ``beta / (2 sigma Gamma(1/beta)) exp(-(|x - mu| / sigma)**beta)``."""
    g = generator("generalised_gaussian", beta=_gg_beta(beta))
    return elliptical_family(g, "generalised_gaussian", hyper=g.hyper, kink=g.hyper[0][1] < 2.0)


@register("student_t")
def student_t(nu=1.0) -> FamilyDescriptor:
    """Location-scale Student-t with real ``nu > 0`` degrees of freedom."""
    g = generator("student_t", nu=core.positive_real(nu, "nu"))
    return elliptical_family(g, "student_t", hyper=g.hyper)

"""Fisher matrices from their defining expectations.

The score is taken by finite differences of the family's log-density, and
the expectation by truncated summation (discrete families) or adaptive
quadrature after a substitution that maps the support onto the real line
(continuous families).  Nothing here uses the analytic Fisher matrices,
so the results are an independent check on them.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..core import FamilyDescriptor, ParamPoint
from ..errors import QuadratureError, UnsupportedError
from .quadrature import QuadratureScheme, gk_integrate

_T_MAX = 700.0


def _steps(c: np.ndarray, rel: float) -> np.ndarray:
    return rel * np.maximum(np.abs(c), 1.0)


def _substitution(kind_spec):
    """Return ``(x(t), dx/dt(t), t_lo, t_hi)`` for a support description."""
    kind = kind_spec[0]
    if kind == "sinh":
        loc, scale = kind_spec[1], kind_spec[2]

        def x_of(t):
            return loc + scale * np.sinh(t)

        def jac(t):
            return scale * np.cosh(t)

        return x_of, jac, -np.inf, np.inf
    if kind == "exp":
        scale = kind_spec[1]
        return (lambda t: scale * np.exp(t)), (lambda t: scale * np.exp(t)), -np.inf, np.inf
    if kind == "negexp":
        scale = kind_spec[1]
        return (lambda t: -scale * np.exp(t)), (lambda t: scale * np.exp(t)), -np.inf, np.inf
    if kind == "lower":
        lo = kind_spec[1]
        return (lambda t: lo * np.exp(t)), (lambda t: lo * np.exp(t)), 0.0, np.inf
    if kind == "upper":
        hi = kind_spec[1]
        return (lambda t: hi * np.exp(-t)), (lambda t: hi * np.exp(-t)), 0.0, np.inf
    raise ValueError(f"unknown support substitution {kind!r}")


COMPLEX_STEP = 1e-100


def _score_fn(fam: FamilyDescriptor, c: np.ndarray, rel_step: float, kink: Optional[float] = None):
    """Vectorised score ``x -> (dim, n)`` by finite differences in the coordinates.

    A ``kink`` is the sample location of a cusp in the log-density (Laplace
    and generalised Gaussian at ``x = mu``).  A real stencil straddling the cusp
    costs an error of order ``step**(2 beta - 1)``, so the score is taken
    by a complex step instead, which needs the log-density to accept
    complex coordinates.
    """
    h = _steps(c, rel_step)
    sides = fam.sides()

    def logp(cc, x):
        return np.asarray(fam.logpdf(cc, x), dtype=float)

    def score(x, base=None):
        if base is None:
            base = logp(c, x)
        rows = []
        for i in range(fam.dim):
            if kink is not None:
                e = np.zeros(fam.dim, dtype=complex)
                e[i] = 1j * COMPLEX_STEP
                d = np.imag(fam.logpdf(c + e, x)) / COMPLEX_STEP
                # samples that round onto the cusp sit on the branch cut
                rows.append(np.where(x == kink, 0.0, d))
                continue
            e = np.zeros(fam.dim)
            e[i] = h[i]
            if sides[i] == 0:
                d = (logp(c + e, x) - logp(c - e, x)) / (2.0 * h[i])
            elif sides[i] < 0:
                d = (3.0 * base - 4.0 * logp(c - e, x) + logp(c - 2.0 * e, x)) / (2.0 * h[i])
            else:
                d = (-3.0 * base + 4.0 * logp(c + e, x) - logp(c + 2.0 * e, x)) / (2.0 * h[i])
            rows.append(d)
        return np.stack(rows)

    return logp, score


def _upper_pairs(dim: int):
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def _assemble(dim: int, vals) -> np.ndarray:
    g = np.zeros((dim, dim))
    for k, (i, j) in enumerate(_upper_pairs(dim)):
        g[i, j] = g[j, i] = vals[k]
    return g


def _check_family(p: ParamPoint) -> FamilyDescriptor:
    fam = p.family
    if fam.kind == "matrix":
        raise UnsupportedError("quadrature over matrix spaces is not provided")
    if fam.sample_space is None:
        raise UnsupportedError(f"{fam.name} has no oracle support description")
    return fam


def numeric_fisher_expectation(p: ParamPoint, scheme: Optional[QuadratureScheme] = None,
                               rel_step: float = 1e-6, rel_tol: float = 1e-10) -> np.ndarray:
    """Fisher matrix ``E[d_i l d_j l]`` by summation or quadrature.

    Parameters
    ----------
    p : ParamPoint
    scheme : QuadratureScheme, optional
        Tolerances; the default uses ``abs_tol=1e-10`` and tail mass 1e-12.
    rel_step : float
        Relative finite-difference step for the score.  Families whose
        support depends on a parameter use one-sided second-order stencils
        in that coordinate; families with a cusp use a complex step.
    rel_tol : float
        Relative tolerance added to ``abs_tol``.  The score carries
        rounding noise of roughly ``1e-16 |l| / step``, so a pure absolute
        target is unreachable for large Fisher entries.

    Raises
    ------
    UnsupportedError
        For matrix families.
    QuadratureError
        If the integrals do not converge.
    """
    fam = _check_family(p)
    scheme = scheme or QuadratureScheme()
    c = p.array
    logp, score = _score_fn(fam, c, rel_step)
    pairs = _upper_pairs(fam.dim)
    if fam.kind == "discrete":
        xs = np.asarray(fam.sample_space(c, scheme.tail), dtype=float)
        base = logp(c, xs)
        w = np.exp(base)
        s = score(xs, base)
        vals = [float(np.sum(w * s[i] * s[j])) for i, j in pairs]
        return _assemble(fam.dim, vals)

    spec = fam.sample_space(c)
    x_of, jac, lo, hi = _substitution(spec)
    if spec[-1] == "kink":
        if any(fam.sides()):
            raise UnsupportedError("one-sided stencils cannot be combined with a kink")
        logp, score = _score_fn(fam, c, rel_step, kink=spec[1])

    def integrand(t):
        t = np.clip(t, -_T_MAX, _T_MAX)
        with np.errstate(all="ignore"):
            x = x_of(t)
            base = logp(c, x)
            w = np.exp(base) * jac(t)
            s = score(x, base)
            out = np.stack([w * s[i] * s[j] for i, j in pairs], axis=-1)
        bad = ~np.isfinite(base) | ~(w > 0.0) | ~np.all(np.isfinite(out), axis=-1)
        out[bad] = 0.0
        return out

    val, _ = gk_integrate(integrand, lo, hi, abs_tol=scheme.abs_tol, rel_tol=rel_tol,
                          max_subdivisions=scheme.max_subdivisions)
    if not np.all(np.isfinite(val)):
        raise QuadratureError("Fisher integrals diverged")
    return _assemble(fam.dim, val)


def numeric_fisher_hessian(p: ParamPoint, scheme: Optional[QuadratureScheme] = None,
                           rel_step: float = 1e-4, rel_tol: float = 1e-6) -> np.ndarray:
    """Fisher matrix ``-E[d_i d_j l]`` from second differences.

    Raises
    ------
    UnsupportedError
        For families whose support depends on the parameters (Pareto, power
        function), where the identity with the expectation form fails, for
        log-densities with a cusp (Laplace, generalised Gaussian with
        ``beta < 2``) and for matrix families.
    """
    fam = _check_family(p)
    if not fam.fixed_support:
        raise UnsupportedError(
            f"{fam.name}: support depends on the parameters, so the Hessian form "
            "does not give the Fisher metric"
        )
    c = p.array
    if fam.kind == "continuous" and fam.sample_space(c)[-1] == "kink":
        raise UnsupportedError(
            f"{fam.name}: the log-density is not twice differentiable at the location"
        )
    scheme = scheme or QuadratureScheme()
    h = _steps(c, rel_step)
    pairs = _upper_pairs(fam.dim)

    def logp(cc, x):
        return np.asarray(fam.logpdf(cc, x), dtype=float)

    def neg_hess(x, base):
        out = []
        for i, j in pairs:
            ei = np.zeros(fam.dim)
            ei[i] = h[i]
            if i == j:
                d2 = (logp(c + ei, x) - 2.0 * base + logp(c - ei, x)) / (h[i] * h[i])
            else:
                ej = np.zeros(fam.dim)
                ej[j] = h[j]
                d2 = (logp(c + ei + ej, x) - logp(c + ei - ej, x)
                      - logp(c - ei + ej, x) + logp(c - ei - ej, x)) / (4.0 * h[i] * h[j])
            out.append(-d2)
        return np.stack(out)

    if fam.kind == "discrete":
        xs = np.asarray(fam.sample_space(c, scheme.tail), dtype=float)
        base = logp(c, xs)
        w = np.exp(base)
        hs = neg_hess(xs, base)
        return _assemble(fam.dim, [float(np.sum(w * hs[k])) for k in range(len(pairs))])

    x_of, jac, lo, hi = _substitution(fam.sample_space(c))

    def integrand(t):
        t = np.clip(t, -_T_MAX, _T_MAX)
        with np.errstate(all="ignore"):
            x = x_of(t)
            base = logp(c, x)
            w = np.exp(base) * jac(t)
            out = (w[None, :] * neg_hess(x, base)).T
        bad = ~np.isfinite(base) | ~(w > 0.0) | ~np.all(np.isfinite(out), axis=-1)
        out[bad] = 0.0
        return out

    val, _ = gk_integrate(integrand, lo, hi, abs_tol=scheme.abs_tol, rel_tol=rel_tol,
                          max_subdivisions=scheme.max_subdivisions)
    return _assemble(fam.dim, val)


def relative_error(numeric: np.ndarray, analytic: np.ndarray) -> float:
    """Frobenius-norm relative error."""
    return float(np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic))


def max_relative_entry_error(numeric: np.ndarray, analytic: np.ndarray) -> float:
    """Largest entry error relative to the matrix norm."""
    return float(np.max(np.abs(numeric - analytic)) / max(np.linalg.norm(analytic), math.ulp(1.0)))

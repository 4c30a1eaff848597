"""Numerical geodesics from the analytic Fisher metric alone.

The boundary-value solver minimises a discrete energy over a polyline with
fixed endpoints.  Segment energies use Simpson's rule on the metric along
each chord.  Descent uses the block-tridiagonal energy Hessian (falling
back to its Gauss-Newton part when the Hessian is indefinite), and the step
is chosen by Armijo backtracking that keeps every knot inside the domain.  The length of the converged polyline
over-estimates the distance by ``O(N**-2)``, and one Richardson step with
the half-resolution solution removes that term.

A shooting method (RK4 on the geodesic equation, Newton on the initial
velocity) and a geodesic-equation residual make independent checks.
Christoffel symbols come from finite differences of the metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .. import core
from ..core import FamilyDescriptor, ParamPoint
from ..errors import DomainError, NonConvergenceError, UnsupportedError

FD_REL_STEP = 1e-5
ARMIJO = 1e-4
MAX_BVP_DIM = 3


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """A polyline of knots on one manifold, shape ``(n + 1, dim)``."""

    family: FamilyDescriptor
    knots: np.ndarray

    def __post_init__(self):
        k = np.array(self.knots, dtype=float)
        if k.ndim != 2 or k.shape[0] < 2 or k.shape[1] != self.family.dim:
            raise DomainError(f"knots must have shape (n + 1, {self.family.dim}) with n >= 1")
        if not np.all(self.family.inside(k)):
            raise DomainError("every knot must lie inside the parameter domain")
        k.setflags(write=False)
        object.__setattr__(self, "knots", k)

    @classmethod
    def from_points(cls, points: Sequence[ParamPoint]) -> "GeodesicPath":
        points = list(points)
        if len(points) < 2:
            raise DomainError("a path needs at least two points")
        fam = points[0].family
        if any(pt.family != fam for pt in points):
            raise DomainError("all points of a path must share one family")
        return cls(fam, np.array([pt.coords for pt in points], dtype=float))

    def points(self) -> list:
        return [ParamPoint(self.family, tuple(float(v) for v in row)) for row in self.knots]

    def length(self) -> float:
        return path_length(self)


def path_length(path) -> float:
    """Length of a polyline with the metric evaluated at segment midpoints.

    Parameters
    ----------
    path : GeodesicPath or sequence of ParamPoint
    """
    if not isinstance(path, GeodesicPath):
        path = GeodesicPath.from_points(path)
    x = path.knots
    d = np.diff(x, axis=0)
    g = np.asarray(path.family.metric(0.5 * (x[1:] + x[:-1])), dtype=float)
    q = np.einsum("ki,kij,kj->k", d, g, d)
    return float(np.sum(np.sqrt(np.maximum(q, 0.0))))


# -- metric derivatives -------------------------------------------------------


def _metric_with_derivs(fam: FamilyDescriptor, x: np.ndarray, rel: float = FD_REL_STEP):
    """Metric ``(k, d, d)`` and ``dG[:, l] = d G / d x_l`` ``(k, d, d, d)``."""
    k, d = x.shape
    h = rel * np.maximum(np.abs(x), 1.0)
    blocks = [x]
    for l in range(d):
        e = np.zeros_like(x)
        e[:, l] = h[:, l]
        blocks.extend((x + e, x - e))
    g_all = np.asarray(fam.metric(np.concatenate(blocks)), dtype=float)
    g = g_all[:k]
    dg = np.empty((k, d, d, d))
    for l in range(d):
        plus = g_all[(1 + 2 * l) * k:(2 + 2 * l) * k]
        minus = g_all[(2 + 2 * l) * k:(3 + 2 * l) * k]
        dg[:, l] = (plus - minus) / (2.0 * h[:, l, None, None])
    return g, dg


def _christoffel_batch(fam: FamilyDescriptor, x: np.ndarray, rel: float = FD_REL_STEP):
    g, dg = _metric_with_derivs(fam, x, rel)
    ginv = np.linalg.inv(g)
    # first kind: [ij, l] = d_i g_jl + d_j g_il - d_l g_ij
    first = (np.einsum("kijl->klij", dg) + np.einsum("kjil->klij", dg) - dg)
    return 0.5 * np.einsum("kml,klij->kmij", ginv, first)


def christoffel_fd(p: ParamPoint, step: Optional[float] = None) -> np.ndarray:
    """Christoffel symbols ``Gamma[k, i, j]`` by central differences.

    The default step in each coordinate is ``max(1e-5, 1e-5 * |c|)``.
    """
    x = p.array[None, :]
    if step is None:
        return _christoffel_batch(p.family, x)[0]
    g_fam = p.family
    d = g_fam.dim
    blocks = [x]
    for l in range(d):
        e = np.zeros_like(x)
        e[0, l] = step
        blocks.extend((x + e, x - e))
    g_all = np.asarray(g_fam.metric(np.concatenate(blocks)), dtype=float)
    dg = np.stack([(g_all[1 + 2 * l] - g_all[2 + 2 * l]) / (2.0 * step) for l in range(d)])
    ginv = np.linalg.inv(g_all[0])
    first = np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    return 0.5 * np.einsum("ml,lij->mij", ginv, first)


# -- boundary-value solver ---------------------------------------------------


@dataclass
class BVPResult:
    """Outcome of :func:`solve_geodesic_bvp`.

    Attributes
    ----------
    distance : float
        Richardson-extrapolated length (or the raw length when
        extrapolation is off).
    length : float
        Simpson length of the converged ``knots``-segment polyline; an
        over-estimate of the distance.
    path : GeodesicPath
    iterations : int
        Descent iterations summed over both resolutions.
    """

    distance: float
    length: float
    path: GeodesicPath
    iterations: int
    lengths: dict = field(default_factory=dict)


def _segment_weights(fam, x):
    mid = 0.5 * (x[1:] + x[:-1])
    a = np.asarray(fam.metric(x), dtype=float)
    m = np.asarray(fam.metric(mid), dtype=float)
    return a, m, (a[:-1] + 4.0 * m + a[1:]) / 6.0


def _energy(fam, x, n):
    d = np.diff(x, axis=0)
    _, _, w = _segment_weights(fam, x)
    return float(n * np.einsum("ki,kij,kj->", d, w, d))


def _simpson_length(fam, x):
    d = np.diff(x, axis=0)
    a, m, _ = _segment_weights(fam, x)

    def speed(g, dd):
        return np.sqrt(np.maximum(np.einsum("ki,kij,kj->k", dd, g, dd), 0.0))

    seg = (speed(a[:-1], d) + 4.0 * speed(m, d) + speed(a[1:], d)) / 6.0
    return float(np.sum(seg))


def _valid(fam, x):
    if not np.all(np.isfinite(x)):
        return False
    mid = 0.5 * (x[1:] + x[:-1])
    return bool(np.all(fam.inside(x)) and np.all(fam.inside(mid)))


def _gradient_and_model(fam, x, n):
    """Energy gradient on interior knots and the Gauss-Newton matrix."""
    npts, dim = x.shape
    d = np.diff(x, axis=0)
    mid = 0.5 * (x[1:] + x[:-1])
    a, da = _metric_with_derivs(fam, x)
    m, dm = _metric_with_derivs(fam, mid)
    w = (a[:-1] + 4.0 * m + a[1:]) / 6.0
    wd = np.einsum("kij,kj->ki", w, d)
    # q[k, l] = d_k^T (dG/dx_l) d_k for each segment and each metric sample
    qa_prev = np.einsum("ki,klij,kj->kl", d, da[1:], d)    # A_{k+1} seen from segment k
    qa_next = np.einsum("ki,klij,kj->kl", d, da[:-1], d)   # A_k seen from segment k
    qm = np.einsum("ki,klij,kj->kl", d, dm, d)
    grad = n * (
        2.0 * wd[:-1] - 2.0 * wd[1:]
        + (qa_prev[:-1] + qa_next[1:]) / 6.0
        + (qm[:-1] + qm[1:]) / 3.0
    )
    inner = npts - 2
    h = np.zeros((inner * dim, inner * dim))
    for j in range(inner):
        s = slice(j * dim, (j + 1) * dim)
        h[s, s] = 2.0 * n * (w[j] + w[j + 1])
        if j + 1 < inner:
            t = slice((j + 1) * dim, (j + 2) * dim)
            h[s, t] = h[t, s] = -2.0 * n * w[j + 1]
    energy = float(n * np.sum(wd * d))
    return energy, grad, h


def _newton_matrix(fam, x, n, grad, rel=1e-6):
    """Exact energy Hessian on interior knots by differencing the gradient.

    The gradient at knot ``j`` depends only on knots ``j - 1 .. j + 1``, so
    perturbing every third knot at once recovers the block-tridiagonal
    Hessian from ``3 * dim`` gradient evaluations.
    """
    inner, dim = grad.shape
    h = np.zeros((inner * dim, inner * dim))
    for colour in range(3):
        idx = np.arange(colour, inner, 3)
        for l in range(dim):
            eps = rel * np.maximum(np.abs(x[1 + idx, l]), 1.0)
            xp = x.copy()
            xp[1 + idx, l] += eps
            if not _valid(fam, xp):
                return None
            _, gp, _ = _gradient_and_model(fam, xp, n)
            diff = gp - grad
            for j, e in zip(idx, eps):
                col = j * dim + l
                for r in range(max(j - 1, 0), min(j + 2, inner)):
                    h[r * dim:(r + 1) * dim, col] = diff[r] / e
    return 0.5 * (h + h.T)


def _minimise(fam, x, max_iter, tol):
    n = x.shape[0] - 1
    dim = x.shape[1]
    for it in range(1, max_iter + 1):
        energy, grad, gn = _gradient_and_model(fam, x, n)
        # Gauss-Newton misses the curvature term of the second variation,
        # which dominates on long geodesics; prefer the full Hessian when
        # it is positive-definite
        h = _newton_matrix(fam, x, n, grad)
        try:
            chol = np.linalg.cholesky(h) if h is not None else None
        except np.linalg.LinAlgError:
            chol = None
        if chol is not None:
            y = np.linalg.solve(chol, grad.ravel())
            step = np.linalg.solve(chol.T, y).reshape(-1, dim)
        else:
            step = np.linalg.solve(gn, grad.ravel()).reshape(-1, dim)
        decrement = float(np.dot(grad.ravel(), step.ravel()))
        if decrement <= tol * energy:
            return x, it
        alpha = 1.0
        for _ in range(60):
            trial = x.copy()
            trial[1:-1] -= alpha * step
            if _valid(fam, trial):
                e_new = _energy(fam, trial, n)
                if np.isfinite(e_new) and e_new <= energy - ARMIJO * alpha * decrement:
                    break
            alpha *= 0.5
        else:
            # rounding floor: the model predicts less than the energy's own noise
            if decrement <= 1e-9 * energy:
                return x, it
            raise NonConvergenceError(
                f"line search failed (Newton decrement {decrement:.3g}, energy {energy:.6g})"
            )
        x = trial
    raise NonConvergenceError(f"geodesic solver did not converge in {max_iter} iterations")


def _refine(x):
    out = np.empty((2 * x.shape[0] - 1, x.shape[1]))
    out[0::2] = x
    out[1::2] = 0.5 * (x[1:] + x[:-1])
    return out


def solve_geodesic_bvp(p: ParamPoint, q: ParamPoint, knots: int = 64, iters: int = 5000,
                       tol: float = 1e-13, extrapolate: bool = True) -> BVPResult:
    """Minimum-energy polyline between ``p`` and ``q``.

    Parameters
    ----------
    knots : int
        Number of segments at the final resolution; must be even when
        ``extrapolate`` is set.
    iters : int
        Iteration cap per resolution.
    tol : float
        Stop when the Gauss-Newton decrement falls below ``tol * energy``.
    extrapolate : bool
        Combine the ``knots`` and ``knots / 2`` lengths as ``(4 L_N - L_{N/2}) / 3``.

    Raises
    ------
    UnsupportedError
        For manifolds of dimension above 3.
    NonConvergenceError
        If the descent stalls or hits ``iters``.
    """
    fam = core._same_family(p, q)
    if fam.dim > MAX_BVP_DIM:
        raise UnsupportedError(f"the BVP oracle handles dimension <= {MAX_BVP_DIM}, got {fam.dim}")
    knots = core.positive_int(knots, "knots", minimum=2)
    if extrapolate and knots % 2:
        raise DomainError("knots must be even when extrapolating")
    a, b = p.array, q.array
    if np.array_equal(a, b):
        path = GeodesicPath(fam, np.stack([a, b]))
        return BVPResult(0.0, 0.0, path, 0)
    start = knots // 2 if extrapolate else knots
    ts = np.linspace(0.0, 1.0, start + 1)[:, None]
    x = (1.0 - ts) * a + ts * b
    if not _valid(fam, x):
        raise DomainError("the straight segment between the endpoints leaves the domain")
    x, total = _minimise(fam, x, iters, tol)
    lengths = {start: _simpson_length(fam, x)}
    if extrapolate:
        x, it = _minimise(fam, _refine(x), iters, tol)
        total += it
        lengths[knots] = _simpson_length(fam, x)
        dist = (4.0 * lengths[knots] - lengths[start]) / 3.0
    else:
        dist = lengths[knots]
    return BVPResult(float(dist), lengths[knots], GeodesicPath(fam, x), total, lengths)


def geodesic_bvp_distance(p: ParamPoint, q: ParamPoint, knots: int = 64,
                          iters: int = 5000) -> float:
    """Distance estimate from :func:`solve_geodesic_bvp`."""
    return solve_geodesic_bvp(p, q, knots=knots, iters=iters).distance


# -- shooting ----------------------------------------------------------------


def _flow(fam, x0, v0, steps):
    """RK4 integration of the geodesic equation over ``t in [0, 1]``.

    ``x0``, ``v0`` have shape ``(m, d)``; returns end positions and a mask
    of trajectories that stayed inside the domain.
    """
    dt = 1.0 / steps
    x, v = x0.copy(), v0.copy()
    ok = np.ones(x.shape[0], dtype=bool)

    def acc(xx, vv):
        safe = fam.inside(xx)
        out = np.zeros_like(xx)
        if np.any(safe):
            gam = _christoffel_batch(fam, xx[safe])
            out[safe] = -np.einsum("kmij,ki,kj->km", gam, vv[safe], vv[safe])
        return out, safe

    for _ in range(steps):
        a1, s1 = acc(x, v)
        x2, v2 = x + 0.5 * dt * v, v + 0.5 * dt * a1
        a2, s2 = acc(x2, v2)
        x3, v3 = x + 0.5 * dt * v2, v + 0.5 * dt * a2
        a3, s3 = acc(x3, v3)
        x4, v4 = x + dt * v3, v + dt * a3
        a4, s4 = acc(x4, v4)
        ok &= s1 & s2 & s3 & s4
        x = x + dt * (v + 2.0 * v2 + 2.0 * v3 + v4) / 6.0
        v = v + dt * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        ok &= np.all(np.isfinite(x), axis=1)
        # frozen trajectories stop drifting out of the domain
        x[~ok] = x0[~ok]
        v[~ok] = 0.0
    return x, ok


def shoot_distance(p: ParamPoint, q: ParamPoint, steps: int = 256, max_iter: int = 50,
                   tol: float = 1e-10, v0=None) -> float:
    """Distance by shooting: Newton iteration on the initial velocity.

    Parameters
    ----------
    steps : int
        RK4 steps over the unit time interval.
    tol : float
        Relative endpoint mismatch at which the iteration stops.
    v0 : array_like, optional
        Starting velocity; defaults to ``q - p`` in coordinates.

    Returns
    -------
    float
        ``sqrt(v0^T G(p) v0)`` for the converged initial velocity.
    """
    fam = core._same_family(p, q)
    a, b = p.array, q.array
    if np.array_equal(a, b):
        return 0.0
    dim = fam.dim
    v = (b - a) if v0 is None else np.asarray(v0, dtype=float).copy()
    scale = max(float(np.linalg.norm(b - a)), 1e-300)
    fd = 1e-7

    def residuals(vs):
        end, ok = _flow(fam, np.tile(a, (vs.shape[0], 1)), vs, steps)
        return end - b, ok

    res, ok = residuals(v[None, :])
    if not ok[0]:
        raise NonConvergenceError("initial shot leaves the domain")
    r = res[0]
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * scale:
            g = np.asarray(fam.metric(a), dtype=float)
            return float(np.sqrt(v @ g @ v))
        hs = fd * np.maximum(np.abs(v), np.linalg.norm(v))
        probes = v[None, :] + np.diag(hs)
        pr, pok = residuals(probes)
        if not np.all(pok):
            raise NonConvergenceError("finite-difference shot left the domain")
        jac = (pr - r[None, :]).T / hs[None, :]
        dv = np.linalg.solve(jac, -r)
        lam = 1.0
        for _ in range(30):
            trial = v + lam * dv
            tr, tok = residuals(trial[None, :])
            if tok[0] and np.linalg.norm(tr[0]) < np.linalg.norm(r):
                break
            lam *= 0.5
        else:
            raise NonConvergenceError("shooting stalled")
        v, r = trial, tr[0]
    raise NonConvergenceError(f"shooting did not converge in {max_iter} iterations")


def geodesic_ode_residual(p: ParamPoint, q: ParamPoint, n: int = 100,
                          eta: float = 1e-4) -> float:
    """Largest geodesic curvature along the closed-form path.

    The closed-form paths need not have constant speed, so the acceleration
    ``x'' + Gamma(x', x')`` is only required to be parallel to ``x'``.  The
    returned value is the maximum over ``n`` interior samples of
    ``|a_perp|_G / |x'|_G**2``, which is zero for an exact geodesic.
    """
    fam = core._same_family(p, q)
    ts = np.linspace(0.01, 0.99, n)
    all_ts = np.concatenate([ts - eta, ts, ts + eta])
    xs = core.geodesic_array(p, q, all_ts)
    xm, x0, xp = xs[:n], xs[n:2 * n], xs[2 * n:]
    vel = (xp - xm) / (2.0 * eta)
    acc = (xp - 2.0 * x0 + xm) / (eta * eta)
    gam = _christoffel_batch(fam, x0)
    a = acc + np.einsum("kmij,ki,kj->km", gam, vel, vel)
    g = np.asarray(fam.metric(x0), dtype=float)
    vv = np.einsum("ki,kij,kj->k", vel, g, vel)
    av = np.einsum("ki,kij,kj->k", a, g, vel)
    perp = a - (av / vv)[:, None] * vel
    pp = np.einsum("ki,kij,kj->k", perp, g, perp)
    return float(np.max(np.sqrt(np.maximum(pp, 0.0)) / vv))

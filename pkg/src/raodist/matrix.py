"""Wishart and inverse-Wishart manifolds on the SPD cone.

Coordinates are the half-vectorisation ``nu(Sigma)`` (upper triangle, row
by row, which equals the lower triangle column by column).  The Fisher
matrix is ``(n/2) D^T (Sigma^-1 kron Sigma^-1) D`` with ``D`` the
duplication matrix, and the distance is ``sqrt(n/2) * sqrt(sum log(l_k)**2)``
over the eigenvalues of ``Sigma1^-1/2 Sigma2 Sigma1^-1/2``.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import multigammaln

from . import core
from .core import FamilyDescriptor, register
from .errors import DimensionError, DomainError

SYM_TOL = 1e-12
EIG_FLOOR = 1e-300


@functools.lru_cache(maxsize=None)
def _duplication(m: int) -> np.ndarray:
    d = np.zeros((m * m, m * (m + 1) // 2))
    for j in range(m):
        for i in range(m):
            lo, hi = min(i, j), max(i, j)
            col = lo * m - lo * (lo - 1) // 2 + (hi - lo)
            # vec is column-major: entry (i, j) sits at row j*m + i
            d[j * m + i, col] = 1.0
    d.setflags(write=False)
    return d


def duplication_matrix(m: int) -> np.ndarray:
    """The ``m**2 x m(m+1)/2`` matrix with ``D @ vech(A) == vec(A)``."""
    m = core.positive_int(m, "m")
    return _duplication(m).copy()


def vech(a) -> np.ndarray:
    """Half-vectorisation of a symmetric matrix (upper triangle, row-major)."""
    a = np.asarray(a, dtype=float)
    iu = np.triu_indices(a.shape[-1])
    return a[..., iu[0], iu[1]]


def unvech(v, m: int = None) -> np.ndarray:
    """Inverse of :func:`vech` for arrays of shape ``(..., m(m+1)/2)``."""
    v = np.asarray(v, dtype=float)
    k = v.shape[-1]
    if m is None:
        m = int(round((math.sqrt(8 * k + 1) - 1) / 2))
    if m * (m + 1) // 2 != k:
        raise DimensionError(f"{k} entries do not form a half-vectorised symmetric matrix")
    out = np.zeros(v.shape[:-1] + (m, m))
    iu = np.triu_indices(m)
    out[..., iu[0], iu[1]] = v
    out[..., iu[1], iu[0]] = v
    return out


def vec(a) -> np.ndarray:
    """Column-major vectorisation."""
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def as_spd(a, name: str = "matrix") -> np.ndarray:
    """Validate a symmetric positive-definite matrix.

    Raises
    ------
    DomainError
        If ``a`` is not square, not symmetric within 1e-12 (relative to its
        largest entry) or not positive-definite.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be a square matrix")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must have finite entries")
    scale = max(float(np.max(np.abs(a))), 1.0)
    if np.max(np.abs(a - a.T)) > SYM_TOL * scale:
        raise DomainError(f"{name} must be symmetric")
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise DomainError(f"{name} must be positive-definite") from None
    return 0.5 * (a + a.T)


def wishart_fisher(sigma, n: float) -> np.ndarray:
    """``(n/2) D^T (Sigma^-1 kron Sigma^-1) D``."""
    s = as_spd(sigma, "Sigma")
    m = s.shape[0]
    n = _dof(n, m)
    return _fisher_batch(vech(s)[None, :], m, n)[0]


def _fisher_batch(coords: np.ndarray, m: int, n: float) -> np.ndarray:
    d = _duplication(m)
    inv = np.linalg.inv(unvech(coords, m))
    k = m * m
    kron = np.einsum("...ij,...kl->...ikjl", inv, inv).reshape(coords.shape[:-1] + (k, k))
    # tr(S^-1 U S^-1 V) = vec(U)^T (S^-1 kron S^-1) vec(V) for column-major vec
    g = 0.5 * n * np.einsum("ai,...ab,bj->...ij", d, kron, d)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def spd_geodesic_eigenvalues(s1, s2) -> np.ndarray:
    """Eigenvalues of ``Sigma1^-1/2 Sigma2 Sigma1^-1/2``, ascending.

    Uses the Cholesky whitening ``L^-1 Sigma2 L^-T`` with ``Sigma1 = L L^T``
    and a symmetric eigensolve.
    """
    a, b = as_spd(s1, "Sigma1"), as_spd(s2, "Sigma2")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return _whitened_eigs(a, b)


def _whitened_eigs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    chol = np.linalg.cholesky(a)
    half = np.linalg.solve(chol, b)
    w = np.linalg.solve(chol, half.T)
    w = 0.5 * (w + w.T)
    return np.linalg.eigvalsh(w)


def _spd_dist(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape == (1, 1):
        return abs(math.log(b[0, 0]) - math.log(a[0, 0]))
    lam = np.maximum(_whitened_eigs(a, b), EIG_FLOOR)
    return math.sqrt(float(np.sum(np.log(lam) ** 2)))


def wishart_distance(s1, s2, n: float) -> float:
    """``sqrt(n/2) * sqrt(sum_k log(lambda_k)**2)``; also the inverse-Wishart distance."""
    a, b = as_spd(s1, "Sigma1"), as_spd(s2, "Sigma2")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    n = _dof(n, a.shape[0])
    if np.array_equal(a, b):
        return 0.0
    # fixed argument order makes the result exactly symmetric
    if tuple(vech(b)) < tuple(vech(a)):
        a, b = b, a
    return math.sqrt(0.5 * n) * _spd_dist(a, b)


def spd_geodesic(s1, s2, ts) -> np.ndarray:
    """Affine-invariant geodesic ``L (L^-1 S2 L^-T)^t L^T`` at each ``t``."""
    a, b = as_spd(s1, "Sigma1"), as_spd(s2, "Sigma2")
    chol = np.linalg.cholesky(a)
    w = np.linalg.solve(chol, np.linalg.solve(chol, b).T)
    w = 0.5 * (w + w.T)
    lam, vecs = np.linalg.eigh(w)
    ts = np.asarray(ts, dtype=float)
    out = np.empty((ts.size,) + a.shape)
    for i, t in enumerate(ts):
        mid = (vecs * lam ** t) @ vecs.T
        g = chol @ mid @ chol.T
        out[i] = 0.5 * (g + g.T)
    return out


def _dof(n, m: int) -> float:
    n = core.positive_real(n, "n")
    if n < m:
        raise DomainError(f"degrees of freedom n must be >= matrix dimension m = {m}")
    return n


def _make(name: str, m, n, inverse: bool) -> FamilyDescriptor:
    m = core.positive_int(m, "m")
    n = _dof(n, m)
    k = m * (m + 1) // 2
    scale = math.sqrt(0.5 * n)
    lmg = multigammaln(0.5 * n, m)
    iu = np.triu_indices(m)

    def parse(raw):
        raw = np.asarray(raw, dtype=float)
        if raw.ndim == 2:
            return vech(as_spd(raw, "Sigma"))
        return raw.ravel()

    def violation(c):
        try:
            as_spd(unvech(c, m), "Sigma")
        except DomainError as exc:
            return str(exc)
        return None

    def inside(c):
        c = np.asarray(c, dtype=float)
        mats = unvech(c, m)
        eig = np.linalg.eigvalsh(mats.reshape((-1, m, m)))
        return np.all(eig > 0.0, axis=-1).reshape(c.shape[:-1])

    def logpdf(c, x):
        s = unvech(c, m)
        x = np.asarray(x, dtype=float)
        _, ld_s = np.linalg.slogdet(s)
        _, ld_x = np.linalg.slogdet(x)
        if inverse:
            tr = np.trace(s @ np.linalg.inv(x))
            return (0.5 * n * ld_s - 0.5 * (n + m + 1) * ld_x - 0.5 * tr
                    - 0.5 * n * m * math.log(2.0) - lmg)
        tr = np.trace(np.linalg.solve(s, x))
        return (0.5 * (n - m - 1) * ld_x - 0.5 * tr - 0.5 * n * m * math.log(2.0)
                - 0.5 * n * ld_s - lmg)

    def support(c, x):
        try:
            x = as_spd(x, "sample")
        except DomainError as exc:
            return str(exc)
        if x.shape != (m, m):
            return f"sample must be a {m}x{m} SPD matrix"
        return None

    def dist(c1, c2):
        a, b = unvech(c1, m), unvech(c2, m)
        if tuple(c2) < tuple(c1):
            a, b = b, a
        return scale * _spd_dist(a, b)

    def path(c1, c2, ts):
        mats = spd_geodesic(unvech(c1, m), unvech(c2, m), ts)
        return mats[:, iu[0], iu[1]]

    def sampler(rng):
        # random orthogonal frame with log-uniform spectrum in [0.1, 10]
        q, _ = np.linalg.qr(rng.normal(size=(m, m)))
        lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=m))
        s = (q * lam) @ q.T
        return vech(0.5 * (s + s.T))

    eye = vech(np.eye(m))
    other = vech(np.diag([2.0, 0.5] + [1.0] * (m - 2))) if m >= 2 else np.array([math.e])
    return FamilyDescriptor(
        name=name, dim=k, hyper=(("m", m), ("n", n)),
        coord_names=tuple(f"s{i + 1}{j + 1}" for i, j in zip(*iu)), kind="matrix",
        violation=violation, inside=inside, logpdf=logpdf, support_violation=support,
        metric=lambda c: _fisher_batch(np.asarray(c, dtype=float), m, n),
        dist=dist, path=path, sampler=sampler, parse=parse,
        canonical=(tuple(eye), tuple(other)),
        description="sqrt(n/2) sqrt(sum log^2 eig(Sigma1^-1 Sigma2))",
    )


@register("wishart")
def wishart(m=2, n=None) -> FamilyDescriptor:
    """Wishart with scale ``Sigma`` (m x m) and ``n >= m`` degrees of freedom."""
    m = core.positive_int(m, "m")
    return _make("wishart", m, m if n is None else n, inverse=False)


@register("inverse_wishart")
def inverse_wishart(m=2, n=None) -> FamilyDescriptor:
    """Inverse Wishart; same Fisher matrix and distance as the Wishart."""
    m = core.positive_int(m, "m")
    return _make("inverse_wishart", m, m if n is None else n, inverse=True)

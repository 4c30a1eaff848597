"""Poincaré half-plane, half-space and hemisphere models.

Distances are evaluated through ``2 asinh(chord / (2 sqrt(y1 y2)))``, the
cancellation-free rewrite of ``arccosh(1 + chord**2 / (2 y1 y2))``.  The
log-ratio and arctanh expressions are available through
:func:`halfplane_distance_forms` for cross-checking.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import clamped_acosh
from .errors import DimensionError, DomainError, NotOnSphereError

SPHERE_TOL = 1e-9


class HalfPlanePoint(NamedTuple):
    x: float
    y: float


class ScaledMetricSpec(NamedTuple):
    """Constants of the metric ``(a dx**2 + b dy**2) / y**2``."""

    a: float
    b: float


def _hp(p) -> tuple:
    try:
        x, y = (float(v) for v in p)
    except (TypeError, ValueError):
        raise DomainError("half-plane points need two real coordinates (x, y)") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError("half-plane coordinates must be finite")
    if not y > 0.0:
        raise DomainError("half-plane point must have y > 0")
    return x, y


def _spec(spec) -> tuple:
    a, b = (float(v) for v in spec)
    if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError("metric constants a and b must be positive")
    return a, b


def log_ratio(y1: float, y2: float) -> float:
    """``|log(y1 / y2)|`` without rounding the quotient for nearly equal inputs."""
    hi, lo = (y1, y2) if y1 >= y2 else (y2, y1)
    if hi <= 2.0 * lo:
        # hi - lo is exact here
        return math.log1p((hi - lo) / lo)
    return math.log(hi / lo)


def _chord(dx: float, y1: float, y2: float) -> float:
    # 2 asinh(|p - q| / (2 sqrt(y1 y2)))
    b = math.hypot(dx, y1 - y2)
    return 2.0 * math.asinh(b / (2.0 * math.sqrt(y1 * y2)))


def halfplane_distance_forms(p, q) -> dict:
    """The three closed forms of the half-plane distance.

    Returns a mapping with keys ``"log"``, ``"arccosh"`` and ``"arctanh"``.
    With ``A = |p - conj(q)|`` and ``B = |p - q|`` the forms are
    ``log((A + B) / (A - B))``, ``arccosh(1 + B**2 / (2 y1 y2))`` and
    ``2 arctanh(B / A)``, each rewritten so that no difference of nearly
    equal quantities is formed.
    """
    x1, y1 = _hp(p)
    x2, y2 = _hp(q)
    dx = x1 - x2
    big = math.hypot(dx, y1 + y2)
    small = math.hypot(dx, y1 - y2)
    s = math.sqrt(y1 * y2)
    # (A + B) / (2 s) - 1, using A - 2 s = B**2 / (A + 2 s)
    log_form = 2.0 * math.log1p((small + small * small / (big + 2.0 * s)) / (2.0 * s))
    acosh_form = 2.0 * math.asinh(small / (2.0 * s))
    # 2 atanh(z) = log1p(2 z / (1 - z)) with 1 - B/A = 4 y1 y2 / (A (A + B))
    atanh_form = math.log1p(small * (big + small) / (2.0 * y1 * y2))
    return {"log": log_form, "arccosh": acosh_form, "arctanh": atanh_form}


def halfplane_distance(p, q, *, check: bool = False) -> float:
    """Hyperbolic distance in the Poincaré half-plane.

    Parameters
    ----------
    p, q : (x, y) pairs with ``y > 0``
    check : bool
        Also evaluate the log-ratio and arctanh forms and raise
        ``AssertionError`` if any differs from the arccosh form by more
        than 1e-12 relative.

    Examples
    --------
    >>> round(halfplane_distance((-1, 1), (1, 1)), 6)
    1.762747
    """
    x1, y1 = _hp(p)
    x2, y2 = _hp(q)
    if x1 == x2:
        d = log_ratio(y1, y2)
    else:
        d = _chord(x1 - x2, y1, y2)
    if check:
        forms = halfplane_distance_forms((x1, y1), (x2, y2))
        for name, val in forms.items():
            if abs(val - d) > 1e-12 * max(d, 1e-300) and abs(val - d) > 1e-15:
                raise AssertionError(f"half-plane {name} form disagrees: {val!r} vs {d!r}")
    return d


def _hs(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError("half-space points must be 1-D coordinate vectors")
    if not np.all(np.isfinite(arr)):
        raise DomainError("half-space coordinates must be finite")
    if not arr[-1] > 0.0:
        raise DomainError("half-space point must have positive last coordinate")
    return arr


def halfspace_distance(p, q) -> float:
    """Hyperbolic distance in the upper half-space ``H^n``.

    Evaluates ``arccosh(1 + |p - q|**2 / (2 p_n q_n))`` in its asinh form.

    Raises
    ------
    DimensionError
        If the points have different lengths.
    """
    a, b = _hs(p), _hs(q)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    if np.array_equal(a, b):
        return 0.0
    chord = float(np.linalg.norm(a - b))
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(a[-1] * b[-1])))


def _on_sphere(p, r: float) -> np.ndarray:
    arr = _hs(p)
    if abs(float(arr @ arr) - r * r) > SPHERE_TOL:
        raise NotOnSphereError(
            f"point is not on the half-sphere of radius {r:g}: |x|^2 = {float(arr @ arr)!r}"
        )
    return arr


def hemisphere_distance(p, q, r: float = 1.0, *, literal: bool = False) -> float:
    """Hyperbolic distance between points of the radius-``r`` half-sphere.

    Parameters
    ----------
    p, q : array_like
        Points with ``sum(x**2) == r**2`` (within 1e-9) and a positive last
        coordinate, which is the height above the boundary.
    r : float
        Sphere radius.
    literal : bool
        Evaluate ``arccosh((1 - <x', y'> / r**2) / (x_last y_last / r**2))``
        directly instead of the equivalent chord form.

    Raises
    ------
    NotOnSphereError
        If a point is off the sphere.
    """
    if not r > 0.0:
        raise DomainError("sphere radius must be positive")
    a, b = _on_sphere(p, r), _on_sphere(q, r)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    if np.array_equal(a, b):
        return 0.0
    r2 = r * r
    if literal:
        num = 1.0 - float(a[:-1] @ b[:-1]) / r2
        return clamped_acosh(num / (a[-1] * b[-1] / r2))
    chord = float(np.linalg.norm(a - b))
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(a[-1] * b[-1])))


def central_projection(p, r: float = 1.0) -> np.ndarray:
    """Map the radius-``r`` half-sphere onto the half-space ``H^n``.

    ``(x_1, ..., x_{n+1}) -> 2 (x_2, ..., x_{n+1}) / (x_1 + 1)`` after
    scaling to the unit sphere.
    """
    x = np.asarray(p, dtype=float) / r
    if not x[0] > -1.0:
        raise DomainError("central projection undefined at the pole x_1 = -r")
    return 2.0 * x[1:] / (x[0] + 1.0)


def inverse_central_projection(y, r: float = 1.0) -> np.ndarray:
    """Inverse of :func:`central_projection`."""
    y = np.asarray(y, dtype=float)
    s = float(y @ y)
    x1 = (4.0 - s) / (4.0 + s)
    rest = 4.0 * y / (4.0 + s)
    return r * np.concatenate(([x1], rest))


def scaled_halfplane_distance(spec, p, q) -> float:
    """Distance under the metric ``(a dx**2 + b dy**2) / y**2``.

    Equals ``sqrt(b) * halfplane_distance((sqrt(a) x1, sqrt(b) y1),
    (sqrt(a) x2, sqrt(b) y2))``.  For ``x1 == x2`` the vertical formula
    ``sqrt(b) |log(y1 / y2)|`` is used, so fixed-location reductions hold
    exactly.
    """
    a, b = _spec(spec)
    x1, y1 = _hp(p)
    x2, y2 = _hp(q)
    rb = math.sqrt(b)
    if x1 == x2:
        return rb * log_ratio(y1, y2)
    dx = math.sqrt(a) * (x1 - x2)
    chord = math.hypot(dx, rb * (y1 - y2))
    return rb * 2.0 * math.asinh(chord / (2.0 * rb * math.sqrt(y1 * y2)))


def scaled_geodesic(spec, p, q, ts) -> np.ndarray:
    """Vectorised :func:`scaled_geodesic_point`; returns shape ``(len(ts), 2)``.

    In the rescaled coordinates ``X = sqrt(a) x``, ``Y = sqrt(b) y`` the
    geodesic is a semicircle centred on the boundary (a half-ellipse in the
    original coordinates).  Points are placed by linear interpolation of
    the polar angle.  Offsets from the first endpoint are formed with
    product-of-sines identities so nearly vertical arcs, whose centre is
    far away, keep full precision.
    """
    a, b = _spec(spec)
    x1, y1 = _hp(p)
    x2, y2 = _hp(q)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any((ts < 0.0) | (ts > 1.0)):
        raise DomainError("geodesic parameter t must lie in [0, 1]")
    ra, rb = math.sqrt(a), math.sqrt(b)
    out = np.empty((ts.size, 2))
    X1, Y1, Y2 = ra * x1, rb * y1, rb * y2
    dX = ra * (x1 - x2)
    u1 = (dX * dX + Y2 * Y2 - Y1 * Y1) / (2.0 * dX) if dX else math.inf  # X1 - centre
    u2 = (Y2 * Y2 - Y1 * Y1 - dX * dX) / (2.0 * dX) if dX else math.inf  # X2 - centre
    R = math.hypot(u1, Y1)
    if not math.isfinite(R):
        # vertical arc, or a centre so far away that it overflows
        out[:, 0] = x1 + ts * (x2 - x1)
        out[:, 1] = np.exp((1.0 - ts) * math.log(y1) + ts * math.log(y2))
    else:
        # mirror so the arc sits nearer angle 0 than pi, where sin is accurate
        sgn = -1.0 if u1 + u2 < 0.0 else 1.0
        th1 = math.atan2(Y1, sgn * u1)
        th2 = math.atan2(Y2, sgn * u2)
        th = (1.0 - ts) * th1 + ts * th2
        X = X1 - sgn * 2.0 * R * np.sin(0.5 * (th + th1)) * np.sin(0.5 * (th - th1))
        out[:, 0] = X / ra
        out[:, 1] = R * np.sin(th) / rb
    out[ts == 0.0] = (x1, y1)
    out[ts == 1.0] = (x2, y2)
    return out


def scaled_geodesic_point(spec, p, q, t: float) -> HalfPlanePoint:
    """Point at parameter ``t`` on the geodesic from ``p`` to ``q``.

    Examples
    --------
    >>> scaled_geodesic_point((1, 1), (0, 1), (0, 4), 0.5)
    HalfPlanePoint(x=0.0, y=2.0)
    """
    x, y = scaled_geodesic(spec, p, q, [t])[0]
    return HalfPlanePoint(float(x), float(y))


def halfplane_metric(spec, pts) -> np.ndarray:
    """Metric tensor ``diag(a, b) / y**2`` at points of shape ``(..., 2)``."""
    a, b = _spec(spec)
    pts = np.asarray(pts, dtype=float)
    y2 = pts[..., 1] ** 2
    out = np.zeros(pts.shape[:-1] + (2, 2))
    out[..., 0, 0] = a / y2
    out[..., 1, 1] = b / y2
    return out

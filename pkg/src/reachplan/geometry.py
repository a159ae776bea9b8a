"""Penetration depth and boundary distance for planar obstacles.

Every analytic obstacle is described in its own local frame (centered at the
origin, axis aligned) and placed in the world by a translation plus a
counter-clockwise rotation angle in radians.  Obstacle tables that quote a
clockwise angle in degrees go through :func:`clockwise_degrees`.

Two distance notions are provided:

* ``penetration`` -- the depth of a point inside the obstacle, i.e. its distance
  to the complement.  Zero outside.  This is what the obstacle penalty uses.
* ``boundary_distance`` -- the unsigned distance to the obstacle boundary,
  inside or out.  Kept for comparison with the raw textbook formulas.

All array functions accept a single point of shape ``(2,)`` or a batch of
shape ``(M, 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union as TUnion

import numpy as np

from .errors import InvalidAxes

# Below this value of a**2 - b**2 the quartic is too ill-conditioned and the
# ellipse is treated as a circle of radius a.
NEAR_CIRCLE_EPS = 1e-12


def _point(p) -> tuple[float, float]:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return (x, y)


def clockwise_degrees(angle_deg: float) -> float:
    """Convert a clockwise angle in degrees to the internal CCW radians."""
    return -math.radians(angle_deg)


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center))
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class Square:
    center: tuple[float, float]
    side: float
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center))
        if not self.side > 0:
            raise ValueError(f"square side must be positive, got {self.side}")
        object.__setattr__(self, "side", float(self.side))
        object.__setattr__(self, "rotation", float(self.rotation))


@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    a: float
    b: float
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center))
        _check_axes(self.a, self.b)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "rotation", float(self.rotation))


@dataclass(frozen=True)
class Union:
    """Finite union of obstacles.  An empty union is the empty obstacle."""

    members: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True, eq=False)
class Sampled:
    """Obstacle known only through a grid distance field (see ``eikonal``).

    ``source`` optionally records the analytic obstacle the field was
    computed from, so scenario files can be written back.
    """

    field: object
    source: object = None

    def __eq__(self, other):
        if not isinstance(other, Sampled):
            return NotImplemented
        f, g = self.field, other.field
        return (self.source == other.source and f.grid == g.grid
                and np.array_equal(f.values, g.values))

    __hash__ = None


Obstacle = TUnion[Circle, Square, Ellipse, Union, Sampled]

EMPTY = Union(())


@dataclass(frozen=True)
class EllipseProjection:
    lambda_star: float
    foot_point: tuple[float, float]
    distance: float


def _check_axes(a, b):
    if not (b > 0 and b <= a) or not math.isfinite(a):
        raise InvalidAxes(f"ellipse semi-axes must satisfy 0 < b <= a, got a={a}, b={b}")


def _rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _as_points(q) -> tuple[np.ndarray, bool]:
    arr = np.asarray(q, dtype=float)
    single = arr.ndim == 1
    return np.atleast_2d(arr), single


def _to_local(points: np.ndarray, center, rotation: float) -> np.ndarray:
    # local = R(-rotation) (q - c); with row vectors that is (q - c) @ R(rotation)
    return (points - np.asarray(center)) @ _rotation_matrix(rotation)


def _to_world_vectors(vectors: np.ndarray, rotation: float) -> np.ndarray:
    return vectors @ _rotation_matrix(rotation).T


# ---------------------------------------------------------------------------
# Raw boundary-distance formulas


def circle_boundary_distance(q, center, radius: float) -> float:
    """Unsigned distance from ``q`` to the circle of given center and radius."""
    return abs(math.hypot(q[0] - center[0], q[1] - center[1]) - radius)


def square_boundary_distance(q, center, side: float, rotation: float = 0.0) -> float:
    """Unsigned distance from ``q`` to the boundary of a (rotated) square."""
    d, _ = _square(np.atleast_2d(np.asarray(q, float)), Square(center, side, rotation), raw=True)
    return float(d[0])


def _quartic(lam, a2, b2, A, B):
    u = lam - a2
    v = lam - b2
    return (u * v) ** 2 - A * v * v - B * u * u


def _quartic_prime(lam, a2, b2, A, B):
    u = lam - a2
    v = lam - b2
    return 2.0 * u * v * (u + v) - 2.0 * A * v - 2.0 * B * u


def quartic_scale(lam, q, a: float, b: float) -> float:
    """Magnitude of the terms of the ellipse quartic at ``lam``; used to
    normalise residuals."""
    a2, b2 = a * a, b * b
    la = abs(lam)
    return ((la + a2) * (la + b2)) ** 2 + a2 * q[0] ** 2 * (la + b2) ** 2 + b2 * q[1] ** 2 * (la + a2) ** 2


def ellipse_quartic(lam, q, a: float, b: float):
    """Evaluate P(lam) = ((lam-a^2)(lam-b^2))^2 - a^2 q1^2 (lam-b^2)^2 - b^2 q2^2 (lam-a^2)^2."""
    return _quartic(lam, a * a, b * b, a * a * q[0] ** 2, b * b * q[1] ** 2)


def _ellipse_lambda(q1: np.ndarray, q2: np.ndarray, a: float, b: float) -> np.ndarray:
    a2, b2 = a * a, b * b
    r = np.hypot(q1, q2)
    if a2 - b2 < NEAR_CIRCLE_EPS:
        return a2 - a * r

    lam = np.empty_like(q1)
    axis = q2 == 0.0
    lam[axis] = np.minimum(a2 - a * np.abs(q1[axis]), b2)
    idx = np.flatnonzero(~axis)
    if idx.size == 0:
        return lam

    A = a2 * q1[idx] ** 2
    B = b2 * q2[idx] ** 2
    # On (-inf, b^2) the root solves G = 1 - A/(lam-a^2)^2 - B/(lam-b^2)^2 = 0,
    # the quartic divided by ((lam-a^2)(lam-b^2))^2.  Each term is at most 1 at
    # the root and one of them is at least 1/2, which brackets it in closed form.
    ra, rb = np.sqrt(A), np.sqrt(B)
    hi = np.minimum(b2 - rb, a2 - ra)
    lo = np.minimum(b2 - math.sqrt(2.0) * rb, a2 - math.sqrt(2.0) * ra)

    # G is concave and decreasing there and G(hi) <= 0, so Newton started from
    # hi approaches the root monotonically from the right.  Steps leaving the
    # bracket (rounding noise near the root) bisect instead.
    x = hi.copy()
    active = np.ones(idx.size, dtype=bool)
    for _ in range(200):
        u = x - a2
        v = x - b2
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f = 1.0 - A / (u * u) - B / (v * v)
            df = 2.0 * A / (u * u * u) + 2.0 * B / (v * v * v)
            newton = x - f / df
        hit = f == 0.0
        pos = f > 0.0
        lo = np.where(active & pos, x, lo)
        hi = np.where(active & ~pos & ~hit, x, hi)
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        xn = np.where(ok, newton, 0.5 * (lo + hi))
        tol = 4.0 * np.finfo(float).eps * np.maximum(np.abs(x), b2)
        small = np.abs(newton - x) <= tol
        converged = hit | small | (np.abs(xn - x) <= tol) | (hi - lo <= tol)
        x = np.where(active & ~hit, np.where(small, newton, xn), x)
        active &= ~converged
        if not active.any():
            break
    lam[idx] = x
    return lam


def _ellipse_foot(q1: np.ndarray, q2: np.ndarray, a: float, b: float):
    """Vectorised projection onto the ellipse boundary.  Returns (lam, x1, x2)."""
    a2, b2 = a * a, b * b
    lam = _ellipse_lambda(q1, q2, a, b)
    x1 = np.empty_like(q1)
    x2 = np.empty_like(q2)

    if a2 - b2 < NEAR_CIRCLE_EPS:
        r = np.hypot(q1, q2)
        centre = r == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            x1[:] = np.where(centre, a, q1 * a / r)
            x2[:] = np.where(centre, 0.0, q2 * a / r)
        return lam, x1, x2

    x1[:] = q1 * a2 / (a2 - lam)
    # lam -> b^2 near the inner part of the major axis, where q2/(b^2-lam)
    # loses all precision; take x2 from the boundary equation instead.
    singular = b2 - lam <= 1e-6 * b2
    with np.errstate(divide="ignore", invalid="ignore"):
        x2[:] = np.where(singular, 0.0, q2 * b2 / (b2 - lam))
    if singular.any():
        x1s = q1[singular] * a2 / (a2 - np.minimum(lam[singular], b2))
        x1[singular] = x1s
        sign = np.where(q2[singular] < 0, -1.0, 1.0)
        x2[singular] = sign * b * np.sqrt(np.maximum(0.0, 1.0 - (x1s / a) ** 2))
    return lam, x1, x2


def ellipse_lambda_exact(q, a: float, b: float) -> float:
    """Smallest real root of the ellipse projection quartic, lambda* <= b^2.

    ``q`` is given in the ellipse's own axis-aligned frame.
    """
    _check_axes(a, b)
    lam = _ellipse_lambda(np.array([float(q[0])]), np.array([float(q[1])]), a, b)
    return float(lam[0])


def ellipse_distance_exact(q, a: float, b: float) -> EllipseProjection:
    """Closest boundary point of the axis-aligned ellipse with semi-axes a >= b."""
    _check_axes(a, b)
    q1 = np.array([float(q[0])])
    q2 = np.array([float(q[1])])
    lam, x1, x2 = _ellipse_foot(q1, q2, a, b)
    dist = math.hypot(x1[0] - q1[0], x2[0] - q2[0])
    return EllipseProjection(float(lam[0]), (float(x1[0]), float(x2[0])), dist)


def ellipse_distance_sq_formula(q, a: float, b: float) -> float:
    """Squared boundary distance through the three-case closed expression in lambda*.

    Mathematically identical to ``ellipse_distance_exact(q, a, b).distance**2``
    but evaluated with the multiplier formula instead of the foot point.
    """
    _check_axes(a, b)
    q1, q2 = float(q[0]), float(q[1])
    a2, b2 = a * a, b * b
    if q1 == 0.0 and q2 == 0.0:
        return b2
    if q2 == 0.0 and a2 - a * abs(q1) >= b2 and a2 > b2:
        return b2 - b2 / (a2 - b2) * q1 * q1
    lam = ellipse_lambda_exact(q, a, b)
    t1 = lam / (a2 - lam) * q1
    t2 = lam / (b2 - lam) * q2 if q2 != 0.0 else 0.0
    return t1 * t1 + t2 * t2


def ellipse_distance_sq_approx(q, a: float, b: float, literal: bool = False) -> float:
    """First-order (in eps = a^2 - b^2) approximation d2_eps of the squared
    ellipse boundary distance.

    Outside the major-axis segment the squared distance is expanded around the
    circle of radius b:

        d2_eps = (b - |q|)^2 + eps * q1^2 / (b |q|^2) * (b - |q|)

    Points on the major axis close enough to the center keep the exact value
    b^2 - (b^2/eps) q1^2.  ``literal=True`` swaps the correction coefficient to
    q1^2/|q|, which is only accurate when b|q| = 1 (kept for comparison).
    The value is not clamped and may be slightly negative near the boundary.
    """
    _check_axes(a, b)
    q1, q2 = float(q[0]), float(q[1])
    b2 = b * b
    eps = a * a - b2
    r = math.hypot(q1, q2)
    if eps <= 0.0:
        return (b - r) ** 2
    if q2 != 0.0 or q1 * q1 >= eps * eps / (b2 + eps):
        coef = q1 * q1 / r if literal else q1 * q1 / (b * r * r)
        return (b - r) ** 2 + eps * coef * (b - r)
    return b2 - b2 / eps * q1 * q1


def ellipse_distance_approx(q, a: float, b: float, literal: bool = False) -> float:
    """Approximate boundary distance: square root of the first-order squared
    distance, clamped at zero."""
    return math.sqrt(max(ellipse_distance_sq_approx(q, a, b, literal), 0.0))


# ---------------------------------------------------------------------------
# Per-variant kernels.  Each returns (distance, gradient of distance**2) for a
# batch of world points.


def _circle(points, ob: Circle, raw: bool):
    rel = points - np.asarray(ob.center)
    r = np.hypot(rel[:, 0], rel[:, 1])
    signed = r - ob.radius  # negative inside
    d = np.abs(signed) if raw else np.maximum(-signed, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        unit = np.where(r[:, None] > 0, rel / r[:, None], 0.0)
    # grad (r - R)^2 = 2 (r - R) unit; outside the clamp both vanish
    factor = signed if raw else np.where(signed < 0, signed, 0.0)
    return d, 2.0 * factor[:, None] * unit


def _square(points, ob: Square, raw: bool):
    loc = _to_local(points, ob.center, ob.rotation)
    h = 0.5 * ob.side
    ax = np.abs(loc)
    margin = h - ax  # positive inside along each axis
    inside = (margin[:, 0] > 0) & (margin[:, 1] > 0)
    xface = margin[:, 0] <= margin[:, 1]
    sgn = np.where(loc >= 0, 1.0, -1.0)

    d = np.where(inside, np.minimum(margin[:, 0], margin[:, 1]), 0.0)
    foot = loc.copy()
    foot[:, 0] = np.where(inside & xface, sgn[:, 0] * h, foot[:, 0])
    foot[:, 1] = np.where(inside & ~xface, sgn[:, 1] * h, foot[:, 1])
    if raw:
        clamped = np.clip(loc, -h, h)
        out = ~inside
        foot[out] = clamped[out]
        # points on the boundary or outside: distance to the clamped point
        d = np.where(inside, d, np.hypot(*(loc - clamped).T))
        on_edge = out & (d == 0.0)
        foot[on_edge] = loc[on_edge]
    grad = 2.0 * _to_world_vectors(loc - foot, ob.rotation)
    if not raw:
        grad[~inside] = 0.0
    return d, grad


def _ellipse(points, ob: Ellipse, raw: bool):
    loc = _to_local(points, ob.center, ob.rotation)
    inside = (loc[:, 0] / ob.a) ** 2 + (loc[:, 1] / ob.b) ** 2 < 1.0
    sel = np.ones(len(loc), bool) if raw else inside
    d = np.zeros(len(loc))
    grad = np.zeros_like(loc)
    if sel.any():
        q = loc[sel]
        _, x1, x2 = _ellipse_foot(q[:, 0].copy(), q[:, 1].copy(), ob.a, ob.b)
        diff = q - np.column_stack([x1, x2])
        d[sel] = np.hypot(diff[:, 0], diff[:, 1])
        grad[sel] = 2.0 * _to_world_vectors(diff, ob.rotation)
    return d, grad


def _sampled(points, ob: Sampled, raw: bool):
    from .eikonal import sample

    field = ob.field
    d = sample(field, points)
    h = field.grid.spacing
    grad = np.empty_like(points)
    for k in range(2):
        step = np.zeros(2)
        step[k] = h
        fp = sample(field, points + step) ** 2
        fm = sample(field, points - step) ** 2
        grad[:, k] = (fp - fm) / (2.0 * h)
    return d, grad


def _union(points, ob: Union, raw: bool):
    if not ob.members:
        return np.zeros(len(points)), np.zeros_like(points)
    results = [_dispatch(points, m, raw) for m in ob.members]
    ds = np.stack([r[0] for r in results])
    # penetration: deepest member wins; raw boundary distance: nearest member
    pick = np.argmin(ds, axis=0) if raw else np.argmax(ds, axis=0)
    cols = np.arange(len(points))
    grads = np.stack([r[1] for r in results])
    return ds[pick, cols], grads[pick, cols]


_KERNELS = {Circle: _circle, Square: _square, Ellipse: _ellipse, Sampled: _sampled, Union: _union}


def _dispatch(points, obstacle, raw):
    try:
        kernel = _KERNELS[type(obstacle)]
    except KeyError:
        raise TypeError(f"unsupported obstacle type {type(obstacle).__name__}") from None
    return kernel(points, obstacle, raw)


def distance_and_grad(points, obstacle, mode: str = "penetration"):
    """Distance (penetration or raw boundary) and the gradient of its square.

    Returns arrays of shape ``(M,)`` and ``(M, 2)``.  Gradients are exact on
    smooth branches; on kinks (circle center, square diagonals, the focal
    segment of an ellipse, ties between union members) an arbitrary one-sided
    branch is returned.
    """
    if mode not in ("penetration", "boundary"):
        raise ValueError(f"unknown distance mode {mode!r}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return _dispatch(pts, obstacle, mode == "boundary")


def penetration(q, obstacle):
    """Depth of ``q`` inside ``obstacle``; zero when ``q`` is not an interior point."""
    pts, single = _as_points(q)
    d, _ = _dispatch(pts, obstacle, False)
    return float(d[0]) if single else d


def boundary_distance(q, obstacle):
    """Unsigned distance to the obstacle boundary (nearest member for unions)."""
    pts, single = _as_points(q)
    d, _ = _dispatch(pts, obstacle, True)
    return float(d[0]) if single else d


def contains(q, obstacle):
    """Strict point-in-shape predicate, independent of the distance kernels."""
    pts, single = _as_points(q)
    out = _contains(pts, obstacle)
    return bool(out[0]) if single else out


def _contains(pts, ob):
    if isinstance(ob, Circle):
        return np.hypot(*(pts - np.asarray(ob.center)).T) < ob.radius
    if isinstance(ob, Square):
        loc = _to_local(pts, ob.center, ob.rotation)
        return np.all(np.abs(loc) < 0.5 * ob.side, axis=1)
    if isinstance(ob, Ellipse):
        loc = _to_local(pts, ob.center, ob.rotation)
        return (loc[:, 0] / ob.a) ** 2 + (loc[:, 1] / ob.b) ** 2 < 1.0
    if isinstance(ob, Union):
        out = np.zeros(len(pts), bool)
        for m in ob.members:
            out |= _contains(pts, m)
        return out
    if isinstance(ob, Sampled):
        from .eikonal import sample

        return sample(ob.field, pts) > 0
    raise TypeError(f"unsupported obstacle type {type(ob).__name__}")


def near_kink(points, obstacle, tol: float) -> np.ndarray:
    """Flag points within ``tol`` of a place where the penetration depth is not
    differentiable.

    Used to pick smooth-branch samples for finite-difference checks.  Points in
    grid-sampled obstacles are always flagged since bilinear fields have kinks
    along every cell edge.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return _near_kink(pts, obstacle, tol)


def _near_kink(pts, ob, tol):
    if isinstance(ob, Circle):
        r = np.hypot(*(pts - np.asarray(ob.center)).T)
        return r < min(tol, ob.radius)
    if isinstance(ob, Square):
        loc = _to_local(pts, ob.center, ob.rotation)
        margin = 0.5 * ob.side - np.abs(loc)
        inside = np.all(margin > -tol, axis=1)
        return inside & (np.abs(margin[:, 0] - margin[:, 1]) < tol)
    if isinstance(ob, Ellipse):
        loc = _to_local(pts, ob.center, ob.rotation)
        focal = (ob.a ** 2 - ob.b ** 2) / ob.a
        return (np.abs(loc[:, 1]) < tol) & (np.abs(loc[:, 0]) < focal + tol)
    if isinstance(ob, Union):
        flag = np.zeros(len(pts), bool)
        depths = []
        for m in ob.members:
            flag |= _near_kink(pts, m, tol)
            depths.append(_dispatch(pts, m, False)[0])
        for i in range(len(depths)):
            for j in range(i + 1, len(depths)):
                both = (depths[i] > 0) & (depths[j] > 0)
                flag |= both & (np.abs(depths[i] - depths[j]) < tol)
        return flag
    if isinstance(ob, Sampled):
        return np.ones(len(pts), bool)
    raise TypeError(f"unsupported obstacle type {type(ob).__name__}")


def bounding_box(obstacle):
    """Axis-aligned bounding box ``(xmin, ymin, xmax, ymax)``; None when empty."""
    if isinstance(obstacle, Circle):
        (cx, cy), r = obstacle.center, obstacle.radius
        return (cx - r, cy - r, cx + r, cy + r)
    if isinstance(obstacle, Square):
        h = 0.5 * obstacle.side
        c, s = abs(math.cos(obstacle.rotation)), abs(math.sin(obstacle.rotation))
        ex = h * (c + s)
        cx, cy = obstacle.center
        return (cx - ex, cy - ex, cx + ex, cy + ex)
    if isinstance(obstacle, Ellipse):
        c, s = math.cos(obstacle.rotation), math.sin(obstacle.rotation)
        ex = math.hypot(obstacle.a * c, obstacle.b * s)
        ey = math.hypot(obstacle.a * s, obstacle.b * c)
        cx, cy = obstacle.center
        return (cx - ex, cy - ey, cx + ex, cy + ey)
    if isinstance(obstacle, Union):
        boxes = [bounding_box(m) for m in obstacle.members]
        boxes = [bx for bx in boxes if bx is not None]
        if not boxes:
            return None
        arr = np.array(boxes)
        return (arr[:, 0].min(), arr[:, 1].min(), arr[:, 2].max(), arr[:, 3].max())
    if isinstance(obstacle, Sampled):
        g = obstacle.field.grid
        x0, y0 = g.origin
        return (x0, y0, x0 + (g.nx - 1) * g.spacing, y0 + (g.ny - 1) * g.spacing)
    raise TypeError(f"unsupported obstacle type {type(obstacle).__name__}")


def moved(obstacle, angle: float, shift: Sequence[float]):
    """Apply the rigid motion ``q -> R(angle) q + shift`` to an analytic obstacle."""
    R = _rotation_matrix(angle)
    t = np.asarray(shift, dtype=float)
    if isinstance(obstacle, Union):
        return Union(tuple(moved(m, angle, shift) for m in obstacle.members))
    if isinstance(obstacle, Sampled):
        raise TypeError("grid-sampled obstacles cannot be moved")
    center = tuple(R @ np.asarray(obstacle.center) + t)
    if isinstance(obstacle, Circle):
        return Circle(center, obstacle.radius)
    if isinstance(obstacle, Square):
        return Square(center, obstacle.side, obstacle.rotation + angle)
    return Ellipse(center, obstacle.a, obstacle.b, obstacle.rotation + angle)


def members(obstacle) -> list:
    """Flatten nested unions into a list of primitive obstacles."""
    if isinstance(obstacle, Union):
        out = []
        for m in obstacle.members:
            out.extend(members(m))
        return out
    return [obstacle]

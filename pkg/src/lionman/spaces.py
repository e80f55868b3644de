"""Uniquely geodesic spaces, convex playing domains and segment geometry.

Points are plain numpy arrays.  Every geometric operation accepts a single
point of shape ``(dim,)`` or a batch of shape ``(n, dim)``; parameters such as
``t`` broadcast against the leading axis.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DegenerateGeodesicError,
    InvalidInputError,
    InvalidStateError,
)

DEFAULT_TOL = 1e-10

# dist_to_segment stops after this many ternary iterations or this bracket width
TERNARY_MAX_ITER = 200
TERNARY_WIDTH = 1e-12

# boundary searches along a geodesic: grid refinement rounds and grid size
_SEARCH_ROUNDS = 8
_SEARCH_GRID = 257


def _last_inside(inside, lo, hi):
    """Largest ``t`` in ``[lo, hi]`` with ``inside(t)``, assuming the true set is ``[lo, t*]``.

    ``inside`` takes an array of parameters and returns a boolean array.  Each
    round evaluates a grid in one vectorized call and narrows to one cell.
    """
    for _ in range(_SEARCH_ROUNDS):
        ts = np.linspace(lo, hi, _SEARCH_GRID)
        ok = np.asarray(inside(ts), dtype=bool)
        ok[0] = True
        if ok.all():
            return hi
        k = int(np.argmin(ok))
        lo, hi = float(ts[k - 1]), float(ts[k])
    return lo


def _col(t):
    """Broadcast a scalar or (n,) parameter against (..., dim) coordinates."""
    t = np.asarray(t, dtype=float)
    return t[..., None] if t.ndim else t


class Space:
    """A uniquely geodesic space.  Subclasses supply the metric and geodesics."""

    kind = "abstract"
    dim: int

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = float(tol)

    # validation -------------------------------------------------------

    def point(self, coords):
        """Validate ``coords`` and return them as a float array."""
        x = np.asarray(coords, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise InvalidInputError(
                f"{self!r} expects points with {self.dim} coordinates, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("point coordinates must be finite")
        return x

    # metric and geodesics ---------------------------------------------

    def distance(self, x, y):
        return self._distance(self.point(x), self.point(y))

    def interpolate(self, x, y, t):
        """The point ``(1-t)x + ty`` on the geodesic segment ``[x, y]``."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > 1) or np.any(np.isnan(t_arr)):
            raise InvalidInputError(f"interpolation parameter must lie in [0, 1], got {t}")
        return self._interpolate(self.point(x), self.point(y), t_arr)

    def midpoint(self, x, y):
        return self.interpolate(x, y, 0.5)

    def dist_to_segment(self, z, x, y, return_t=False):
        """``min_t d(z, interpolate(x, y, t))`` by ternary search over ``t``.

        ``t -> d(z, (1-t)x + ty)`` is convex in every implemented space (on
        domains of diameter below pi/2 for the sphere), hence unimodal.
        """
        z, x, y = self.point(z), self.point(x), self.point(y)
        z, x, y = np.broadcast_arrays(z, x, y)
        self._check_segment(x, y)
        shape = z.shape[:-1]

        def f(t):
            return self._distance(z, self._interpolate(x, y, t))

        lo = np.zeros(shape)
        hi = np.ones(shape)
        for _ in range(TERNARY_MAX_ITER):
            width = hi - lo
            if np.max(width, initial=0.0) < TERNARY_WIDTH:
                break
            m1 = lo + width / 3.0
            m2 = hi - width / 3.0
            left = f(m1) < f(m2)
            hi = np.where(left, m2, hi)
            lo = np.where(left, lo, m1)
        t_mid = 0.5 * (lo + hi)
        candidates = np.stack([f(t_mid), f(np.zeros(shape)), f(np.ones(shape))])
        best = np.argmin(candidates, axis=0)
        dist = np.take_along_axis(candidates, best[None], axis=0)[0]
        if return_t:
            t_best = np.choose(best, [t_mid, np.zeros(shape), np.ones(shape)])
            return dist, t_best
        return dist

    def segment_excess(self, z, x, y):
        """``d(x,z) + d(z,y) - d(x,y)``; zero exactly when ``z`` lies on ``[x,y]``."""
        z, x, y = self.point(z), self.point(x), self.point(y)
        return self._distance(x, z) + self._distance(z, y) - self._distance(x, y)

    def _check_segment(self, x, y):
        pass

    # moves ------------------------------------------------------------

    def extend(self, x, direction, length):
        """The point at distance ``length`` from ``x`` heading along ``direction``."""
        raise NotImplementedError

    def rotate_about(self, center, x, angle):
        """Rotate ``x`` about ``center`` by ``angle`` (in the first coordinate plane)."""
        raise NotImplementedError

    # serialization ----------------------------------------------------

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))


class NormedSpace(Space):
    """Finite-dimensional normed space; geodesics are straight segments."""

    p = 2.0

    def __init__(self, dim, tol=DEFAULT_TOL):
        super().__init__(tol)
        dim = int(dim)
        if dim < 1:
            raise InvalidInputError("dimension must be positive")
        self.dim = dim

    def norm(self, v):
        raise NotImplementedError

    def _distance(self, x, y):
        return self.norm(y - x)

    def _interpolate(self, x, y, t):
        return x + _col(t) * (y - x)

    def extend(self, x, direction, length):
        x = self.point(x)
        v = np.asarray(direction, dtype=float)
        n = self.norm(v)
        if np.any(n == 0):
            raise InvalidInputError("direction must be nonzero")
        return x + _col(np.asarray(length, dtype=float) / n) * v

    def rotate_about(self, center, x, angle):
        if self.dim < 2:
            raise InvalidInputError("rotation needs at least two dimensions")
        v = np.array(x, dtype=float) - center
        c, s = math.cos(angle), math.sin(angle)
        v0, v1 = v[..., 0].copy(), v[..., 1].copy()
        v[..., 0] = c * v0 - s * v1
        v[..., 1] = s * v0 + c * v1
        return center + v


class Euclidean(NormedSpace):
    kind = "euclidean"

    def norm(self, v):
        return np.linalg.norm(v, axis=-1)

    def to_dict(self):
        return {"kind": "euclidean", "dim": self.dim}

    def __repr__(self):
        return f"Euclidean({self.dim})"


class Lp(NormedSpace):
    """``R^dim`` with the p-norm, ``1 < p < inf``."""

    kind = "lp"

    def __init__(self, dim, p, tol=DEFAULT_TOL):
        p = float(p)
        if not p > 1:
            raise InvalidInputError(f"p must exceed 1 (got {p}); l_1 is not uniquely geodesic")
        if math.isinf(p):
            raise InvalidInputError("p = inf is not uniquely geodesic")
        super().__init__(dim, tol)
        self.p = p

    def norm(self, v):
        a = np.abs(v)
        m = np.max(a, axis=-1)
        safe = np.where(m > 0, m, 1.0)
        s = np.sum((a / safe[..., None]) ** self.p, axis=-1)
        return np.where(m > 0, safe * s ** (1.0 / self.p), 0.0)

    def to_dict(self):
        p = int(self.p) if self.p.is_integer() else self.p
        return {"kind": "lp", "dim": self.dim, "p": p}

    def __repr__(self):
        return f"Lp({self.dim}, p={self.p:g})"


class Sphere2(Space):
    """The unit sphere of R^3 with the great-circle (angle) metric."""

    kind = "sphere2"
    dim = 3
    antipodal_margin = 1e-8

    def point(self, coords):
        x = super().point(coords)
        err = np.abs(np.sum(x * x, axis=-1) - 1.0)
        if np.any(err > self.tol):
            raise InvalidInputError("sphere points must have unit Euclidean norm")
        return x

    def _distance(self, x, y):
        cross = np.linalg.norm(np.cross(x, y), axis=-1)
        return np.arctan2(cross, np.sum(x * y, axis=-1))

    def _check_segment(self, x, y):
        if np.any(self._distance(x, y) > math.pi - self.antipodal_margin):
            raise DegenerateGeodesicError("antipodal points are joined by infinitely many geodesics")

    def _interpolate(self, x, y, t):
        self._check_segment(x, y)
        theta = self._distance(x, y)
        t = np.asarray(t, dtype=float)
        small = theta < 1e-9
        st = np.sin(theta)
        safe = np.where(small, 1.0, st)
        wx = np.where(small, 1.0 - t, np.sin((1.0 - t) * theta) / safe)
        wy = np.where(small, t, np.sin(t * theta) / safe)
        out = _col(wx) * x + _col(wy) * y
        return out / np.linalg.norm(out, axis=-1, keepdims=True)

    def extend(self, x, direction, length):
        x = self.point(x)
        v = np.asarray(direction, dtype=float)
        u = v - _col(np.sum(v * x, axis=-1)) * x
        n = np.linalg.norm(u, axis=-1)
        if np.any(n < 1e-15):
            raise InvalidInputError("direction must have a nonzero tangential component")
        u = u / _col(n)
        length = np.asarray(length, dtype=float)
        out = _col(np.cos(length)) * x + _col(np.sin(length)) * u
        return out / np.linalg.norm(out, axis=-1, keepdims=True)

    def rotate_about(self, center, x, angle):
        k = np.asarray(center, dtype=float)
        x = np.asarray(x, dtype=float)
        c, s = math.cos(angle), math.sin(angle)
        kx = np.cross(k, x)
        out = x * c + kx * s + _col(np.sum(k * x, axis=-1)) * k * (1 - c)
        return out / np.linalg.norm(out, axis=-1, keepdims=True)

    def to_dict(self):
        return {"kind": "sphere2"}

    def __repr__(self):
        return "Sphere2()"


def space_from_dict(d) -> Space:
    kind = d.get("kind")
    if kind == "euclidean":
        return Euclidean(d["dim"])
    if kind == "lp":
        return Lp(d["dim"], d["p"])
    if kind == "sphere2":
        return Sphere2()
    raise InvalidInputError(f"unknown space kind {kind!r}")


def parse_space(spec: str) -> Space:
    """Parse ``euclidean:<dim>``, ``lp:<dim>:<p>`` or ``sphere2``."""
    parts = spec.strip().lower().split(":")
    try:
        if parts[0] == "euclidean" and len(parts) == 2:
            return Euclidean(int(parts[1]))
        if parts[0] == "lp" and len(parts) == 3:
            return Lp(int(parts[1]), float(parts[2]))
        if parts[0] in ("sphere2", "sphere") and len(parts) == 1:
            return Sphere2()
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed space spec {spec!r}: {exc}") from None
    raise InvalidInputError(
        f"malformed space spec {spec!r}; expected euclidean:<dim>, lp:<dim>:<p> or sphere2"
    )


# ---------------------------------------------------------------------------
# domains


class Domain:
    """A convex, bounded subset of a space."""

    shape = "abstract"
    game_domain = True

    def __init__(self, space: Space):
        self.space = space
        self.diameter_bound = float("nan")

    def contains(self, x):
        raise NotImplementedError

    @property
    def center(self):
        raise NotImplementedError

    def sample(self, rng, n=None):
        """Uniform points of the domain; one point if ``n`` is None."""
        pts = self._sample(rng, 1 if n is None else int(n))
        return pts[0] if n is None else pts

    def _sample(self, rng, n):
        raise NotImplementedError

    def boundary_along(self, direction):
        """Boundary point on the geodesic ray from ``center`` heading along ``direction``."""
        c = self.center
        reach = _last_inside(
            lambda ts: self.contains(self.space.extend(c, direction, ts)), 0.0, 2.0 * self.diameter_bound
        )
        return self.space.extend(c, direction, reach)

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.space == other.space and self.to_dict() == other.to_dict()


class Ball(Domain):
    """Closed metric ball of a normed space."""

    shape = "ball"

    def __init__(self, space, center, radius):
        super().__init__(space)
        if not isinstance(space, NormedSpace):
            raise InvalidInputError("Ball domains live in normed spaces; use SphericalCap on the sphere")
        radius = float(radius)
        if not radius > 0:
            raise InvalidInputError("ball radius must be positive")
        self._center = space.point(center).copy()
        self.radius = radius
        self.diameter_bound = 2.0 * radius

    @property
    def center(self):
        return self._center

    def contains(self, x):
        return self.space.distance(self._center, x) <= self.radius + self.space.tol

    def _sample(self, rng, n):
        out = np.empty((0, self.space.dim))
        while len(out) < n:
            batch = max(2 * (n - len(out)), 16)
            cand = self._center + self.radius * rng.uniform(-1.0, 1.0, size=(batch, self.space.dim))
            keep = self.space.norm(cand - self._center) <= self.radius
            out = np.concatenate([out, cand[keep]])
        return out[:n]

    def to_dict(self):
        return {"shape": "ball", "center": self._center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"Ball({self._center.tolist()}, {self.radius:g})"


class Box(Domain):
    """Axis-parallel box ``lo <= x <= hi`` of a normed space."""

    shape = "box"

    def __init__(self, space, lo, hi):
        super().__init__(space)
        if not isinstance(space, NormedSpace):
            raise InvalidInputError("Box domains are only convex in normed spaces")
        self.lo = space.point(lo).copy()
        self.hi = space.point(hi).copy()
        if np.any(self.hi <= self.lo):
            raise InvalidInputError("box needs lo < hi in every coordinate")
        self.diameter_bound = float(space.norm(self.hi - self.lo))

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, x):
        x = self.space.point(x)
        tol = self.space.tol
        return np.all((x >= self.lo - tol) & (x <= self.hi + tol), axis=-1)

    def _sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=(n, self.space.dim))

    def to_dict(self):
        return {"shape": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __repr__(self):
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


def _frame(pole):
    """Two unit vectors completing ``pole`` to an orthonormal basis of R^3."""
    a = np.array([1.0, 0.0, 0.0]) if abs(pole[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, pole) * pole
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(pole, e1)
    return e1, e2


class SphericalCap(Domain):
    """Closed spherical cap of angular radius at most pi/4 (diameter at most pi/2)."""

    shape = "cap"

    def __init__(self, space, pole, angular_radius):
        super().__init__(space)
        if not isinstance(space, Sphere2):
            raise InvalidInputError("SphericalCap domains live on Sphere2")
        angular_radius = float(angular_radius)
        if not 0 < angular_radius <= math.pi / 4 + 1e-15:
            raise InvalidInputError("cap angular radius must lie in (0, pi/4]")
        self.pole = space.point(pole).copy()
        self.angular_radius = angular_radius
        self.diameter_bound = 2.0 * angular_radius

    @property
    def center(self):
        return self.pole

    def contains(self, x):
        return self.space.distance(self.pole, x) <= self.angular_radius + self.space.tol

    def _sample(self, rng, n):
        zc = rng.uniform(math.cos(self.angular_radius), 1.0, size=n)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
        rho = np.sqrt(np.clip(1.0 - zc * zc, 0.0, None))
        e1, e2 = _frame(self.pole)
        pts = (
            (rho * np.cos(phi))[:, None] * e1
            + (rho * np.sin(phi))[:, None] * e2
            + zc[:, None] * self.pole
        )
        return pts / np.linalg.norm(pts, axis=-1, keepdims=True)

    def to_dict(self):
        return {"shape": "cap", "pole": self.pole.tolist(), "angle": self.angular_radius}

    def __repr__(self):
        return f"SphericalCap({self.pole.tolist()}, {self.angular_radius:g})"


class Octant(Domain):
    """The closed positive octant of the sphere: uniquely geodesic, not strictly convex."""

    shape = "octant"
    game_domain = False

    def __init__(self, space=None):
        space = Sphere2() if space is None else space
        if not isinstance(space, Sphere2):
            raise InvalidInputError("Octant lives on Sphere2")
        super().__init__(space)
        self.diameter_bound = math.pi / 2

    @property
    def center(self):
        return np.full(3, 1.0 / math.sqrt(3.0))

    def contains(self, x):
        x = self.space.point(x)
        return np.all(x >= -self.space.tol, axis=-1)

    def _sample(self, rng, n):
        pts = np.abs(rng.standard_normal((n, 3)))
        return pts / np.linalg.norm(pts, axis=-1, keepdims=True)

    def to_dict(self):
        return {"shape": "octant"}

    def __repr__(self):
        return "Octant()"


def domain_from_dict(d, space: Space) -> Domain:
    shape = d.get("shape")
    if shape == "ball":
        return Ball(space, d["center"], d["radius"])
    if shape == "box":
        return Box(space, d["lo"], d["hi"])
    if shape == "cap":
        return SphericalCap(space, d["pole"], d["angle"])
    if shape == "octant":
        return Octant(space)
    raise InvalidInputError(f"unknown domain shape {shape!r}")


def _coords(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"malformed coordinate list {text!r}") from None


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise InvalidInputError(f"malformed number {text!r}") from None


def parse_domain(spec: str, space: Space) -> Domain:
    """Parse ``ball:<c>:<r>``, ``box:<lo>:<hi>``, ``cap:<pole>:<angle>`` or ``octant``."""
    parts = spec.strip().lower().split(":")
    kind = parts[0]
    if kind == "ball" and len(parts) == 3:
        return Ball(space, _coords(parts[1]), _number(parts[2]))
    if kind == "box" and len(parts) == 3:
        return Box(space, _coords(parts[1]), _coords(parts[2]))
    if kind == "cap" and len(parts) == 3:
        pole = np.array(_coords(parts[1]))
        norm = np.linalg.norm(pole)
        if norm == 0:
            raise InvalidInputError("cap pole must be nonzero")
        return SphericalCap(space, pole / norm, _number(parts[2]))
    if kind == "octant" and len(parts) == 1:
        return Octant(space)
    raise InvalidInputError(
        f"malformed domain spec {spec!r}; expected ball:<c>:<r>, box:<lo>:<hi> or cap:<pole>:<angle>"
    )


# ---------------------------------------------------------------------------
# free functions mirroring the operation list


def distance(space: Space, x, y):
    return space.distance(x, y)


def interpolate(space: Space, x, y, t):
    return space.interpolate(x, y, t)


def dist_to_segment(space: Space, z, x, y):
    return space.dist_to_segment(z, x, y)


def domain_contains(domain: Domain, x):
    return domain.contains(x)


def sample_point(domain: Domain, rng):
    return domain.sample(rng)


def clamp_move(domain: Domain, start, target, D):
    """Repair a proposed move so it stays in ``domain`` and travels at most ``D``.

    A valid target is returned unchanged.  Otherwise the move is truncated to
    length ``D`` along the geodesic toward ``target`` and, if that still leaves
    the domain, bisected back to the last point inside.
    """
    space = domain.space
    start = space.point(start)
    target = space.point(target)
    if not domain.contains(start):
        raise InvalidStateError("clamp_move needs a starting point inside the domain")
    D = float(D)
    d = float(space.distance(start, target))
    if d <= D + space.tol and domain.contains(target):
        return target.copy()
    q = target if d <= D else space.interpolate(start, target, D / d)
    if domain.contains(q):
        return q
    t = _last_inside(lambda ts: domain.contains(space._interpolate(start, q, ts)), 0.0, 1.0)
    return space.interpolate(start, q, t)

"""Seeded sampling checks for the convexity notions behind the capture bound.

Every ``check_*`` function draws random admissible configurations for one
definition or lemma, evaluates its conclusion and returns a
:class:`SampleReport`.  Samplers are constructive: they build configurations
near the extremal cases (points on spheres, tight parameters) instead of
hoping uniform draws land there.

A check is deterministic given its seed.  Batches use child seeds spawned from
``SeedSequence(seed)``, so the result never depends on scheduling.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, SamplerStarvationWarning
from .logreal import LogReal
from .moduli import ConvexityModulus, ModuliBundle, cat_kappa_parameter, parse_family
from .spaces import (
    Box,
    Domain,
    Euclidean,
    NormedSpace,
    Octant,
    Space,
    Sphere2,
    SphericalCap,
)

# a conclusion failing by more than this is a violation
VIOLATION_TOL = 1e-9
# premises are shrunk by this relative amount so rounding cannot flip them
PREMISE_SHRINK = 1e-12
# samplers draw at most this many configurations per requested admissible one
MAX_DRAW_FACTOR = 100
MIN_YIELD = 0.01
# below this Theta the betweenness check switches to the scaled chart
CHART_THRESHOLD = 1e-6
# first-order error allowance of the spherical chart
CHART_SHRINK = 1e-5

_FLOAT_EPS = np.finfo(float).eps


@dataclass
class SampleReport:
    check_name: str
    seed: int
    samples_requested: int
    samples_admissible: int = 0
    samples_drawn: int = 0
    violations: int = 0
    worst_slack: float = math.inf
    violation_dumps: list = field(default_factory=list)
    tolerance: float = VIOLATION_TOL
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0

    @property
    def admissible_yield(self):
        return self.samples_admissible / self.samples_drawn if self.samples_drawn else 0.0

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "seed": self.seed,
            "samples_requested": self.samples_requested,
            "samples_admissible": self.samples_admissible,
            "samples_drawn": self.samples_drawn,
            "violations": self.violations,
            "worst_slack": _jsonable(self.worst_slack),
            "tolerance": self.tolerance,
            "violation_dumps": self.violation_dumps,
            "details": self.details,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _listify(v):
    return np.asarray(v).tolist()


# ---------------------------------------------------------------------------
# the sampling loop


def _run_sampler(name, n_samples, seed, draw, tol=VIOLATION_TOL):
    """Call ``draw(rng, size)`` in seeded batches until ``n_samples`` are admissible.

    ``draw`` returns ``(admissible mask, margins, dump)`` where ``dump(i)``
    describes configuration ``i`` of the batch.  A margin below ``-tol`` is a
    violation.
    """
    n_samples = int(n_samples)
    seed = int(seed)
    if n_samples < 1:
        raise InvalidInputError("n_samples must be positive")
    if seed < 0:
        raise InvalidInputError("seed must be unsigned")
    report = SampleReport(name, seed, n_samples, tolerance=tol)
    parent = np.random.SeedSequence(seed)
    cap = MAX_DRAW_FACTOR * n_samples
    batch = int(min(max(1024, n_samples // 4), 25_000))
    with np.errstate(all="ignore"):
        while report.samples_admissible < n_samples and report.samples_drawn < cap:
            rng = np.random.default_rng(parent.spawn(1)[0])
            size = min(batch, cap - report.samples_drawn)
            ok, margin, dump = draw(rng, size)
            ok = np.asarray(ok, dtype=bool) & np.isfinite(margin)
            idx = np.flatnonzero(ok)
            need = n_samples - report.samples_admissible
            if len(idx) > need:
                idx = idx[:need]
                report.samples_drawn += int(idx[-1]) + 1
            else:
                report.samples_drawn += size
            report.samples_admissible += len(idx)
            if len(idx):
                m = margin[idx]
                report.worst_slack = min(report.worst_slack, float(np.min(m)))
                for i in idx[m < -tol]:
                    report.violation_dumps.append({"margin": float(margin[i]), **dump(int(i))})
    report.violations = len(report.violation_dumps)
    if report.admissible_yield < MIN_YIELD:
        warnings.warn(
            f"{name}: only {report.samples_admissible} of {report.samples_drawn} draws were admissible",
            SamplerStarvationWarning,
            stacklevel=3,
        )
    return report


# ---------------------------------------------------------------------------
# sampling helpers


def default_domain(space: Space) -> Domain:
    """``[-1, 1]^dim`` for normed spaces, the cap of angular radius pi/8 on the sphere."""
    if isinstance(space, NormedSpace):
        return Box(space, -np.ones(space.dim), np.ones(space.dim))
    if isinstance(space, Sphere2):
        return SphericalCap(space, [0.0, 0.0, 1.0], math.pi / 8)
    raise InvalidInputError(f"no default domain for {space!r}")


def default_modulus(space: Space, domain: Domain | None = None) -> ConvexityModulus:
    """The built-in modulus of convexity that applies to ``space`` (and ``domain``)."""
    if space.kind == "euclidean":
        return ConvexityModulus.lp(2)
    if space.kind == "lp":
        return ConvexityModulus.lp(space.p)
    if isinstance(space, Sphere2):
        domain = default_domain(space) if domain is None else domain
        diam = domain.diameter_bound
        return ConvexityModulus.cat(1.0, diam, math.pi / 2 - diam)
    raise InvalidInputError(f"no built-in modulus for {space!r}")


def _domain_for(space, domain):
    domain = default_domain(space) if domain is None else domain
    if domain.space != space:
        raise InvalidInputError("domain belongs to a different space")
    return domain


def _phi_of(phi):
    return phi.phi if isinstance(phi, ModuliBundle) else phi


def _theta_of(theta):
    return theta.theta if isinstance(theta, ModuliBundle) else theta


def _log_uniform(rng, lo, hi, n):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=n))


def _in_domain(space, domain, pts):
    """Membership that only matters on the sphere, where the cap is the space."""
    if isinstance(space, Sphere2):
        return np.asarray(domain.contains(pts), dtype=bool)
    return np.ones(len(pts), dtype=bool)


def _directions(rng, space, n):
    return rng.standard_normal((n, space.dim))


def _invert_increasing(fn, target, b, iters=90):
    """Smallest ``eps`` (to bisection accuracy) with ``fn(eps, b) >= target``, elementwise."""
    lo = np.array(target, dtype=float)
    hi = 2.0 * lo
    for _ in range(400):
        short = fn(hi, b) < target
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)
    lo_l, hi_l = np.log(lo), np.log(hi)
    for _ in range(iters):
        mid = 0.5 * (lo_l + hi_l)
        up = fn(np.exp(mid), b) >= target
        hi_l = np.where(up, mid, hi_l)
        lo_l = np.where(up, lo_l, mid)
    return np.exp(hi_l)


# ---------------------------------------------------------------------------
# uniform convexity


def uniform_convexity_margin(space, eta, z, x, y, r, eps):
    """``(1 - eta(eps, r)) r - d(z, m(x, y))``; nonnegative when the inequality holds."""
    m = space._interpolate(x, y, 0.5)
    return (1.0 - eta.eta(eps, r)) * r - space._distance(z, m)


def check_uniform_convexity(space, eta: ConvexityModulus, n_samples, seed, domain=None):
    """Midpoints of ``eps r``-separated points of an ``r``-ball sink by ``eta(eps, r) r``.

    Runs on normed spaces and on spherical caps (which are CAT(1)).
    """
    domain = _domain_for(space, domain)

    def draw(rng, n):
        z, x, y = domain.sample(rng, n), domain.sample(rng, n), domain.sample(rng, n)
        shrink = _log_uniform(rng, 1e-3, 1.0, n)
        same = rng.random(n) < 0.5
        shrink_y = np.where(same, shrink, _log_uniform(rng, 1e-3, 1.0, n))
        x = space._interpolate(z, x, shrink)
        y = space._interpolate(z, y, shrink_y)
        r = np.maximum(space._distance(z, x), space._distance(z, y))
        dxy = space._distance(x, y)
        tight = rng.random(n) < 0.5
        eps = np.where(tight, dxy / np.where(r > 0, r, 1.0) * (1 - PREMISE_SHRINK), _log_uniform(rng, 1e-3, 2.0, n))
        ok = (r > 0) & (dxy >= eps * r) & (eps > 0) & (eps <= 2.0)
        margin = uniform_convexity_margin(space, eta, z, x, y, r, eps)

        def dump(i):
            return {"z": _listify(z[i]), "x": _listify(x[i]), "y": _listify(y[i]), "r": float(r[i]), "eps": float(eps[i])}

        return ok, margin, dump

    return _run_sampler("uniform_convexity", n_samples, seed, draw)


def p_uniform_convexity_sides(space, p, c, z, x, y, t):
    """Both sides of the p-uniform convexity inequality along ``[x, y]`` at ``t``."""
    g = space._interpolate(x, y, t)
    lhs = space._distance(z, g) ** p
    rhs = (
        (1 - t) * space._distance(z, x) ** p
        + t * space._distance(z, y) ** p
        - c / 2 * t * (1 - t) * space._distance(x, y) ** p
    )
    return lhs, rhs


def check_p_uniform_convexity(space, p, c, n_samples, seed, domain=None):
    """The p-uniform convexity inequality; an identity for Euclidean space with p = c = 2."""
    domain = _domain_for(space, domain)
    p, c = float(p), float(c)
    identity = space.kind == "euclidean" and p == 2 and c == 2

    def draw(rng, n):
        z, x, y = domain.sample(rng, n), domain.sample(rng, n), domain.sample(rng, n)
        t = rng.uniform(0.0, 1.0, n)
        ends = rng.random(n)
        t = np.where(ends < 0.02, 0.0, np.where(ends > 0.98, 1.0, t))
        lhs, rhs = p_uniform_convexity_sides(space, p, c, z, x, y, t)
        margin = -np.abs(rhs - lhs) if identity else rhs - lhs

        def dump(i):
            return {"z": _listify(z[i]), "x": _listify(x[i]), "y": _listify(y[i]), "t": float(t[i]),
                    "lhs": float(lhs[i]), "rhs": float(rhs[i])}

        return np.ones(n, dtype=bool), margin, dump

    report = _run_sampler("p_uniform_convexity", n_samples, seed, draw)
    report.details = {"p": p, "c": c, "identity": identity}
    return report


# ---------------------------------------------------------------------------
# uniform uniqueness


def check_uniform_uniqueness(space, phi, n_samples, seed, domain=None):
    """Near-degenerate triangles: small excess ``d(z,x) + d(z,y) - d(x,y)`` forces ``z`` near ``[x, y]``.

    ``phi`` is a :class:`ModuliBundle` or a callable ``phi(eps, b)``.  With
    ``r1 = d(z, x)`` and ``r2 = d(x, y) - r1`` the premises reduce to
    ``r1, r2 <= b`` and excess ``<= phi(eps, b)``.  Half of the draws use the
    smallest ``eps`` that makes the premise hold, which is where a too-large
    modulus gets caught.
    """
    domain = _domain_for(space, domain)
    phi = _phi_of(phi)

    def draw(rng, n):
        x, y = domain.sample(rng, n), domain.sample(rng, n)
        L = space._distance(x, y)
        t = rng.uniform(0.0, 1.0, n)
        p = space._interpolate(x, y, t)
        rho = L * _log_uniform(rng, 1e-6, 1.0, n) * (rng.random(n) < 0.97)
        dirs = _directions(rng, space, n)
        z = np.where((rho > 0)[:, None], space.extend(p, dirs, rho), p)
        dzx, dzy = space._distance(z, x), space._distance(z, y)
        r1 = dzx
        r2 = L - r1
        excess = dzx + dzy - L
        rounding = 8 * _FLOAT_EPS * (dzx + dzy + L)
        b = np.maximum(r1, r2) * np.where(rng.random(n) < 0.5, 1.0, _log_uniform(rng, 1.0, 10.0, n))
        b = np.where(b > 0, b, 1.0)
        tight = rng.random(n) < 0.5
        target = np.maximum(excess + rounding, 1e-300) * (1 + 4 * PREMISE_SHRINK)
        eps_tight = _invert_increasing(phi, np.where(tight, target, 1.0), b)
        eps = np.where(tight, eps_tight, b * _log_uniform(rng, 1e-3, 2.0, n))
        bound = phi(eps, b)
        ok = (
            (r1 > 0) & (r2 > 0) & (r1 <= b) & (r2 <= b)
            & (excess + rounding <= bound * (1 - PREMISE_SHRINK))
            & _in_domain(space, domain, z)
        )
        dist = space.dist_to_segment(z, x, y)
        margin = eps - dist

        def dump(i):
            return {"x": _listify(x[i]), "y": _listify(y[i]), "z": _listify(z[i]), "r1": float(r1[i]),
                    "r2": float(r2[i]), "b": float(b[i]), "eps": float(eps[i]), "phi": float(bound[i]),
                    "dist": float(dist[i])}

        return ok, margin, dump

    return _run_sampler("uniform_uniqueness", n_samples, seed, draw)


def check_lemma_segment_shadow(space, phi, n_samples, seed, domain=None):
    """If ``d(y, z) <= phi(eps, b)/2`` then ``y_t`` stays near ``[x, z]`` and ``z_t`` near ``[x, y]``."""
    domain = _domain_for(space, domain)
    phi = _phi_of(phi)

    def draw(rng, n):
        x, y = domain.sample(rng, n), domain.sample(rng, n)
        dxy = space._distance(x, y)
        b = dxy * np.where(rng.random(n) < 0.5, 1.0 + 1e-9, _log_uniform(rng, 1.0, 10.0, n))
        b = np.where(b > 0, b, 1.0)
        eps = b * _log_uniform(rng, 1e-3, 2.0, n)
        bound = phi(eps, b)
        s = 0.5 * bound * np.where(rng.random(n) < 0.5, 1.0 - 1e-9, rng.uniform(0.0, 1.0, n))
        z = space.extend(y, _directions(rng, space, n), s)
        t = rng.uniform(0.0, 1.0, n)
        ends = rng.random(n)
        t = np.where(ends < 0.02, 0.0, np.where(ends > 0.98, 1.0, t))
        dyz, dxz = space._distance(y, z), space._distance(x, z)
        ok = (
            (np.maximum(dxy, dxz) <= b) & (dyz <= 0.5 * bound * (1 - PREMISE_SHRINK))
            & (bound < eps) & (dxz > 0) & (dxy > 0) & _in_domain(space, domain, z)
        )
        yt = space._interpolate(x, y, t)
        zt = space._interpolate(x, z, t)
        shadow = np.maximum(space.dist_to_segment(yt, x, z), space.dist_to_segment(zt, x, y))
        margin = eps - shadow

        def dump(i):
            return {"x": _listify(x[i]), "y": _listify(y[i]), "z": _listify(z[i]), "t": float(t[i]),
                    "b": float(b[i]), "eps": float(eps[i]), "shadow": float(shadow[i])}

        return ok, margin, dump

    return _run_sampler("lemma_segment_shadow", n_samples, seed, draw)


# ---------------------------------------------------------------------------
# uniform betweenness


def _ternary_min(f, lo, hi, iters=100):
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        left = f(m1) < f(m2)
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    mid = 0.5 * (lo + hi)
    return f(mid)


def chart_segment_distance(space, s, offsets, k, i, j, direction=None, h=0.0):
    """``dist(P_k, [P_i, P_j]) / h`` for points near one geodesic, evaluated without forming them.

    The points are ``P = base(s) + h * offset``.  In a normed space ``base(s) =
    x0 + s v`` with ``||v|| = 1`` and ``offset`` a vector; the result is
    ``min_tau ||u - tau w||`` with ``u = o_k - o_i - t (o_j - o_i)``,
    ``t = (s_k - s_i)/(s_j - s_i)`` and ``w = (s_j - s_i) v + h (o_j - o_i)``,
    which is exact.  On the sphere ``offset`` is the signed cross-track angle
    and the value is the first-order cross-track distance.  ``P_k`` must lie
    strictly between ``P_i`` and ``P_j`` along the geodesic; otherwise inf.
    """
    si, sj, sk = s[:, i], s[:, j], s[:, k]
    span = sj - si
    t = (sk - si) / span
    inside = (t > 0) & (t < 1)
    if isinstance(space, Sphere2):
        oi, oj, ok_ = offsets[:, i], offsets[:, j], offsets[:, k]
        val = np.abs(ok_ * np.sin(span) - oi * np.sin(sj - sk) + oj * np.sin(si - sk)) / np.sin(span)
        return np.where(inside, val, np.inf)
    oi, oj, ok_ = offsets[:, i], offsets[:, j], offsets[:, k]
    u = ok_ - oi - t[:, None] * (oj - oi)
    w = span[:, None] * direction + np.reshape(h, (-1, 1)) * (oj - oi)
    nu, nw = space.norm(u), space.norm(w)
    reach = 2 * nu / nw + 1e-300

    def f(tau):
        return space.norm(u - tau[:, None] * w)

    val = np.minimum(_ternary_min(f, -reach, reach), nu)
    return np.where(inside, val, np.inf)


def _log_theta(theta, eps, a, b):
    """``log Theta`` elementwise, switching to LogReal where floats underflow."""
    with np.errstate(all="ignore"):
        val = np.asarray(theta(eps, a, b), dtype=float)
    out = np.log(np.where(val > 0, val, 1.0))
    bad = ~(np.isfinite(val) & (val > 1e-300))
    if np.any(bad):
        lr = theta(LogReal.from_real(eps[bad]), LogReal.from_real(a[bad]), LogReal.from_real(b[bad]))
        out[bad] = np.asarray(LogReal.from_real(lr).log, dtype=float)
    return out


def _collinear_base(rng, space, domain, n):
    """Four geodesic parameters ``0 < s_y < s_z < L`` on a random segment of the domain."""
    x0, x3 = domain.sample(rng, n), domain.sample(rng, n)
    L = space._distance(x0, x3)
    safe = np.where(L > 0, L, 1.0)
    if isinstance(space, Sphere2):
        tangent = x3 - np.sum(x3 * x0, axis=-1)[:, None] * x0
        nt = np.linalg.norm(tangent, axis=-1)
        direction = tangent / np.where(nt > 0, nt, 1.0)[:, None]
    else:
        direction = (x3 - x0) / safe[:, None]
    inner = np.sort(rng.uniform(0.0, 1.0, (n, 2)), axis=1) * L[:, None]
    s = np.column_stack([np.zeros(n), inner, L])
    return x0, direction, s, L


def _place(space, x0, direction, s, offsets, h):
    """Actual coordinates of the four chart points (used when ``h`` is representable)."""
    if isinstance(space, Sphere2):
        normal = np.cross(x0, direction)
        c = np.cos(s)[..., None] * x0[:, None] + np.sin(s)[..., None] * direction[:, None]
        ang = h[:, None] * offsets
        pts = np.cos(ang)[..., None] * c + np.sin(ang)[..., None] * normal[:, None]
        return pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    return x0[:, None] + s[..., None] * direction[:, None] + h[:, None, None] * offsets


def check_uniform_betweenness(space, theta, n_samples, seed, domain=None):
    """Chained near-memberships ``y ~ [x, z]``, ``z ~ [y, w]`` imply ``y, z ~ [x, w]``.

    ``theta`` is a :class:`ModuliBundle` or a callable ``theta(eps, a, b)``.
    Quadruples are built as ``P = base(s) + h * offset`` around a segment of
    the domain with ``h = Theta(eps, a, b)``.  When ``h`` is below
    ``CHART_THRESHOLD`` it is far under double resolution relative to the
    coordinates, so the premises and conclusion are evaluated in the scaled
    chart (see :func:`chart_segment_distance`); otherwise the points are
    formed and measured directly.
    """
    domain = _domain_for(space, domain)
    theta = _theta_of(theta)
    sphere = isinstance(space, Sphere2)
    chart_count = [0]

    def draw(rng, n):
        x0, direction, s, L = _collinear_base(rng, space, domain, n)
        gaps = np.diff(s, axis=1)
        sep = np.min(np.column_stack([gaps, s[:, 2] - s[:, 0], s[:, 3] - s[:, 1], L]), axis=1)
        a = sep * (1 - 1e-9) * np.where(rng.random(n) < 0.5, 1.0, _log_uniform(rng, 1e-3, 1.0, n))
        b = L * (1 + 1e-9) * np.where(rng.random(n) < 0.5, 1.0, _log_uniform(rng, 1.0, 10.0, n))
        a = np.where(a > 0, a, 1.0)
        b = np.where(b > 0, b, 1.0)
        eps = b * _log_uniform(rng, 1e-3, 2.0, n)
        log_h = _log_theta(theta, eps, a, b)
        h = np.exp(log_h)
        if sphere:
            offsets = rng.uniform(-1.0, 1.0, (n, 4))
        else:
            raw = rng.standard_normal((n, 4, space.dim))
            offsets = raw / space.norm(raw)[..., None] * rng.uniform(0.0, 1.0, (n, 4, 1))
        chart = h < CHART_THRESHOLD
        chart_count[0] += int(np.sum(chart))

        # chart route: distances in units of h
        shrink = 1 - (CHART_SHRINK if sphere else PREMISE_SHRINK)
        prem1 = chart_segment_distance(space, s, offsets, 1, 0, 2, direction, np.where(chart, h, 0.0))
        prem2 = chart_segment_distance(space, s, offsets, 2, 1, 3, direction, np.where(chart, h, 0.0))
        conc1 = chart_segment_distance(space, s, offsets, 1, 0, 3, direction, np.where(chart, h, 0.0))
        conc2 = chart_segment_distance(space, s, offsets, 2, 0, 3, direction, np.where(chart, h, 0.0))
        chart_ok = (prem1 < shrink) & (prem2 < shrink)
        chart_conc = np.exp(log_h + np.log(np.maximum(conc1, conc2)))

        # direct route for representable h
        pts = _place(space, x0, direction, s, offsets, np.where(chart, 0.0, h))
        X, Y, Z, W = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        pair = [space._distance(pts[:, i], pts[:, j]) for i in range(4) for j in range(i + 1, 4)]
        pair = np.column_stack(pair)
        d1 = space.dist_to_segment(Y, X, Z)
        d2 = space.dist_to_segment(Z, Y, W)
        direct_ok = (
            (np.min(pair, axis=1) >= a) & (np.max(pair, axis=1) <= b)
            & (d1 < h * (1 - PREMISE_SHRINK)) & (d2 < h * (1 - PREMISE_SHRINK))
        )
        direct_conc = np.maximum(space.dist_to_segment(Y, X, W), space.dist_to_segment(Z, X, W))

        # perturbation can move separations and diameter by at most 2h
        slack = 2 * np.where(chart, h, 0.0)
        base_ok = (sep - slack >= a) & (L + slack <= b) & (L > 0)
        if sphere:
            base_ok &= np.all(domain.contains(pts.reshape(-1, 3)).reshape(n, 4), axis=1)
        ok = base_ok & np.where(chart, chart_ok, direct_ok)
        conclusion = np.where(chart, chart_conc, direct_conc)
        margin = eps - conclusion

        def dump(i):
            return {"base": _listify(x0[i]), "direction": _listify(direction[i]), "s": _listify(s[i]),
                    "offsets": _listify(offsets[i]), "log10_theta": float(log_h[i] / math.log(10)),
                    "eps": float(eps[i]), "a": float(a[i]), "b": float(b[i]), "chart": bool(chart[i])}

        return ok, margin, dump

    report = _run_sampler("uniform_betweenness", n_samples, seed, draw)
    report.details = {"chart_draws": chart_count[0]}
    return report


def check_betweenness_exact(space, n_samples, seed, domain=None, tol=VIOLATION_TOL):
    """``y in [x, z]`` and ``z in [y, w]`` imply ``y, z in [x, w]``, memberships by zero excess.

    Half of the draws move ``y`` off its segment or swap the inner points, so
    the premise filter is exercised as well.
    """
    domain = _domain_for(space, domain)
    if isinstance(domain, Octant):
        raise InvalidInputError("the octant is not strictly convex; use a cap of diameter below pi/2")

    def draw(rng, n):
        x0, direction, s, L = _collinear_base(rng, space, domain, n)
        offsets = np.zeros((n, 4)) if isinstance(space, Sphere2) else np.zeros((n, 4, space.dim))
        mode = rng.random(n)
        swap = mode > 0.75
        s[swap, 1], s[swap, 2] = s[swap, 2].copy(), s[swap, 1].copy()
        pts = _place(space, x0, direction, s, offsets, np.zeros(n))
        bump = (mode > 0.5) & ~swap
        moved = space.extend(pts[:, 1], _directions(rng, space, n), 1e-3 * np.maximum(L, 1e-9))
        pts[:, 1] = np.where(bump[:, None], moved, pts[:, 1])
        X, Y, Z, W = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        pair = np.column_stack([space._distance(pts[:, i], pts[:, j]) for i in range(4) for j in range(i + 1, 4)])
        distinct = np.min(pair, axis=1) > 1e-6
        ex = space.segment_excess
        ok = distinct & (ex(Y, X, Z) <= tol) & (ex(Z, Y, W) <= tol) & _in_domain(space, domain, Y)
        margin = -np.maximum(ex(Y, X, W), ex(Z, X, W))

        def dump(i):
            return {"x": _listify(X[i]), "y": _listify(Y[i]), "z": _listify(Z[i]), "w": _listify(W[i])}

        return ok, margin, dump

    return _run_sampler("betweenness_exact", n_samples, seed, draw, tol=tol)


# ---------------------------------------------------------------------------
# fixed configurations and the modulus of convexity


def octant_counterexample():
    """The three octant vertices: the midpoint of two of them is as far from the third as they are."""
    space = Sphere2()
    octant = Octant(space)
    x, y, z = np.eye(3)
    m = space.midpoint(x, y)
    d_zx, d_zy, d_zm = (float(space.distance(z, q)) for q in (x, y, m))
    assert octant.contains(m)
    far = max(d_zx, d_zy)
    return {
        "x": x.tolist(),
        "y": y.tolist(),
        "z": z.tolist(),
        "m": m.tolist(),
        "d_zx": d_zx,
        "d_zy": d_zy,
        "d_zm": d_zm,
        "strict_convexity_fails": bool(d_zm >= far - 1e-12),
    }


def _unit(space, theta):
    v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return v / space.norm(v)[..., None]


def _partner_gap(space, x_theta, eps, sign, iters=60):
    """Unit ``y`` at angle ``x_theta + sign * phi`` with ``||x - y|| = eps``, and ``1 - ||(x+y)/2||``.

    ``||x - y||`` grows monotonically as ``y`` turns away from ``x`` over a half
    turn, so ``phi`` is found by bisection.
    """
    x = _unit(space, x_theta)
    lo = np.zeros_like(x_theta)
    hi = np.full_like(x_theta, math.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        far = space.norm(x - _unit(space, x_theta + sign * mid)) >= eps
        hi = np.where(far, mid, hi)
        lo = np.where(far, lo, mid)
    y = _unit(space, x_theta + sign * hi)
    return 1.0 - space.norm(0.5 * (x + y))


def empirical_convexity_modulus(space, eps, grid=10_000, refine=True):
    """``inf {1 - ||(x+y)/2|| : ||x|| = ||y|| = 1, ||x - y|| >= eps}`` for a planar norm.

    ``x`` sweeps an angular grid; for each ``x`` the two partners with
    ``||x - y|| = eps`` are found by bisection (the infimum over the ``>=``
    form is attained on the boundary ``||x - y|| = eps``).  The best grid
    angle is then refined by a bounded ternary search.
    """
    if not isinstance(space, NormedSpace) or space.dim != 2:
        raise InvalidInputError("the empirical modulus needs a two-dimensional normed space")
    eps = float(eps)
    if not 0 <= eps <= 2:
        raise InvalidInputError("eps must lie in [0, 2]")
    if eps == 0:
        return 0.0
    thetas = np.linspace(0.0, 2 * math.pi, int(grid), endpoint=False)
    best = math.inf
    for sign in (1.0, -1.0):
        vals = _partner_gap(space, thetas, eps, sign)
        i = int(np.argmin(vals))
        best = min(best, float(vals[i]))
        if refine:
            step = 2 * math.pi / grid

            def f(t, sign=sign):
                return _partner_gap(space, np.asarray(t, dtype=float), eps, sign)

            lo, hi = np.array([thetas[i] - step]), np.array([thetas[i] + step])
            best = min(best, float(_ternary_min(f, lo, hi, iters=60)[0]))
    return max(best, 0.0)


def check_goebel_kirk(delta_hat: Callable, eps_grid, tol=1e-4):
    """``delta(2(1 - delta(eps))) <= 1 - eps/2`` on every grid point."""
    eps_grid = [float(e) for e in eps_grid]
    report = SampleReport("goebel_kirk", 0, len(eps_grid), tolerance=tol)
    for e in eps_grid:
        inner = 2.0 * (1.0 - delta_hat(e))
        lhs = delta_hat(min(max(inner, 0.0), 2.0))
        margin = 1.0 - e / 2 - lhs
        report.samples_drawn += 1
        report.samples_admissible += 1
        report.worst_slack = min(report.worst_slack, margin)
        if margin < -tol:
            report.violation_dumps.append({"eps": e, "lhs": lhs, "rhs": 1.0 - e / 2, "margin": margin})
    report.violations = len(report.violation_dumps)
    return report


# ---------------------------------------------------------------------------
# metastability


def metastable_orbit(b, tau, g: Callable[[int], int]):
    """``0, g~(0), ..., g~^K(0)`` with ``g~ = Id + g`` and ``K = ceil(b/tau)``."""
    if not (b > 0 and tau > 0):
        raise InvalidInputError("b and tau must be positive")
    K = math.ceil(b / tau)
    orbit = [0]
    for _ in range(K):
        orbit.append(orbit[-1] + int(g(orbit[-1])))
    return orbit


def metastable_index(a, b, tau, g: Callable[[int], int]):
    """First ``I`` on the orbit of ``Id + g`` from 0 with ``a_I - a_{I+g(I)} <= tau``.

    For a nonincreasing sequence in ``[0, b]`` such an ``I`` exists no later
    than ``(Id + g)^ceil(b/tau)(0)``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or len(a) == 0:
        raise InvalidInputError("a must be a nonempty one-dimensional sequence")
    if np.any(np.diff(a) > 0):
        raise InvalidInputError("a must be nonincreasing")
    if np.any(a < 0) or np.any(a > b):
        raise InvalidInputError(f"a must take values in [0, {b}]")
    for I in metastable_orbit(b, tau, g):
        end = I + int(g(I))
        if end >= len(a):
            raise InsufficientDataError(f"window [{I}, {end}] runs past the {len(a)} available terms")
        if a[I] - a[end] <= tau:
            return I
    raise InvalidInputError("no metastable window found; the sequence violates the premises")


# ---------------------------------------------------------------------------
# running several checks


CHECK_NAMES = (
    "uniform_convexity",
    "p_uniform_convexity",
    "uniform_uniqueness",
    "lemma_segment_shadow",
    "uniform_betweenness",
    "betweenness_exact",
)


def applicable_checks(space):
    if space.kind == "euclidean" or isinstance(space, Sphere2):
        return CHECK_NAMES
    return tuple(c for c in CHECK_NAMES if c != "p_uniform_convexity")


def run_check(name, space, domain=None, bundle: ModuliBundle | None = None, n_samples=10_000, seed=0):
    """Run one named check with the built-in modulus for ``space`` unless ``bundle`` is given."""
    domain = _domain_for(space, domain)
    eta = default_modulus(space, domain)
    if bundle is None:
        bundle = ModuliBundle.from_modulus(eta, domain.diameter_bound)
    if name == "uniform_convexity":
        return check_uniform_convexity(space, eta, n_samples, seed, domain)
    if name == "p_uniform_convexity":
        if isinstance(space, Sphere2):
            c = cat_kappa_parameter(1.0, domain.diameter_bound, math.pi / 2 - domain.diameter_bound)
            return check_p_uniform_convexity(space, 2, c, n_samples, seed, domain)
        return check_p_uniform_convexity(space, 2, 2, n_samples, seed, domain)
    if name == "uniform_uniqueness":
        return check_uniform_uniqueness(space, bundle, n_samples, seed, domain)
    if name == "lemma_segment_shadow":
        return check_lemma_segment_shadow(space, bundle, n_samples, seed, domain)
    if name == "uniform_betweenness":
        return check_uniform_betweenness(space, bundle, n_samples, seed, domain)
    if name == "betweenness_exact":
        return check_betweenness_exact(space, n_samples, seed, domain)
    raise InvalidInputError(f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)}")


def run_checks(names, space, domain=None, bundle=None, n_samples=10_000, seed=0, jobs=1):
    """Run several checks, optionally on a thread pool; results keep the order of ``names``."""
    names = list(names)
    if jobs <= 1 or len(names) <= 1:
        return [run_check(n, space, domain, bundle, n_samples, seed) for n in names]
    with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
        futures = [pool.submit(run_check, n, space, domain, bundle, n_samples, seed) for n in names]
        return [f.result() for f in futures]


def family_bundle(spec: str, b) -> ModuliBundle:
    return ModuliBundle.from_modulus(parse_family(spec), b)

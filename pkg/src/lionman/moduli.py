"""Convexity moduli and the conversions between them.

The built-in moduli of uniform convexity all have the power form
``eta(eps, r) = min(1, k * eps**q)`` and ignore the radius ``r``.  From such an
``eta`` we derive a modulus of uniform uniqueness ``phi``, from ``phi`` a
modulus of uniform betweenness ``theta``, and from those the auxiliary
functions ``delta`` and ``psi`` that drive the capture-time bound.

Every formula here is written with plain arithmetic operators so it evaluates
on floats, numpy arrays and :class:`~lionman.logreal.LogReal` values alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainTooLargeError, HypothesisViolationError, InvalidInputError
from .logreal import LogReal, lr_minimum

# below this a float modulus value is recomputed in log space
UNDERFLOW_GUARD = 1e-300


def _check_p(p):
    p = float(p)
    if not (p > 1 and math.isfinite(p)):
        raise InvalidInputError(f"p must satisfy 1 < p < inf, got {p}")
    return p


def _check_eps(eps, upper=2.0):
    ok = (eps > 0) & (eps <= upper)
    if not np.all(ok):
        raise InvalidInputError(f"eps must lie in (0, {upper:g}]")


def _check_positive(name, value):
    if not np.all(value > 0):
        raise InvalidInputError(f"{name} must be positive")


def eta_lp(p, eps):
    """Modulus of uniform convexity of ``L_p``: quadratic for p <= 2, power p above."""
    p = _check_p(p)
    _check_eps(eps)
    if p <= 2:
        return (p - 1) / 8 * eps**2
    return eps**p / (p * 2**p)


def eta_p_uniform(p, c, eps):
    """Modulus of a p-uniformly convex space with parameter ``c``, capped at 1."""
    p = _check_p(p)
    c = float(c)
    if not c > 0:
        raise InvalidInputError("p-uniform convexity parameter c must be positive")
    _check_eps(eps)
    return lr_minimum(1.0, c / (8 * p) * eps**p)


def cat_kappa_parameter(kappa, diam, slack):
    """2-uniform convexity parameter of a CAT(kappa) space of diameter ``diam``.

    Valid for ``0 < slack <= pi/(2 sqrt(kappa)) - diam``.
    """
    kappa, diam, slack = float(kappa), float(diam), float(slack)
    if not kappa > 0:
        raise InvalidInputError("kappa must be positive")
    limit = math.pi / (2 * math.sqrt(kappa))
    if diam >= limit:
        raise DomainTooLargeError(
            f"CAT({kappa:g}) estimate needs diameter < {limit:.6g}, got {diam:.6g}"
        )
    if not 0 < slack <= limit - diam + 1e-15:
        raise InvalidInputError(f"slack must lie in (0, {limit - diam:.6g}]")
    rk = math.sqrt(kappa)
    return (math.pi - 2 * rk * slack) * math.tan(rk * slack)


@dataclass(frozen=True)
class ConvexityModulus:
    """``eta(eps, r) = min(1, coefficient * eps**exponent)`` for one space family."""

    family: str
    params: tuple
    coefficient: float
    exponent: float

    @classmethod
    def lp(cls, p):
        p = _check_p(p)
        if p <= 2:
            return cls("lp", (p,), (p - 1) / 8, 2.0)
        return cls("lp", (p,), 1 / (p * 2**p), p)

    @classmethod
    def p_uniform(cls, p, c):
        p = _check_p(p)
        if not float(c) > 0:
            raise InvalidInputError("p-uniform convexity parameter c must be positive")
        return cls("puniform", (p, float(c)), float(c) / (8 * p), p)

    @classmethod
    def hilbert(cls):
        return cls.p_uniform(2, 2)

    @classmethod
    def cat(cls, kappa, diam, slack):
        c = cat_kappa_parameter(kappa, diam, slack)
        return cls("cat", (float(kappa), float(diam), float(slack)), c / 16, 2.0)

    @property
    def has_factored_form(self):
        # eta = eps * eta_tilde with eta_tilde nondecreasing needs the cap
        # inactive on (0, 1], the only range phi_from_eta evaluates it on
        return self.coefficient <= 1.0

    def eta(self, eps, r=1.0):
        return lr_minimum(1.0, self.coefficient * eps**self.exponent)

    def eta_tilde(self, eps, r=1.0):
        if not self.has_factored_form:
            raise InvalidInputError("this modulus has no monotone factored form")
        return self.coefficient * eps ** (self.exponent - 1)

    __call__ = eta

    def to_dict(self):
        if self.family == "lp":
            return {"family": "lp", "p": self.params[0]}
        if self.family == "puniform":
            return {"family": "puniform", "p": self.params[0], "c": self.params[1]}
        kappa, diam, slack = self.params
        return {"family": "cat", "kappa": kappa, "diam": diam, "slack": slack}

    @classmethod
    def from_dict(cls, d):
        fam = d.get("family")
        if fam == "lp":
            return cls.lp(d["p"])
        if fam == "puniform":
            return cls.p_uniform(d["p"], d["c"])
        if fam == "cat":
            return cls.cat(d["kappa"], d["diam"], d["slack"])
        raise InvalidInputError(f"unknown modulus family {fam!r}")


def parse_family(spec: str) -> ConvexityModulus:
    """``lp:<p>``, ``puniform:<p>:<c>``, ``hilbert`` or ``cat:<kappa>:<diam>:<slack>``."""
    parts = spec.strip().lower().split(":")
    try:
        nums = [float(v) for v in parts[1:]]
    except ValueError:
        raise InvalidInputError(f"malformed family spec {spec!r}") from None
    if parts[0] == "lp" and len(nums) == 1:
        return ConvexityModulus.lp(nums[0])
    if parts[0] == "puniform" and len(nums) == 2:
        return ConvexityModulus.p_uniform(*nums)
    if parts[0] == "hilbert" and not nums:
        return ConvexityModulus.hilbert()
    if parts[0] == "cat" and len(nums) == 3:
        return ConvexityModulus.cat(*nums)
    raise InvalidInputError(
        f"malformed family spec {spec!r}; expected lp:<p>, puniform:<p>:<c> or cat:<kappa>:<diam>:<slack>"
    )


# ---------------------------------------------------------------------------
# conversions


def phi_from_eta(eta: ConvexityModulus, eps, b, improved=True):
    """Modulus of uniform uniqueness built from a monotone modulus of convexity.

    ``improved`` selects ``eps * eta_tilde(eps/(b+eps), b+eps)`` when ``eta``
    factors as ``eps * eta_tilde``; otherwise ``eps * eta(eps/(b+eps), b+eps)``.
    """
    _check_positive("eps", eps)
    _check_positive("b", b)
    r = b + eps
    if improved and eta.has_factored_form:
        return eps * eta.eta_tilde(eps / r, r)
    return eps * eta.eta(eps / r, r)


def lp_phi_closed_form(p, eps, b):
    """The explicit ``L_p`` modulus of uniform uniqueness."""
    p = _check_p(p)
    if p <= 2:
        return (p - 1) / 8 * eps**2 / (b + eps)
    return eps**p / (p * 2**p * (b + eps) ** (p - 1))


def p_uniform_phi_closed_form(p, c, eps, b):
    p = _check_p(p)
    return c / (8 * p) * eps**p / (b + eps) ** (p - 1)


def theta_from_phi(phi: Callable, eps, a, b):
    """Modulus of uniform betweenness from a modulus of uniform uniqueness.

    For ``eps > a`` the value at ``eps = a`` is used.
    """
    e = lr_minimum(eps, a)
    inner = phi(phi(e / 2, b) / 2, b)
    return lr_minimum(e, phi(a / (6 * b) * inner, b + e / 2)) / 2


def delta_fn(theta: Callable, eps, b):
    return theta(eps, eps, b)


def psi_fn(phi: Callable, theta: Callable, eps, b):
    return phi(delta_fn(theta, eps, b), b) / 2


def eta_from_phi_normed(phi: Callable, eps, check_grid=None):
    """Modulus of convexity of a normed space recovered from ``phi``: ``phi(eps/3, 1)/2``.

    The converse theorem assumes ``phi < 1``; it only ever evaluates
    ``phi(s, 1)`` for ``s`` in (0, 1], so that range is checked on a grid.
    """
    _check_eps(eps)
    grid = np.geomspace(1e-6, 1.0, 64) if check_grid is None else np.asarray(check_grid)
    sampled = np.array([float(phi(float(s), 1.0)) for s in grid])
    if np.any(sampled >= 1.0):
        bad = float(grid[np.argmax(sampled >= 1.0)])
        raise HypothesisViolationError(f"phi({bad:g}, 1) >= 1 violates the phi < 1 hypothesis")
    value = phi(eps / 3, 1.0)
    if np.any(value >= 1.0):
        raise HypothesisViolationError("phi(eps/3, 1) >= 1 violates the phi < 1 hypothesis")
    return value / 2


def normalize_phi_normed(phi1: Callable, eps, b):
    """Rescale a unit-diameter normed-space modulus: ``b * phi1(eps / b)``."""
    return b * phi1(eps / b)


def evaluate_safe(fn: Callable, *args):
    """Evaluate ``fn`` in floats, falling back to ``LogReal`` if the result underflows.

    Returns a float (or float array) when every float result stays above
    ``UNDERFLOW_GUARD`` and a ``LogReal`` otherwise.  An intermediate that
    underflows to zero can trip a positivity check inside ``fn``; that also
    sends the evaluation to log space, where a genuinely bad input fails again.
    """
    if any(isinstance(a, LogReal) for a in args):
        return fn(*[LogReal.from_real(a) for a in args])
    arrays = any(np.ndim(a) > 0 for a in args)
    plain = [np.asarray(a, dtype=float) if arrays else float(a) for a in args]
    with np.errstate(all="ignore"):
        try:
            value = fn(*plain)
        except (OverflowError, ZeroDivisionError, InvalidInputError):
            value = 0.0
    if isinstance(value, LogReal):
        return value
    value = np.asarray(value, dtype=float) if arrays else float(value)
    if np.all(np.isfinite(value) & (value > UNDERFLOW_GUARD)):
        return value
    return fn(*[LogReal.from_real(a) for a in plain])


# ---------------------------------------------------------------------------


@dataclass
class ModuliBundle:
    """Phi, Theta and the derived Delta, Psi for one space family and diameter ``b``."""

    phi: Callable
    theta: Callable
    b: float
    eta: ConvexityModulus | None = None
    label: str = field(default="custom")

    @classmethod
    def from_modulus(cls, eta: ConvexityModulus, b) -> "ModuliBundle":
        b = float(b)
        if not b > 0:
            raise InvalidInputError("diameter bound b must be positive")

        def phi(eps, bb):
            return phi_from_eta(eta, eps, bb)

        def theta(eps, a, bb):
            return theta_from_phi(phi, eps, a, bb)

        return cls(phi=phi, theta=theta, b=b, eta=eta, label=eta.family)

    @classmethod
    def from_family(cls, spec: str, b) -> "ModuliBundle":
        return cls.from_modulus(parse_family(spec), b)

    def Phi(self, eps):
        return self.phi(eps, self.b)

    def Theta(self, eps, a):
        return self.theta(eps, a, self.b)

    def delta(self, eps):
        return delta_fn(self.theta, eps, self.b)

    def psi(self, eps):
        return psi_fn(self.phi, self.theta, eps, self.b)

    def with_phi_scaled(self, factor) -> "ModuliBundle":
        """A deliberately corrupted copy whose phi (and hence theta) is scaled."""
        base = self.phi

        def phi(eps, bb):
            return factor * base(eps, bb)

        def theta(eps, a, bb):
            return theta_from_phi(phi, eps, a, bb)

        return ModuliBundle(phi=phi, theta=theta, b=self.b, eta=None, label=f"{self.label}*{factor:g}")

    def to_dict(self):
        if self.eta is None:
            raise InvalidInputError("only bundles built from a named family serialize")
        return {**self.eta.to_dict(), "b": self.b}

    @classmethod
    def from_dict(cls, d) -> "ModuliBundle":
        d = dict(d)
        b = d.pop("b")
        return cls.from_modulus(ConvexityModulus.from_dict(d), b)

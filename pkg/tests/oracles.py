"""Reference implementations used only by the tests.

Each oracle recomputes a quantity by a route that shares no code with the
package: the L_p moduli from their closed forms in exact rational or
high-precision arithmetic, segment distances by dense grids, and the planar
modulus of convexity by brute force over pairs of unit vectors.
"""

import math
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np


# -- closed-form L_p moduli, generic over the number type ------------------


def lp_phi(p, eps, b):
    """Modulus of uniform uniqueness of L_p from its closed form (p integer or float)."""
    if p <= 2:
        return (p - 1) * eps**2 / (8 * (b + eps))
    return eps**p / (p * 2**p * (b + eps) ** (p - 1))


def lp_theta(p, eps, a, b):
    e = eps if eps <= a else a
    half = e / 2
    inner = lp_phi(p, lp_phi(p, half, b) / 2, b)
    outer = lp_phi(p, a * inner / (6 * b), b + half)
    return (e if e <= outer else outer) / 2


def lp_psi(p, eps, b):
    return lp_phi(p, lp_theta(p, eps, eps, b), b) / 2


def smallest_N(D, b):
    """Smallest integer N with N D > b + 1, parameters read as decimals."""
    D, b = Fraction(str(D)), Fraction(str(b))
    N = 1
    while not N * D > b + 1:
        N += 1
    return N


# -- exact rationals --------------------------------------------------------


def mpq_log10(q):
    """log10 of a positive gmpy2 rational with ~1e-15 relative accuracy, any size."""

    def log10_int(n):
        k = n.bit_length()
        shift = max(k - 64, 0)
        return math.log10(int(n >> shift)) + shift * math.log10(2)

    return log10_int(q.numerator) - log10_int(q.denominator)


def psi_iterate_exact(p, eps, b, N):
    """``Psi^N(eps)`` for integer p as an exact gmpy2 rational."""
    x = gmpy2.mpq(eps)
    b = gmpy2.mpq(b)
    for _ in range(N):
        x = lp_psi(p, x, b)
    return x


def gamma_exact(p, D, b, alpha):
    """``(N, eps, Gamma)`` with Gamma an exact integer, for small N only."""
    N = smallest_N(D, b)
    Dq, bq, aq = (gmpy2.mpq(Fraction(str(v))) for v in (D, b, alpha))
    eps = min(gmpy2.mpq(1, 3 * N), Dq / 4, aq / 3)
    x = psi_iterate_exact(p, eps, bq, N)
    q = bq / lp_phi(p, x, bq)
    ceil = -((-q.numerator) // q.denominator)
    return N, eps, N * int(ceil)


# -- high precision -----------------------------------------------------------


def omega_mpmath(p, D, b, alpha, prec=200):
    """``(N, eps, log10 Gamma, log10 Omega)`` with mpmath floats (unbounded exponent)."""
    with mpmath.workprec(prec):
        N = smallest_N(D, b)
        Dm = mpmath.mpf(Fraction(str(D)).numerator) / Fraction(str(D)).denominator
        bm = mpmath.mpf(Fraction(str(b)).numerator) / Fraction(str(b)).denominator
        am = mpmath.mpf(Fraction(str(alpha)).numerator) / Fraction(str(alpha)).denominator
        eps = min(mpmath.mpf(1) / (3 * N), Dm / 4, am / 3)
        x = eps
        for _ in range(N):
            x = lp_psi(p, x, bm)
        quotient = bm / lp_phi(p, x, bm)
        gamma = N * mpmath.ceil(quotient)
        omega = N + gamma
        return N, eps, float(mpmath.log10(gamma)), float(mpmath.log10(omega))


# -- geometry by brute force --------------------------------------------------


def dense_dist_to_segment(space, z, x, y, n=1_000_001, chunk=200_000):
    """``min_t d(z, (1-t)x + ty)`` over ``n`` equally spaced t values."""
    best = math.inf
    ts = np.linspace(0.0, 1.0, n)
    for start in range(0, n, chunk):
        t = ts[start : start + chunk]
        pts = space._interpolate(np.broadcast_to(x, (len(t), len(x))), np.broadcast_to(y, (len(t), len(y))), t)
        best = min(best, float(np.min(space._distance(pts, z))))
    return best


def pair_grid_modulus(norm, eps, n=2000):
    """``min 1 - ||(x+y)/2||`` over grid pairs of unit vectors with ``||x - y|| >= eps``."""
    th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    u = np.stack([np.cos(th), np.sin(th)], axis=-1)
    u = u / norm(u)[:, None]
    best = math.inf
    for i in range(n):
        far = norm(u[i] - u) >= eps
        if np.any(far):
            best = min(best, float(np.min(1 - norm(0.5 * (u[i] + u[far])))))
    return best


def l2_modulus(eps):
    return 1 - math.sqrt(1 - eps * eps / 4)

"""The capture-time bound ``Omega = N + N * ceil(b / Phi(Psi^N(eps), b))``.

After ``Omega`` steps the lion-man distance stays below ``D + alpha`` no
matter how the man moves.  ``Psi^N(eps)`` leaves the double range for every
realistic family, so everything here runs on :class:`LogReal`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError, NumericFailureError
from .logreal import LogReal
from .moduli import ModuliBundle

_TWO_53 = 2**53


def _decimal(x) -> Fraction:
    # parameters are read as the decimals they were written as: 0.1 means 1/10
    return Fraction(repr(float(x)))


def choose_N(D, b) -> int:
    """Smallest integer ``N`` with ``N * D > b + 1``."""
    if not (D > 0 and b > 0):
        raise InvalidInputError("D and b must be positive")
    return int((_decimal(b) + 1) // _decimal(D)) + 1


def choose_eps(N, D, alpha) -> float:
    """The largest admissible auxiliary parameter ``min(1/(3N), D/4, alpha/3)``."""
    if N < 1 or not (D > 0 and alpha > 0):
        raise InvalidInputError("need N >= 1, D > 0 and alpha > 0")
    return min(1.0 / (3 * N), D / 4, alpha / 3)


@dataclass(frozen=True)
class RateParams:
    D: float
    b: float
    N: int
    alpha: float
    eps: float

    def __post_init__(self):
        if not (self.D > 0 and self.alpha > 0 and self.eps > 0):
            raise InvalidInputError("D, alpha and eps must be positive")
        if self.b < self.D:
            raise InvalidInputError(f"domain diameter bound b={self.b} must be at least D={self.D}")
        if not (_decimal(self.b) + 1 < self.N * _decimal(self.D)):
            raise InvalidInputError("N must satisfy b + 1 < N * D")
        if self.eps > min(1.0 / (3 * self.N), self.D / 4, self.alpha / 3):
            raise InvalidInputError("eps exceeds min(1/(3N), D/4, alpha/3)")

    @classmethod
    def extremal(cls, D, b, alpha) -> "RateParams":
        D, b, alpha = float(D), float(b), float(alpha)
        if not (D > 0 and alpha > 0):
            raise InvalidInputError("D and alpha must be positive")
        if b < D:
            raise InvalidInputError(f"domain diameter bound b={b} must be at least D={D}")
        N = choose_N(D, b)
        return cls(D=D, b=b, N=N, alpha=alpha, eps=choose_eps(N, D, alpha))


def psi_iterate(bundle: ModuliBundle, eps, N) -> LogReal:
    """``Psi`` composed ``N`` times, starting from ``eps``, in log space."""
    if N < 0:
        raise InvalidInputError("N must be nonnegative")
    x = LogReal.from_real(eps)
    if x.is_zero():
        raise InvalidInputError("eps must be positive")
    for step in range(int(N)):
        nxt = bundle.psi(x)
        if not isinstance(nxt, LogReal):
            nxt = LogReal.from_real(nxt)
        if math.isnan(nxt.log) or math.isinf(nxt.log):
            raise NumericFailureError(f"Psi iterate {step + 1} is not a finite positive number")
        if not nxt < x:
            raise NumericFailureError(f"Psi iterate {step + 1} failed to decrease")
        x = nxt
    return x


@dataclass(frozen=True)
class RateResult:
    params: RateParams
    gamma: LogReal
    omega: LogReal
    exact_omega: int | None
    ceiling_approximated: bool

    @property
    def N(self):
        return self.params.N

    @property
    def eps(self):
        return self.params.eps

    @property
    def log10_gamma(self) -> float:
        return float(self.gamma.log10())

    @property
    def log10_omega(self) -> float:
        return float(self.omega.log10())

    def covers(self, step) -> bool:
        """True when ``step <= Omega``."""
        return bool(LogReal.from_real(step) <= self.omega)

    def to_dict(self):
        return {
            "N": self.N,
            "eps": self.eps,
            "log10_gamma": round(self.log10_gamma, 6),
            "log10_omega": round(self.log10_omega, 6),
            "exact_omega": self.exact_omega,
            "ceiling_approximated": self.ceiling_approximated,
        }


def compute_omega(bundle: ModuliBundle, D, b, alpha) -> RateResult:
    """Evaluate the bound with the smallest admissible ``N`` and largest ``eps``."""
    params = RateParams.extremal(D, b, alpha)
    if not math.isclose(bundle.b, params.b, rel_tol=1e-12):
        raise InvalidInputError(f"bundle was built for b={bundle.b}, not b={params.b}")
    N = params.N
    psi_n = psi_iterate(bundle, params.eps, N)
    phi_n = bundle.phi(psi_n, params.b)
    if not isinstance(phi_n, LogReal):
        phi_n = LogReal.from_real(phi_n)
    if phi_n.is_zero() or math.isnan(phi_n.log):
        raise NumericFailureError("Phi(Psi^N(eps), b) is not a positive number")
    quotient = LogReal.from_real(params.b) / phi_n
    ceiling = quotient.ceil_to_integer_if_representable()
    if ceiling is not None:
        gamma_int = N * ceiling
        omega_int = N + gamma_int
        gamma = LogReal.from_real(gamma_int)
        omega = LogReal.from_real(omega_int)
        exact = omega_int if omega_int < _TWO_53 else None
        approximated = False
    else:
        gamma = quotient * N
        omega = gamma + N
        exact = None
        approximated = True
    return RateResult(
        params=params, gamma=gamma, omega=omega, exact_omega=exact, ceiling_approximated=approximated
    )

"""Generalized proportional (Hadamard and Riemann-Liouville) fractional integrals.

Every operator is reduced to  C * int_0^1 s^(alpha-1) phi(s) ds  with the
exponential kernel factor kept inside ``phi`` and handed to
:func:`hadfrac.quadrature.integrate_adaptive`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import special
from .numcore import DomainError, PowerFunction
from .quadrature import ALPHA_MAX, ALPHA_MIN, DEFAULT_RTOL, OperatorValue, integrate_adaptive

_EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class FracParams:
    """Order ``alpha`` and proportionality index ``beta``."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not ALPHA_MIN <= self.alpha <= ALPHA_MAX:
            raise ValueError(f"alpha must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {self.alpha}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")

    @property
    def kexp(self) -> float:
        """Rate (beta - 1) / beta of the exponential kernel factor."""
        return (self.beta - 1.0) / self.beta

    def norm(self) -> float:
        return 1.0 / (self.beta**self.alpha * special.gamma(self.alpha))


@dataclass(frozen=True)
class PowerImageSpec:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


def _upper(z):
    return getattr(z, "X", None) or math.inf


def _breaks_to_s(breaks, origin, L, sign):
    """Map log-abscissa breaks to the unit variable s = sign*(origin - u)/L."""
    if breaks is None or len(breaks) == 0:
        return ()
    u = np.log(np.asarray(breaks, dtype=float))
    return sign * (origin - u) / L


def _scaled(res: OperatorValue, factor: float) -> OperatorValue:
    return OperatorValue(res.value * factor, res.err_est * abs(factor), res.n_used, res.converged)


def hadamard_left(z, x, p: FracParams, a=1.0, rtol=DEFAULT_RTOL) -> OperatorValue:
    """Left-sided Hadamard proportional integral of ``z`` at ``x`` (lower limit ``a``).

    With ``a = 1`` this is the one-sided operator used by every inequality.
    """
    x, a = float(x), float(a)
    if a < 1.0 - _EDGE_RTOL:
        raise DomainError(f"lower limit must be >= 1, got {a}")
    if x < a:
        raise DomainError(f"need x >= a, got x={x}, a={a}")
    if x > _upper(z) * (1 + _EDGE_RTOL):
        raise DomainError(f"x={x} exceeds the function domain [1, {_upper(z)}]")
    if x == a:
        return OperatorValue(0.0, 0.0, 0)
    lx = math.log(x)
    L = lx - math.log(a)
    k = p.kexp
    # only meaningful when the power-type endpoint sits at t = a = 1
    mu = float(getattr(z, "log_power", 0.0)) if a == 1.0 else 0.0

    def phi(s):
        t = x * np.exp(-L * s)
        out = np.exp(k * L * s) * z(t)
        if mu:
            out = out / (1.0 - s) ** mu
        return out

    breaks = _breaks_to_s(getattr(z, "breaks", None), lx, L, 1.0)
    res = integrate_adaptive(phi, p.alpha, rtol, breaks=breaks, right_power=mu)
    return _scaled(res, L**p.alpha * p.norm())


def hadamard_right(z, x, b, p: FracParams, rtol=DEFAULT_RTOL) -> OperatorValue:
    """Right-sided Hadamard proportional integral of ``z`` at ``x`` (upper limit ``b``)."""
    x, b = float(x), float(b)
    if x < 1.0 - _EDGE_RTOL:
        raise DomainError(f"x must be >= 1, got {x}")
    if x >= b:
        raise DomainError(f"need x < b, got x={x}, b={b}")
    if b > _upper(z) * (1 + _EDGE_RTOL):
        raise DomainError(f"b={b} exceeds the function domain [1, {_upper(z)}]")
    lx = math.log(x)
    L = math.log(b) - lx
    k = p.kexp
    # a power-type endpoint at t = 1 coincides with the kernel singularity
    mu = float(getattr(z, "log_power", 0.0)) if x == 1.0 else 0.0

    def phi(s):
        t = x * np.exp(L * s)
        out = np.exp(k * L * s) * z(t)
        if mu:
            out = out / s**mu
        return out

    breaks = _breaks_to_s(getattr(z, "breaks", None), lx, L, -1.0)
    res = integrate_adaptive(phi, p.alpha + mu, rtol, breaks=breaks)
    return _scaled(res, L ** (p.alpha + mu) * p.norm())


def rl_proportional_left(z, x, p: FracParams, a=0.0, rtol=DEFAULT_RTOL) -> OperatorValue:
    """Left proportional Riemann-Liouville integral on the linear axis."""
    x, a = float(x), float(a)
    if x < a:
        raise DomainError(f"need x >= a, got x={x}, a={a}")
    if x == a:
        return OperatorValue(0.0, 0.0, 0)
    L = x - a
    k = p.kexp

    def phi(s):
        return np.exp(k * L * s) * z(x - L * s)

    br = getattr(z, "breaks", None)
    breaks = () if br is None or len(br) == 0 else (x - np.asarray(br, dtype=float)) / L
    res = integrate_adaptive(phi, p.alpha, rtol, breaks=breaks)
    return _scaled(res, L**p.alpha * p.norm())


def rl_proportional_right(z, x, p: FracParams, b, rtol=DEFAULT_RTOL) -> OperatorValue:
    """Right proportional Riemann-Liouville integral on the linear axis."""
    x, b = float(x), float(b)
    if x >= b:
        raise DomainError(f"need x < b, got x={x}, b={b}")
    L = b - x
    k = p.kexp

    def phi(s):
        return np.exp(k * L * s) * z(x + L * s)

    br = getattr(z, "breaks", None)
    breaks = () if br is None or len(br) == 0 else (np.asarray(br, dtype=float) - x) / L
    res = integrate_adaptive(phi, p.alpha, rtol, breaks=breaks)
    return _scaled(res, L**p.alpha * p.norm())


def power_image_input(spec: PowerImageSpec, beta: float, X: float) -> PowerFunction:
    """The input exp(((beta-1)/beta) ln t) (ln t)^(lam-1) whose image is known in closed form."""
    return PowerFunction(spec.lam, beta, X)


def closed_form_power_image(x, p: FracParams, spec: PowerImageSpec) -> float:
    """Exact one-sided image of :func:`power_image_input` at ``x``."""
    x = float(x)
    if not x > 1.0:
        raise DomainError(f"x must exceed 1, got {x}")
    lx = math.log(x)
    lam = spec.lam
    coef = special.gamma(lam) / (p.beta**p.alpha * special.gamma(p.alpha + lam))
    return coef * math.exp(p.kexp * lx) * lx ** (p.alpha + lam - 1.0)


class HadamardImage:
    """t -> H^{lam,beta}_{1,t} z evaluated on demand (the inner operator of a composition).

    Near t = 1 the image behaves like (ln t)^(lam + mu_z); ``log_power``
    advertises that so an outer operator can absorb it exactly.
    """

    def __init__(self, z, p: FracParams, rtol=1e-12):
        self.z = z
        self.p = p
        self.rtol = rtol
        self.breaks = np.asarray(getattr(z, "breaks", ()), dtype=float)
        self.log_power = p.alpha + float(getattr(z, "log_power", 0.0))
        self.X = _upper(z)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        out = np.empty_like(flat)
        for i, ti in enumerate(flat):
            ti = max(ti, 1.0)
            out[i] = hadamard_left(self.z, ti, self.p, rtol=self.rtol).value
        return out.reshape(t.shape)


def semigroup_compose(z, x, p1: FracParams, p2: FracParams, rtol=DEFAULT_RTOL):
    """Return (H^{p1}(H^{p2} z)(x), H^{alpha1+alpha2, beta} z(x)).

    The inner image is evaluated directly at every outer node rather than
    re-splined.
    """
    if p1.beta != p2.beta:
        raise ValueError(f"semigroup needs equal beta, got {p1.beta} and {p2.beta}")
    inner = HadamardImage(z, p2, rtol=min(rtol, 1e-12))
    composed = hadamard_left(inner, x, p1, rtol=rtol).value
    direct = hadamard_left(z, x, FracParams(p1.alpha + p2.alpha, p1.beta), rtol=rtol).value
    return composed, direct

"""Strictly positive functions on [1, X], stored as exp of a C^1 cubic in ln t.

A :class:`PositiveFunction` keeps Hermite data (knots, log-values, log-slopes)
in the log-abscissa ``u = ln t``.  Products and powers are therefore exact on
the union knot grid: a piecewise cubic on a coarse grid is also a piecewise
cubic on any refinement of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

E2 = math.exp(2.0)

# relative slack allowed at the domain edges before a DomainError
_EDGE_RTOL = 1e-12

# additive re-spline: target relative error and bisection cap
_SUM_RTOL = 1e-9
_SUM_MAX_LEVELS = 12


class DomainError(ValueError):
    """Evaluation point outside the working interval."""


@dataclass(frozen=True)
class DomainSpec:
    X: float = E2
    x: float = math.e

    def __post_init__(self):
        if not self.X > 1.0:
            raise DomainError(f"X must exceed 1, got {self.X}")
        if not 1.0 < self.x <= self.X * (1 + _EDGE_RTOL):
            raise DomainError(f"x must lie in (1, {self.X}], got {self.x}")


class PositiveFunction:
    """f(t) = exp(s(ln t)) with s a C^1 piecewise cubic Hermite interpolant.

    ``kind`` is ``"spline"`` or ``"constant"``; closed-form power inputs live
    in :class:`PowerFunction`.
    """

    log_power = 0.0

    def __init__(self, knots, logvals, slopes, kind="spline"):
        knots = np.array(knots, dtype=float)
        logvals = np.array(logvals, dtype=float)
        slopes = np.array(slopes, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("need at least two knots")
        if knots[0] != 0.0:
            raise ValueError("first knot must be 0 (t = 1)")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if logvals.shape != knots.shape or slopes.shape != knots.shape:
            raise ValueError("knots, logvals and slopes must have equal length")
        if not (np.all(np.isfinite(logvals)) and np.all(np.isfinite(slopes))):
            raise ValueError("log-values and slopes must be finite")
        for arr in (knots, logvals, slopes):
            arr.setflags(write=False)
        self.knots = knots
        self.logvals = logvals
        self.slopes = slopes
        self.kind = kind
        self._spline = CubicHermiteSpline(knots, logvals, slopes)

    @property
    def X(self) -> float:
        return math.exp(self.knots[-1])

    @property
    def breaks(self) -> np.ndarray:
        """Abscissae t where the second derivative may jump."""
        return np.exp(self.knots)

    def log(self, u, nu=0):
        """log f (or its ``nu``-th derivative) as a function of u = ln t."""
        return self._spline(u, nu)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(self._spline(np.log(t)))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "knots": self.knots.tolist(),
            "logvals": self.logvals.tolist(),
            "slopes": self.slopes.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, PositiveFunction):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.knots, other.knots)
            and np.array_equal(self.logvals, other.logvals)
            and np.array_equal(self.slopes, other.slopes)
        )

    __hash__ = None

    def __repr__(self):
        return f"PositiveFunction(kind={self.kind!r}, K={self.knots.size - 1}, X={self.X:.6g})"


class PowerFunction:
    """Closed-form input exp(((beta-1)/beta) ln t) (ln t)^(lam-1).

    Positive on (1, X]; it vanishes (lam > 1) or blows up (lam < 1) at t = 1,
    which ``log_power`` advertises to the quadrature.
    """

    kind = "power"

    def __init__(self, lam, beta, X=E2):
        if not lam > 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        if not 0 < beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {beta}")
        self.lam = float(lam)
        self.beta = float(beta)
        self._X = float(X)

    @property
    def X(self):
        return self._X

    @property
    def log_power(self):
        return self.lam - 1.0

    @property
    def breaks(self):
        return np.empty(0)

    def __call__(self, t):
        lt = np.log(np.asarray(t, dtype=float))
        k = (self.beta - 1.0) / self.beta
        return np.exp(k * lt) * lt ** (self.lam - 1.0)

    def to_json(self):
        return {"kind": "power", "lam": self.lam, "beta": self.beta, "X": self._X}

    def __repr__(self):
        return f"PowerFunction(lam={self.lam}, beta={self.beta})"


class Pointwise:
    """Callable integrand built from other functions, evaluated exactly.

    ``breaks`` collects the possible smoothness breaks of every source so the
    quadrature can split there.
    """

    def __init__(self, fn: Callable, *sources, log_power=0.0, X=None):
        self.fn = fn
        pts = [np.asarray(getattr(s, "breaks", ()), dtype=float) for s in sources]
        self.breaks = np.unique(np.concatenate(pts)) if pts else np.empty(0)
        self.log_power = log_power
        if X is None and sources:
            X = min(getattr(s, "X", math.inf) for s in sources)
        self.X = X

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def pchip_slopes(knots, values) -> np.ndarray:
    """Fritsch-Carlson-limited slopes for monotone-safe cubic interpolation."""
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.size == 2:
        sec = (values[1] - values[0]) / (knots[1] - knots[0])
        return np.array([sec, sec])
    return PchipInterpolator(knots, values).derivative()(knots)


def make_function(knots: Sequence[float], values: Sequence[float], kind="spline") -> PositiveFunction:
    """Positive C^1 function interpolating exp(values) at t = exp(knots)."""
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.ndim != 1 or knots.size < 2 or knots[0] != 0.0:
        raise ValueError("knots must be a 1-d list starting at 0 with at least two entries")
    if np.any(np.diff(knots) <= 0):
        raise ValueError("knots must be strictly increasing")
    if values.shape != knots.shape or not np.all(np.isfinite(values)):
        raise ValueError("values must be finite and match the knots")
    return PositiveFunction(knots, values, pchip_slopes(knots, values), kind=kind)


def constant(c: float, X: float = E2) -> PositiveFunction:
    if not c > 0:
        raise ValueError("constant must be positive")
    lc = math.log(c)
    return PositiveFunction([0.0, math.log(X)], [lc, lc], [0.0, 0.0], kind="constant")


def evaluate(f, t):
    """f(t) with a domain check against [1, X]."""
    arr = np.asarray(t, dtype=float)
    lo, hi = 1.0 - _EDGE_RTOL, f.X * (1 + _EDGE_RTOL)
    if np.any(arr < lo) or np.any(arr > hi) or not np.all(np.isfinite(arr)):
        raise DomainError(f"t outside [1, {f.X}]")
    out = f(arr)
    return float(out) if np.ndim(out) == 0 else out


def _union_knots(fs):
    ends = {round(f.knots[-1], 15) for f in fs}
    if len(ends) != 1:
        raise DomainError("functions live on different domains")
    return np.unique(np.concatenate([f.knots for f in fs]))


def combine(fs: Sequence[PositiveFunction], exponents: Sequence[float] | None = None, mode="product"):
    """Pointwise product prod f_i^e_i, or the sum f_1 + ... when ``mode="sum"``.

    Products are exact on the union grid.  Sums are re-splined on the union
    grid plus three refinement points per interval, then bisected until the
    midpoint error is below 1e-9 relative.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("combine() needs at least one function")
    for f in fs:
        if not isinstance(f, PositiveFunction):
            raise TypeError(f"combine() works on spline functions, got {type(f).__name__}")
    if mode == "sum":
        return _combine_sum(fs)
    if mode != "product":
        raise ValueError(f"unknown combine mode {mode!r}")
    if exponents is None or len(exponents) != len(fs):
        raise ValueError("one exponent per function")
    u = _union_knots(fs)
    y = sum(e * f.log(u) for f, e in zip(fs, exponents))
    d = sum(e * f.log(u, 1) for f, e in zip(fs, exponents))
    kind = "constant" if all(f.kind == "constant" for f in fs) else "spline"
    return PositiveFunction(u, y, d, kind=kind)


def _sum_data(fs, u):
    vals = [np.exp(f.log(u)) for f in fs]
    total = sum(vals)
    dlog = sum(v * f.log(u, 1) for v, f in zip(vals, fs)) / total
    return np.log(total), dlog


def _combine_sum(fs):
    base = _union_knots(fs)
    # three interior refinement points per interval
    frac = np.array([0.25, 0.5, 0.75])
    u = np.unique(np.concatenate([base, (base[:-1, None] + np.diff(base)[:, None] * frac).ravel()]))
    for _ in range(_SUM_MAX_LEVELS):
        y, d = _sum_data(fs, u)
        trial = CubicHermiteSpline(u, y, d)
        mids = 0.5 * (u[:-1] + u[1:])
        exact, _ = _sum_data(fs, mids)
        bad = np.abs(np.expm1(trial(mids) - exact)) > _SUM_RTOL
        if not bad.any():
            break
        u = np.unique(np.concatenate([u, mids[bad]]))
    y, d = _sum_data(fs, u)
    return PositiveFunction(u, y, d, kind="spline")


def function_from_json(obj: dict):
    kind = obj.get("kind", "spline")
    if kind == "power":
        return PowerFunction(obj["lam"], obj["beta"], obj.get("X", E2))
    knots = obj["knots"]
    logvals = obj["logvals"]
    if "slopes" in obj:
        return PositiveFunction(knots, logvals, obj["slopes"], kind=kind)
    return make_function(knots, logvals, kind=kind)

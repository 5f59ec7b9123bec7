"""Seeded random function tuples that satisfy each theorem's hypotheses by construction.

Every generator audits its output on a dense grid and raises
:class:`GeneratorAuditError` if a hypothesis fails there.  That would be a
bug in the generator, not a counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numcore import E2, PositiveFunction, combine, make_function

AUDIT_POINTS = 10_000
AUDIT_PAIR_POINTS = 200
# corridor margin, as a fraction of ln(M/m)
CORRIDOR_EPS = 0.01
_AUDIT_SLACK = 1e-12


class GeneratorAuditError(AssertionError):
    pass


@dataclass(frozen=True)
class CorridorSpec:
    """Ratio corridor m <= f/g <= M plus the exponents used by the theorems."""

    m: float = 1.0
    M: float = 1.0
    p: float = 2.0
    gamma: float = 2.0
    delta: float = 1.0

    def __post_init__(self):
        if not 0 < self.m <= self.M:
            raise ValueError(f"need 0 < m <= M, got m={self.m}, M={self.M}")
        if not self.p >= 1:
            raise ValueError(f"need p >= 1, got {self.p}")
        if not self.gamma > self.delta > 0:
            raise ValueError(f"need gamma > delta > 0, got {self.gamma}, {self.delta}")

    @property
    def q(self) -> float:
        """Conjugate exponent; infinite when p = 1."""
        return math.inf if self.p == 1 else self.p / (self.p - 1.0)


@dataclass(frozen=True)
class TrialSeed:
    seed: int
    trial_index: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([int(self.seed), int(self.trial_index)])


def audit_grid(X=E2, n=AUDIT_POINTS):
    return np.exp(np.linspace(0.0, math.log(X), n))


def _knots(rng, X):
    K = int(rng.integers(3, 9))
    return np.linspace(0.0, math.log(X), K + 1)


def _rescale(v, lo, hi):
    span = v.max() - v.min()
    if span == 0:
        return np.full_like(v, 0.5 * (lo + hi))
    return lo + (hi - lo) * (v - v.min()) / span


def random_positive(rng, X=E2, lo=-1.0, hi=1.0, knots=None) -> PositiveFunction:
    """exp of a random monotone-safe spline with log-ordinates in [lo, hi]."""
    knots = _knots(rng, X) if knots is None else knots
    return make_function(knots, rng.uniform(lo, hi, knots.size))


def monotone_positive(rng, knots, start, rise, increasing=True, allow_flat=True) -> PositiveFunction:
    """Monotone spline in log-space: cumulative nonnegative increments summing to ``rise``."""
    inc = rng.uniform(0.05, 1.0, knots.size - 1)
    if allow_flat:
        inc[rng.random(inc.size) < 0.2] = 0.0
        if not inc.any():
            inc[0] = 1.0
    steps = np.concatenate([[0.0], np.cumsum(inc)])
    steps *= rise / steps[-1]
    vals = start + (steps if increasing else -steps)
    return make_function(knots, vals)


def _fail(what, seed):
    raise GeneratorAuditError(f"{what} (seed={seed})")


def gen_corridor_pair(spec: CorridorSpec, seed: TrialSeed, X=E2):
    """(f, g) with m <= f/g <= M everywhere on [1, X]."""
    rng = seed.rng()
    knots = _knots(rng, X)
    g = random_positive(rng, X, knots=knots)
    lm, lM = math.log(spec.m), math.log(spec.M)
    if spec.m == spec.M:
        r = make_function(knots, np.full(knots.size, lm))
    else:
        eps = CORRIDOR_EPS * (lM - lm)
        r = make_function(knots, _rescale(rng.uniform(size=knots.size), lm + eps, lM - eps))
    f = combine([r, g], [1.0, 1.0])
    ratio = f(audit_grid(X)) / g(audit_grid(X))
    if ratio.min() < spec.m * (1 - _AUDIT_SLACK) or ratio.max() > spec.M * (1 + _AUDIT_SLACK):
        _fail("corridor audit failed", seed)
    return f, g


def gen_power_corridor_pair(spec: CorridorSpec, seed: TrialSeed, X=E2):
    """(f, g) with the corridor imposed on f^p / g^q (p > 1)."""
    if spec.p <= 1:
        raise ValueError("the power corridor needs p > 1")
    F, G = gen_corridor_pair(spec, seed, X)
    return combine([F], [1.0 / spec.p]), combine([G], [1.0 / spec.q])


def gen_similarly_ordered_triple(seed: TrialSeed, X=E2, g_constant=False, f_equals_h=False):
    """(f, g, h) with g non-decreasing and f/h non-increasing."""
    rng = seed.rng()
    knots = _knots(rng, X)
    g_start = rng.uniform(-1.0, 1.0)
    if g_constant:
        g = make_function(knots, np.full(knots.size, g_start))
    else:
        g = monotone_positive(rng, knots, g_start, rng.uniform(0.1, 2.0))
    h = random_positive(rng, X, knots=knots)
    if f_equals_h:
        f = h
    else:
        rho = monotone_positive(rng, knots, rng.uniform(-0.5, 0.5), rng.uniform(0.1, 2.0),
                                increasing=False)
        f = combine([rho, h], [1.0, 1.0])
    t = audit_grid(X, AUDIT_PAIR_POINTS)
    gv, ratio = g(t), f(t) / h(t)
    prod = (gv[:, None] - gv[None, :]) * (ratio[None, :] - ratio[:, None])
    if prod.min() < -_AUDIT_SLACK:
        _fail("similar-ordering audit failed", seed)
    return f, g, h


def gen_dominated_pair(p_exp: float, seed: TrialSeed, X=E2, rho_one=False):
    """(f, h) with f increasing, f/h non-increasing and f <= h."""
    if not p_exp >= 1:
        raise ValueError(f"need p >= 1, got {p_exp}")
    rng = seed.rng()
    knots = _knots(rng, X)
    f = monotone_positive(rng, knots, rng.uniform(-1.0, 0.5), rng.uniform(0.2, 2.0),
                          allow_flat=False)
    if rho_one:
        h = f
    else:
        rho = monotone_positive(rng, knots, -rng.uniform(0.0, 0.5), rng.uniform(0.1, 1.5),
                                increasing=False)
        h = combine([f, rho], [1.0, -1.0])
    t = audit_grid(X)
    fv, hv = f(t), h(t)
    if np.min(hv - fv) < -_AUDIT_SLACK * hv.max():
        _fail("f <= h audit failed", seed)
    if np.min(np.diff(fv)) < -_AUDIT_SLACK * fv.max():
        _fail("f increasing audit failed", seed)
    if np.max(np.diff(fv / hv)) > _AUDIT_SLACK:
        _fail("f/h non-increasing audit failed", seed)
    return f, h


def draw_amgm_exponents(seed: TrialSeed):
    """gamma in [1.5, 3], delta in [0.5, gamma - 0.5]."""
    rng = np.random.default_rng([int(seed.seed), int(seed.trial_index), 4])
    gamma = float(rng.uniform(1.5, 3.0))
    delta = float(rng.uniform(0.5, gamma - 0.5))
    return gamma, delta


def gen_operator_dominance_pair(spec: CorridorSpec, seed: TrialSeed, X=E2, sigma_one=False):
    """(f, g) with f >= g pointwise, g non-decreasing and g >= exp(-2).

    Pointwise domination implies H f >= H g for every positive kernel.
    """
    rng = seed.rng()
    knots = _knots(rng, X)
    g = monotone_positive(rng, knots, rng.uniform(-2.0, -0.5), rng.uniform(0.0, 1.5))
    if sigma_one:
        f = g
    else:
        sigma = random_positive(rng, X, lo=-1.0, hi=0.0, knots=knots)
        f = combine([g, sigma], [1.0, -1.0])
    t = audit_grid(X)
    fv, gv = f(t), g(t)
    if np.min(fv - gv) < -_AUDIT_SLACK * fv.max():
        _fail("f >= g audit failed", seed)
    if gv.min() < math.exp(-2.0) * (1 - _AUDIT_SLACK):
        _fail("g >= exp(-2) audit failed", seed)
    if np.min(np.diff(gv)) < -_AUDIT_SLACK * gv.max():
        _fail("g non-decreasing audit failed", seed)
    return f, g

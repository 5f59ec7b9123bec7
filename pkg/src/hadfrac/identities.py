"""Identity checks: closed-form power image, semigroup, and the beta = 1 reductions.

The beta = 1 references below are deliberately independent of the Jacobi
engine and of the Lanczos gamma: they use QUADPACK (algebraic-weight QAWS on
the singular panel) and ``math.gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .generators import random_positive
from .numcore import E2
from .operators import (
    FracParams,
    PowerImageSpec,
    closed_form_power_image,
    hadamard_left,
    power_image_input,
    rl_proportional_left,
    semigroup_compose,
)

CLOSED_FORM_TOL = 1e-8
SEMIGROUP_TOL = 1e-6
REDUCTION_TOL = 1e-10

GRID_ALPHAS = (0.3, 0.5, 1.0, 1.7)
GRID_BETAS = (0.25, 0.5, 1.0)
GRID_LAMBDAS = (1.0, 2.0, 2.5)
GRID_XS = (1.5, math.e, E2)

_QUAD = dict(epsabs=0.0, epsrel=2e-14, limit=400)


@dataclass
class IdentityCheck:
    name: str
    detail: str
    rel_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.rel_err <= self.tol)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _panel_quad(kernel_fn, weight_power, edges):
    """Sum of QUADPACK integrals over consecutive panels; the first has v^weight_power."""
    total = 0.0
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        if i == 0:
            val, _ = integrate.quad(kernel_fn, lo, hi, weight="alg", wvar=(weight_power, 0.0), **_QUAD)
        else:
            val, _ = integrate.quad(lambda v: v**weight_power * kernel_fn(v), lo, hi, **_QUAD)
        total += val
    return total


def classical_hadamard(z, x, alpha):
    """(1/Gamma(alpha)) int_1^x (ln x - ln t)^(alpha-1) z(t) dt/t, via QUADPACK."""
    lx = math.log(x)
    vb = lx - np.log(np.asarray(getattr(z, "breaks", ()), dtype=float))
    vb = np.sort(vb[(vb > 1e-12) & (vb < lx - 1e-12)])
    edges = np.concatenate([[0.0], vb, [lx]])
    val = _panel_quad(lambda v: float(z(x * math.exp(-v))), alpha - 1.0, edges)
    return val / math.gamma(alpha)


def classical_riemann_liouville(z, x, alpha, a=0.0):
    """(1/Gamma(alpha)) int_a^x (x - t)^(alpha-1) z(t) dt, via QUADPACK."""
    edges = np.array([0.0, x - a])
    val = _panel_quad(lambda v: float(z(x - v)), alpha - 1.0, edges)
    return val / math.gamma(alpha)


def closed_form_checks(alphas=GRID_ALPHAS, betas=GRID_BETAS, lams=GRID_LAMBDAS, xs=GRID_XS,
                       tol=CLOSED_FORM_TOL):
    out = []
    for a in alphas:
        for b in betas:
            p = FracParams(a, b)
            for lam in lams:
                spec = PowerImageSpec(lam)
                z = power_image_input(spec, b, E2)
                for x in xs:
                    num = hadamard_left(z, x, p).value
                    exact = closed_form_power_image(x, p, spec)
                    out.append(IdentityCheck(
                        "closed_form", f"alpha={a} beta={b} lambda={lam} x={x:.6g}",
                        _rel(num, exact), tol))
    return out


def semigroup_checks(trials=100, seed=2024, tol=SEMIGROUP_TOL):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(trials):
        a, lam = rng.uniform(0.2, 2.0, 2)
        b = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
        x = float(np.exp(rng.uniform(0.3, 2.0)))
        z = random_positive(rng)
        composed, direct = semigroup_compose(z, x, FracParams(a, b), FracParams(lam, b))
        out.append(IdentityCheck(
            "semigroup", f"trial={i} alpha={a:.4g} lambda={lam:.4g} beta={b} x={x:.6g}",
            _rel(composed, direct), tol))
    return out


def reduction_checks(n=50, seed=7, tol=REDUCTION_TOL):
    """beta = 1: proportional operators against the classical Hadamard and RL integrals."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        a = float(rng.uniform(0.2, 3.0))
        x = float(np.exp(rng.uniform(0.3, 2.0)))
        z = random_positive(rng)
        ours = hadamard_left(z, x, FracParams(a, 1.0)).value
        ref = classical_hadamard(z, x, a)
        out.append(IdentityCheck("reduction_hadamard", f"fn={i} alpha={a:.4g} x={x:.6g}",
                                 _rel(ours, ref), tol))
    for a in (0.3, 1.0, 1.7):
        zt = lambda t: np.exp(np.sin(t))  # noqa: E731
        ours = rl_proportional_left(zt, 1.5, FracParams(a, 1.0), a=0.0).value
        ref = classical_riemann_liouville(zt, 1.5, a, 0.0)
        out.append(IdentityCheck("reduction_rl", f"alpha={a}", _rel(ours, ref), tol))
    return out


def run_identity_checks(semigroup_trials=100, reduction_funcs=50, seed=2024):
    return (closed_form_checks()
            + semigroup_checks(semigroup_trials, seed)
            + reduction_checks(reduction_funcs, seed + 1))

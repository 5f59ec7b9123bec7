"""Numerical checkers for the ten Minkowski-type inequalities and the suite runner.

Each checker evaluates both sides with the one-sided operator, then reports a
signed relative margin that is nonnegative when the inequality holds in its
stated orientation.  Integrands such as (f + g)^p are evaluated pointwise and
exactly at the quadrature nodes, never re-splined.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .generators import (
    CorridorSpec,
    TrialSeed,
    draw_amgm_exponents,
    gen_corridor_pair,
    gen_dominated_pair,
    gen_operator_dominance_pair,
    gen_power_corridor_pair,
    gen_similarly_ordered_triple,
)
from .numcore import E2, Pointwise, function_from_json
from .operators import FracParams, hadamard_left

THEOREMS = ("T3_1", "T3_2", "T4_1", "T4_2", "T4_3", "T4_4", "T4_5", "T4_6", "T4_7", "T4_8")
# T4_4 is censused, never asserted
ASSERTED = tuple(t for t in THEOREMS if t != "T4_4")

HOLDS, VIOLATED, INCONCLUSIVE, ERROR = "holds", "violated", "inconclusive", "error"

CSV_COLUMNS = (
    "theorem_id", "alpha", "beta", "alpha2", "beta2", "p", "q", "gamma", "delta",
    "m", "M", "x", "lhs", "rhs", "margin", "verdict", "seed", "trial_index", "err_budget",
)

DEFAULT_TOL_REL = 1e-9
DEFAULT_RTOL = 1e-10
_ROUNDING = 4 * np.finfo(float).eps


@dataclass
class InequalityReport:
    theorem_id: str
    params: FracParams
    x: float
    lhs: float
    rhs: float
    margin: float
    verdict: str
    err_budget: float
    params2: Optional[FracParams] = None
    p: Optional[float] = None
    q: Optional[float] = None
    gamma: Optional[float] = None
    delta: Optional[float] = None
    m: Optional[float] = None
    M: Optional[float] = None
    seed: Optional[TrialSeed] = None
    functions: dict = field(default_factory=dict)
    variant: str = ""
    note: str = ""

    def row(self) -> dict:
        p2 = self.params2
        return {
            "theorem_id": self.theorem_id,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "alpha2": p2.alpha if p2 else None,
            "beta2": p2.beta if p2 else None,
            "p": self.p,
            "q": self.q,
            "gamma": self.gamma,
            "delta": self.delta,
            "m": self.m,
            "M": self.M,
            "x": self.x,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "verdict": self.verdict,
            "seed": self.seed.seed if self.seed else None,
            "trial_index": self.seed.trial_index if self.seed else None,
            "err_budget": self.err_budget,
        }


def margin_of(lhs, rhs, orientation):
    """Signed normalized slack; ``orientation`` is "le" (lhs <= rhs) or "ge"."""
    norm = max(abs(lhs), abs(rhs), 1e-300)
    return (rhs - lhs) / norm if orientation == "le" else (lhs - rhs) / norm


def classify(margin, err_budget, tol_rel=DEFAULT_TOL_REL):
    if not math.isfinite(margin):
        return ERROR
    if margin >= -tol_rel:
        return HOLDS
    if abs(margin) <= err_budget:
        return INCONCLUSIVE
    return VIOLATED


class _Tally:
    """Evaluates one-sided operators at a fixed x and accumulates relative errors."""

    def __init__(self, x, rtol):
        self.x = x
        self.rtol = rtol
        self.budget = 0.0

    def H(self, p, fn, *sources, weight=1.0):
        res = hadamard_left(Pointwise(fn, *sources), self.x, p, rtol=self.rtol)
        self.budget += abs(weight) * (res.rel_err + _ROUNDING)
        return res.value


def _report(tid, tally, lhs, rhs, orientation, params, tol_rel, **extra):
    margin = margin_of(lhs, rhs, orientation)
    return InequalityReport(
        theorem_id=tid, params=params, x=tally.x, lhs=lhs, rhs=rhs, margin=margin,
        verdict=classify(margin, tally.budget, tol_rel), err_budget=tally.budget, **extra,
    )


def _corridor_cols(spec):
    return dict(p=spec.p, q=spec.q if spec.p > 1 else None, m=spec.m, M=spec.M)


def check_T3_1(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL, literal=False):
    """Reverse Minkowski: (H f^p)^(1/p) + (H g^p)^(1/p) <= C (H (f+g)^p)^(1/p).

    ``literal=True`` uses g^q in the second term instead of g^p.
    """
    P, m, M = spec.p, spec.m, spec.M
    T = _Tally(x, rtol)
    A = T.H(p, lambda t: f(t) ** P, f, weight=1 / P)
    if literal:
        Q = spec.q
        B = T.H(p, lambda t: g(t) ** Q, g, weight=1 / P)
    else:
        B = T.H(p, lambda t: g(t) ** P, g, weight=1 / P)
    S = T.H(p, lambda t: (f(t) + g(t)) ** P, f, g, weight=1 / P)
    C = (1 + M * (m + 2)) / ((m + 1) * (M + 1))
    lhs = A ** (1 / P) + B ** (1 / P)
    rhs = C * S ** (1 / P)
    return _report("T3_1", T, lhs, rhs, "le", p, tol_rel,
                   variant="literal_gq" if literal else "", **_corridor_cols(spec))


def check_T3_2(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL):
    """(H f^p)^(2/p) + (H g^p)^(2/p) >= ((M+1)(m+1)/M - 2) (H f^p)^(1/p) (H g^p)^(1/p)."""
    P, m, M = spec.p, spec.m, spec.M
    T = _Tally(x, rtol)
    A = T.H(p, lambda t: f(t) ** P, f, weight=2 / P)
    B = T.H(p, lambda t: g(t) ** P, g, weight=2 / P)
    K = (M + 1) * (m + 1) / M - 2
    lhs = A ** (2 / P) + B ** (2 / P)
    rhs = K * A ** (1 / P) * B ** (1 / P)
    return _report("T3_2", T, lhs, rhs, "ge", p, tol_rel, **_corridor_cols(spec))


def _need_q(spec):
    if spec.p <= 1:
        raise ValueError("this inequality needs p > 1 (finite conjugate exponent)")
    return spec.q


def check_T4_1(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL):
    """(H f)^(1/p) (H g)^(1/q) <= (M/m)^(1/pq) H(f^(1/p) g^(1/q))."""
    P, Q = spec.p, _need_q(spec)
    T = _Tally(x, rtol)
    A = T.H(p, f, f, weight=1 / P)
    B = T.H(p, g, g, weight=1 / Q)
    S = T.H(p, lambda t: f(t) ** (1 / P) * g(t) ** (1 / Q), f, g)
    lhs = A ** (1 / P) * B ** (1 / Q)
    rhs = (spec.M / spec.m) ** (1 / (P * Q)) * S
    return _report("T4_1", T, lhs, rhs, "le", p, tol_rel, **_corridor_cols(spec))


def check_T4_2(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL):
    """(H f^p)^(1/p) (H g^q)^(1/q) <= (M/m)^(1/pq) H(fg), corridor on f^p / g^q."""
    P, Q = spec.p, _need_q(spec)
    T = _Tally(x, rtol)
    A = T.H(p, lambda t: f(t) ** P, f, weight=1 / P)
    B = T.H(p, lambda t: g(t) ** Q, g, weight=1 / Q)
    S = T.H(p, lambda t: f(t) * g(t), f, g)
    lhs = A ** (1 / P) * B ** (1 / Q)
    rhs = (spec.M / spec.m) ** (1 / (P * Q)) * S
    return _report("T4_2", T, lhs, rhs, "le", p, tol_rel, **_corridor_cols(spec))


def check_T4_3(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL):
    """H(fg) <= c_p H(f^p + g^p) + c_q H(f^q + g^q)."""
    P, Q, m, M = spec.p, _need_q(spec), spec.m, spec.M
    T = _Tally(x, rtol)
    lhs = T.H(p, lambda t: f(t) * g(t), f, g)
    Sp = T.H(p, lambda t: f(t) ** P + g(t) ** P, f, g)
    Sq = T.H(p, lambda t: f(t) ** Q + g(t) ** Q, f, g)
    cp = 2 ** (P - 1) * M**P / (P * (M + 1) ** P)
    cq = 2 ** (Q - 1) / (Q * (m + 1) ** Q)
    rhs = cp * Sp + cq * Sq
    return _report("T4_3", T, lhs, rhs, "le", p, tol_rel, **_corridor_cols(spec))


def check_T4_4(f, g, spec: CorridorSpec, x, p: FracParams, rtol=DEFAULT_RTOL,
               tol_rel=DEFAULT_TOL_REL):
    """H(f^(gamma-delta)) <= H(f^gamma g^(-delta)) under H f >= H g."""
    ga, de = spec.gamma, spec.delta
    T = _Tally(x, rtol)
    lhs = T.H(p, lambda t: f(t) ** (ga - de), f)
    rhs = T.H(p, lambda t: f(t) ** ga * g(t) ** (-de), f, g)
    return _report("T4_4", T, lhs, rhs, "le", p, tol_rel, gamma=ga, delta=de)


def check_T4_5(f, g, h, x, p: FracParams, p2: Optional[FracParams] = None,
               rtol=DEFAULT_RTOL, tol_rel=DEFAULT_TOL_REL):
    """Chebyshev-type ratio inequality; the two-parameter form when ``p2`` is given."""
    T = _Tally(x, rtol)
    gf = lambda t: g(t) * f(t)  # noqa: E731
    gh = lambda t: g(t) * h(t)  # noqa: E731
    if p2 is None:
        lhs = T.H(p, f, f) / T.H(p, h, h)
        rhs = T.H(p, gf, g, f) / T.H(p, gh, g, h)
        return _report("T4_5", T, lhs, rhs, "ge", p, tol_rel)
    f1, f2 = T.H(p, f, f), T.H(p2, f, f)
    h1, h2 = T.H(p, h, h), T.H(p2, h, h)
    gf1, gf2 = T.H(p, gf, g, f), T.H(p2, gf, g, f)
    gh1, gh2 = T.H(p, gh, g, h), T.H(p2, gh, g, h)
    lhs = f1 * gh2 + f2 * gh1
    rhs = h1 * gf2 + h2 * gf1
    return _report("T4_6", T, lhs, rhs, "ge", p, tol_rel, params2=p2)


def check_T4_7(f, h, p_exp, x, p: FracParams, p2: Optional[FracParams] = None,
               rtol=DEFAULT_RTOL, tol_rel=DEFAULT_TOL_REL):
    """H f / H h >= H f^p / H h^p; the two-parameter form when ``p2`` is given."""
    P = float(p_exp)
    T = _Tally(x, rtol)
    fp = lambda t: f(t) ** P  # noqa: E731
    hp = lambda t: h(t) ** P  # noqa: E731
    if p2 is None:
        lhs = T.H(p, f, f) / T.H(p, h, h)
        rhs = T.H(p, fp, f) / T.H(p, hp, h)
        return _report("T4_7", T, lhs, rhs, "ge", p, tol_rel, p=P)
    f1, f2 = T.H(p, f, f), T.H(p2, f, f)
    h1, h2 = T.H(p, h, h), T.H(p2, h, h)
    fp1, fp2 = T.H(p, fp, f), T.H(p2, fp, f)
    hp1, hp2 = T.H(p, hp, h), T.H(p2, hp, h)
    lhs = f1 * hp2 + f2 * hp1
    rhs = h1 * fp2 + h2 * fp1
    return _report("T4_8", T, lhs, rhs, "ge", p, tol_rel, p=P, params2=p2)


# scalar sub-steps used inside the proofs; each returns (lhs, rhs) for lhs <= rhs

def young_check(a, b, p):
    """ab <= a^p/p + b^q/q."""
    q = p / (p - 1.0)
    return a * b, a**p / p + b**q / q


def power_sum_check(a, b, r):
    """(a+b)^r <= 2^(r-1) (a^r + b^r) for r >= 1."""
    return (a + b) ** r, 2 ** (r - 1) * (a**r + b**r)


def weighted_amgm_check(f, g, gamma, delta):
    """gamma/(gamma-delta) f^(gamma-delta) - delta/(gamma-delta) g^(gamma-delta) <= f^gamma g^-delta."""
    d = gamma - delta
    return gamma / d * f**d - delta / d * g**d, f**gamma * g ** (-delta)


@dataclass
class SuiteConfig:
    trials: int = 1000
    tol_rel: float = DEFAULT_TOL_REL
    rtol: float = DEFAULT_RTOL
    alphas: tuple = (0.3, 0.5, 1.0, 1.7)
    betas: tuple = (0.25, 0.5, 1.0)
    ps: tuple = (1.0, 1.5, 2.0, 4.0)
    corridors: tuple = ((0.5, 2.0), (0.9, 1.1), (0.1, 10.0))
    xs: tuple = (1.5, math.e, E2)
    seed: int = 12345
    theorems: tuple = THEOREMS
    X: float = E2
    degenerate: bool = False
    literal_variant: bool = True
    workers: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1e-12 <= self.tol_rel <= 1e-6:
            raise ValueError("tol_rel must lie in [1e-12, 1e-6]")
        bad = set(self.theorems) - set(THEOREMS)
        if bad:
            raise ValueError(f"unknown theorem ids {sorted(bad)}")
        if max(self.xs) > self.X * (1 + 1e-12) or min(self.xs) <= 1:
            raise ValueError("every x must lie in (1, X]")

    def to_json(self):
        d = asdict(self)
        d["theorems"] = list(self.theorems)
        return d


@dataclass
class SuiteResult:
    config: SuiteConfig
    reports: list
    variants: list
    summary: dict

    def to_csv(self, variants=False) -> str:
        return reports_to_csv(self.variants if variants else self.reports)

    def to_json(self) -> str:
        doc = {
            "config": self.config.to_json(),
            "summary": self.summary,
            "reports": [report_to_json(r) for r in self.reports],
            "variants": [report_to_json(r) for r in self.variants],
        }
        return json.dumps(doc, indent=1) + "\n"


def _grid(config: SuiteConfig, tid):
    ab = [FracParams(a, b) for a in config.alphas for b in config.betas]
    ps = list(config.ps)
    qps = [p for p in ps if p > 1]
    cors = list(config.corridors)
    xs = list(config.xs)
    if tid in ("T3_1", "T3_2"):
        return [dict(p=a, P=P, c=c, x=x) for a in ab for P in ps for c in cors for x in xs]
    if tid in ("T4_1", "T4_2", "T4_3"):
        return [dict(p=a, P=P, c=c, x=x) for a in ab for P in qps for c in cors for x in xs]
    if tid in ("T4_4", "T4_5"):
        return [dict(p=a, x=x) for a in ab for x in xs]
    if tid == "T4_6":
        return [dict(p=a, p2=b, x=x) for a in ab for b in ab for x in xs]
    if tid == "T4_7":
        return [dict(p=a, P=P, x=x) for a in ab for P in ps for x in xs]
    return [dict(p=a, p2=b, P=P, x=x) for a in ab for b in ab for P in ps for x in xs]


def trial_seed(master, tid, i) -> TrialSeed:
    ss = np.random.SeedSequence([int(master), THEOREMS.index(tid), int(i)])
    return TrialSeed(int(ss.generate_state(1, np.uint64)[0]), int(i))


def _plan(config: SuiteConfig):
    tasks = []
    for tid in config.theorems:
        grid = _grid(config, tid)
        order = np.random.default_rng([int(config.seed), THEOREMS.index(tid)]).permutation(len(grid))
        for i in range(config.trials):
            tasks.append((tid, i, grid[order[i % len(grid)]]))
    return tasks


def _run_trial(task, config: SuiteConfig):
    tid, i, pt = task
    seed = trial_seed(config.seed, tid, i)
    p, x, X = pt["p"], pt["x"], config.X
    deg = config.degenerate
    kw = dict(rtol=config.rtol, tol_rel=config.tol_rel)
    variant = None
    if tid in ("T3_1", "T3_2", "T4_1", "T4_2", "T4_3"):
        m, M = (1.0, 1.0) if deg else pt["c"]
        spec = CorridorSpec(m=m, M=M, p=pt["P"])
        if tid == "T4_2":
            f, g = gen_power_corridor_pair(spec, seed, X)
        else:
            f, g = gen_corridor_pair(spec, seed, X)
        funcs = {"f": f, "g": g}
        checker = {"T3_1": check_T3_1, "T3_2": check_T3_2, "T4_1": check_T4_1,
                   "T4_2": check_T4_2, "T4_3": check_T4_3}[tid]
        rep = checker(f, g, spec, x, p, **kw)
        if tid == "T3_1" and config.literal_variant and spec.p > 1:
            variant = check_T3_1(f, g, spec, x, p, literal=True, **kw)
    elif tid == "T4_4":
        ga, de = draw_amgm_exponents(seed)
        spec = CorridorSpec(gamma=ga, delta=de)
        f, g = gen_operator_dominance_pair(spec, seed, X, sigma_one=deg)
        funcs = {"f": f, "g": g}
        rep = check_T4_4(f, g, spec, x, p, **kw)
    elif tid in ("T4_5", "T4_6"):
        f, g, h = gen_similarly_ordered_triple(seed, X, f_equals_h=deg)
        funcs = {"f": f, "g": g, "h": h}
        rep = check_T4_5(f, g, h, x, p, pt.get("p2"), **kw)
    else:
        f, h = gen_dominated_pair(pt["P"], seed, X, rho_one=deg)
        funcs = {"f": f, "h": h}
        rep = check_T4_7(f, h, pt["P"], x, p, pt.get("p2"), **kw)
    serial = {k: v.to_json() for k, v in funcs.items()}
    for r in (rep, variant):
        if r is not None:
            r.seed = seed
            r.functions = serial
    return rep, variant


def _safe_trial(task, config):
    try:
        return _run_trial(task, config)
    except Exception as exc:  # a crashing checker is recorded, the suite continues
        tid, i, pt = task
        rep = InequalityReport(
            theorem_id=tid, params=pt["p"], x=pt["x"], lhs=math.nan, rhs=math.nan,
            margin=math.nan, verdict=ERROR, err_budget=math.nan, params2=pt.get("p2"),
            seed=trial_seed(config.seed, tid, i), note=f"{type(exc).__name__}: {exc}",
        )
        return rep, None


def _worker_count(config):
    if config.workers is not None:
        return max(1, int(config.workers))
    return max(1, int(os.environ.get("HADFRAC_THREADS", "1") or 1))


def summarize(reports):
    out = {}
    for tid in THEOREMS:
        rs = [r for r in reports if r.theorem_id == tid]
        if not rs:
            continue
        ms = np.array([r.margin for r in rs if math.isfinite(r.margin)])
        out[tid] = {
            "trials": len(rs),
            "min_margin": float(ms.min()) if ms.size else None,
            "mean_margin": float(ms.mean()) if ms.size else None,
            "violations": sum(r.verdict == VIOLATED for r in rs),
            "inconclusive": sum(r.verdict == INCONCLUSIVE for r in rs),
            "errors": sum(r.verdict == ERROR for r in rs),
            "violation_seeds": [[r.seed.seed, r.seed.trial_index] for r in rs
                                if r.verdict == VIOLATED],
        }
    return out


def run_suite(config: SuiteConfig) -> SuiteResult:
    """Sweep the configured grids; deterministic given ``config.seed``."""
    tasks = _plan(config)
    workers = _worker_count(config)
    if workers == 1:
        results = [_safe_trial(t, config) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_trial, tasks, [config] * len(tasks), chunksize=16))
    key = lambda r: (THEOREMS.index(r.theorem_id), r.seed.trial_index)  # noqa: E731
    reports = sorted((r for r, _ in results), key=key)
    variants = sorted((v for _, v in results if v is not None), key=key)
    return SuiteResult(config, reports, variants, summarize(reports))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        row = r.row()
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def report_to_json(r: InequalityReport) -> dict:
    d = {k: _jsonable(v) for k, v in r.row().items()}
    d["functions"] = r.functions
    if r.variant:
        d["variant"] = r.variant
    if r.note:
        d["note"] = r.note
    return d


def replay(record: dict, rtol=DEFAULT_RTOL, tol_rel=DEFAULT_TOL_REL) -> InequalityReport:
    """Re-evaluate one recorded trial from its embedded function serializations."""
    tid = record["theorem_id"]
    fn = {k: function_from_json(v) for k, v in record["functions"].items()}
    p = FracParams(record["alpha"], record["beta"])
    p2 = FracParams(record["alpha2"], record["beta2"]) if record.get("alpha2") is not None else None
    x = record["x"]
    kw = dict(rtol=rtol, tol_rel=tol_rel)
    literal = record.get("variant") == "literal_gq"
    if tid in ("T3_1", "T3_2", "T4_1", "T4_2", "T4_3"):
        spec = CorridorSpec(m=record["m"], M=record["M"], p=record["p"])
        if tid == "T3_1":
            return check_T3_1(fn["f"], fn["g"], spec, x, p, literal=literal, **kw)
        checker = {"T3_2": check_T3_2, "T4_1": check_T4_1, "T4_2": check_T4_2,
                   "T4_3": check_T4_3}[tid]
        return checker(fn["f"], fn["g"], spec, x, p, **kw)
    if tid == "T4_4":
        spec = CorridorSpec(gamma=record["gamma"], delta=record["delta"])
        return check_T4_4(fn["f"], fn["g"], spec, x, p, **kw)
    if tid in ("T4_5", "T4_6"):
        return check_T4_5(fn["f"], fn["g"], fn["h"], x, p, p2, **kw)
    return check_T4_7(fn["f"], fn["h"], record["p"], x, p, p2, **kw)

"""Gamma function via the Lanczos approximation (real positive arguments)."""

import math
from contextlib import contextmanager

# g = 7, n = 9 coefficient set
_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# test hook: multiplies every gamma() result; see perturbed_gamma
_scale = 1.0


def _lanczos(x):
    x -= 1.0
    acc = _COEF[0]
    for k in range(1, len(_COEF)):
        acc += _COEF[k] / (x + k)
    t = x + _G + 0.5
    return _SQRT_2PI * t ** (x + 0.5) * math.exp(-t) * acc


def gamma(x):
    """Gamma(x) for real x > 0.

    Arguments below 1/2 go through the reflection formula.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma() needs a positive argument, got {x!r}")
    if x < 0.5:
        value = math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    else:
        value = _lanczos(x)
    return value * _scale


@contextmanager
def perturbed_gamma(factor):
    """Temporarily scale every gamma() value by ``factor`` (negative controls)."""
    global _scale
    old = _scale
    _scale = float(factor)
    try:
        yield
    finally:
        _scale = old

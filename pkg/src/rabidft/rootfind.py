"""Safeguarded root finding for monotone scalar maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from .params import BracketError


@dataclass
class RootResult:
    """Outcome of :func:`decreasing_root`.

    ``lo``/``hi`` bracket the root with ``f(lo) > 0 > f(hi)`` unless the
    search stopped on ``|f| <= ftol`` at ``x``.  Payloads returned by the
    objective are kept for the final point and both bracket ends.
    """

    x: float
    fx: float
    payload: Any
    lo: float
    hi: float
    f_lo: float
    f_hi: float
    payload_lo: Any
    payload_hi: Any
    iterations: int
    converged: bool


def decreasing_root(
    func: Callable[[float], tuple[float, Any]],
    x0: float,
    step: float,
    ftol: float,
    xtol: float,
    max_expand: int = 80,
    max_iter: int = 300,
) -> RootResult:
    """Root of a continuous, strictly decreasing function.

    ``func`` returns ``(value, payload)``.  A bracket is grown from ``x0`` by
    step doubling, then refined with Illinois false position; a bisection
    step is forced whenever two consecutive updates fail to halve the bracket.
    Stops when ``|f| <= ftol`` (``converged=True``) or the bracket is narrower
    than ``xtol`` (``converged=False``).
    """
    count = 0
    f0, pay0 = func(x0)
    count += 1
    if abs(f0) <= ftol:
        return RootResult(x0, f0, pay0, x0, x0, f0, f0, pay0, pay0, count, True)
    direction = 1.0 if f0 > 0 else -1.0
    a, fa, pa = x0, f0, pay0
    step = abs(step) if step else 1.0
    for _ in range(max_expand):
        b = x0 + direction * step
        fb, pb = func(b)
        count += 1
        if abs(fb) <= ftol:
            return RootResult(b, fb, pb, b, b, fb, fb, pb, pb, count, True)
        if (fb > 0) != (f0 > 0):
            break
        a, fa, pa = b, fb, pb
        step *= 2.0
    else:
        raise BracketError(f"no sign change found from x0={x0} within {max_expand} doublings")
    if direction > 0:
        lo, f_lo, p_lo, hi, f_hi, p_hi = a, fa, pa, b, fb, pb
    else:
        lo, f_lo, p_lo, hi, f_hi, p_hi = b, fb, pb, a, fa, pa

    side = 0
    width_prev = hi - lo
    stalls = 0
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        # Illinois weights damp the endpoint that stays fixed
        wl = f_lo * (0.5 if side == -1 else 1.0)
        wh = f_hi * (0.5 if side == 1 else 1.0)
        x = (lo * wh - hi * wl) / (wh - wl) if wh != wl else 0.5 * (lo + hi)
        if stalls >= 2 or not (lo < x < hi) or not math.isfinite(x):
            x = 0.5 * (lo + hi)
            stalls = 0
        fx, px = func(x)
        count += 1
        if abs(fx) <= ftol:
            return RootResult(x, fx, px, lo, hi, f_lo, f_hi, p_lo, p_hi, count, True)
        if fx > 0:
            lo, f_lo, p_lo = x, fx, px
            side = 1
        else:
            hi, f_hi, p_hi = x, fx, px
            side = -1
        width = hi - lo
        stalls = stalls + 1 if width > 0.5 * width_prev else 0
        if stalls == 0:
            width_prev = width
    x, fx, px = (lo, f_lo, p_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi, p_hi)
    return RootResult(x, fx, px, lo, hi, f_lo, f_hi, p_lo, p_hi, count, False)

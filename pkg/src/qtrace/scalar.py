r"""Scalar constants behind the logarithmic trace bound.

Everything in this module is a pure function of real numbers and works in
nats.  The central quantity is the best constant ``g`` in the pointwise
inequality

.. math::

    \log(1+r) \le g \, r^s  \qquad (r \ge 0,\; 0 < s \le 1),

namely ``g_s = sup_{r>0} log(1+r)/r**s``.  The supremum is attained at the
unique positive root ``r*`` of the stationarity equation
``r = s(1+r)log(1+r)``, which reduces to a Lambert W evaluation, and then

.. math::

    g_s = \frac{{r^*}^{1-s}}{s(1+r^*)} = \frac{\log(1+r^*)}{{r^*}^s}.

The module also provides the weaker classical prefactor
``c_s = s**s (1-s)**(1-s)`` and grid certification of three scalar
inequalities that the operator-level checks ultimately rest on.

Numerical domain: ``r*`` grows like ``exp(1/s)``, so for ``s`` below about
``1.4e-3`` it is not representable in double precision.  The solver switches
to a log-domain formulation there and reports ``r_star = inf`` together with
a relative residual certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "THRESHOLD_S",
    "RenyiOrder",
    "ScalarConstants",
    "GridMargin",
    "as_order",
    "lambert_w_minus1",
    "lambert_w0",
    "critical_r",
    "c_constant",
    "g_constant",
    "sweep_constants",
    "check_scalar_log_bound",
    "check_aux_inequality",
    "check_rational_bound",
]

#: Order at which the maximizer of log(1+r)/r**s crosses r = 1.
THRESHOLD_S = 1.0 / (2.0 * math.log(2.0))

#: Below this order the direct solve would overflow (r* ~ exp(1/s)); the
#: root is found in log space instead.
_LOG_DOMAIN_S = 0.002

_BRANCH_X = -1.0 / math.e


@dataclass(frozen=True)
class RenyiOrder:
    """Order parameter ``s`` in ``(0, 1]`` with ``alpha = 1 + s``.

    ``regime`` classifies ``s`` against the threshold ``1/(2 log 2)``:
    below it the maximizer of ``log(1+r)/r**s`` sits at ``r > 1``, above it
    at ``r < 1`` (``at_threshold`` within ``1e-12``).
    """

    s: float
    alpha: float = field(init=False)
    regime: str = field(init=False)

    def __post_init__(self) -> None:
        s = float(self.s)
        if not math.isfinite(s) or not 0.0 < s <= 1.0:
            raise ValueError(f"order s must lie in (0, 1], got {s!r}")
        if s < THRESHOLD_S - 1e-12:
            regime = "below_threshold"
        elif abs(s - THRESHOLD_S) <= 1e-12:
            regime = "at_threshold"
        else:
            regime = "above_threshold"
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "alpha", 1.0 + s)
        object.__setattr__(self, "regime", regime)


def as_order(s: float | RenyiOrder) -> RenyiOrder:
    """Coerce a float (or pass through a :class:`RenyiOrder`)."""
    return s if isinstance(s, RenyiOrder) else RenyiOrder(s)


@dataclass(frozen=True)
class ScalarConstants:
    """All scalar constants attached to one order ``s``.

    ``residual`` certifies the root solve: it is
    ``|r* - s(1+r*)log(1+r*)|`` when ``r_star`` is finite and the residual
    of the equivalent log-domain equation (a relative quantity) when
    ``r_star`` overflows to ``inf``.
    """

    s: float
    g_s: float
    c_s: float
    c_s_over_s: float
    r_star: float
    ratio: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "g_s": self.g_s,
            "c_s": self.c_s,
            "c_s_over_s": self.c_s_over_s,
            "r_star": self.r_star,
            "ratio": self.ratio,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class GridMargin:
    """Result of certifying an inequality on a grid: the worst margin."""

    min_margin: float
    argmin_r: float
    n_points: int


# ---------------------------------------------------------------------------
# Lambert W on the two real branches over (-1/e, 0)
# ---------------------------------------------------------------------------


def _halley_w(x: float, w: float, lo: float, hi: float) -> float:
    """Halley iteration for ``w exp(w) = x``, confined to ``(lo, hi)``."""
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0))
        dw = f / denom
        w_new = w - dw
        if not lo < w_new < hi:
            w_new = 0.5 * (w + (lo if w_new <= lo else hi))
        if abs(w_new - w) <= 1e-15 * (1.0 + abs(w_new)):
            return w_new
        w = w_new
    return w


def _branch_series(p: float) -> float:
    # Expansion of W around the branch point -1/e; p = +sqrt(2(1+e*x))
    # selects the principal branch, p < 0 the lower one.
    return -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0


def _check_w_residual(w: float, x: float, name: str) -> float:
    resid = abs(w * math.exp(w) - x)
    if resid > 1e-14 * abs(x):
        raise ArithmeticError(
            f"{name} failed to converge at x={x!r}: residual {resid:.3e}"
        )
    return w


def lambert_w_minus1(x: float) -> float:
    """Lower real branch ``W_{-1}`` on ``(-1/e, 0)``.

    Returns ``w <= -1`` with ``w exp(w) = x`` to relative residual 1e-14.
    The float closest to ``-1/e`` itself is accepted as the branch-point
    limit and maps to ``-1``.
    """
    x = float(x)
    if x >= 0.0:
        raise ValueError(f"W_-1 requires x < 0, got {x!r}")
    p2 = 2.0 * (1.0 + math.e * x)  # 2(1 + e*x), nonnegative inside the domain
    if p2 < 0.0:
        if p2 >= -1e-12:
            return -1.0
        raise ValueError(f"W_-1 requires x > -1/e, got {x!r}")
    if p2 < 2e-6:
        # Branch-point series; Halley is ill-conditioned here.
        return _branch_series(-math.sqrt(p2))
    if p2 < 2e-2:
        w0 = _branch_series(-math.sqrt(p2))
    else:
        lx = math.log(-x)
        w0 = lx - math.log(-lx)
    w = _halley_w(x, min(w0, -1.0 - 1e-12), -math.inf, -1.0)
    return _check_w_residual(w, x, "lambert_w_minus1")


def lambert_w0(x: float) -> float:
    """Principal branch ``W_0`` restricted to ``(-1/e, 0)``.

    Same contract as :func:`lambert_w_minus1` but returns ``w`` in
    ``(-1, 0)``.
    """
    x = float(x)
    if x >= 0.0:
        raise ValueError(f"this helper covers x < 0 only, got {x!r}")
    p2 = 2.0 * (1.0 + math.e * x)
    if p2 < 0.0:
        if p2 >= -1e-12:
            return -1.0
        raise ValueError(f"W_0 requires x > -1/e, got {x!r}")
    if p2 < 2e-6:
        return _branch_series(math.sqrt(p2))
    if x < -0.2:
        w0 = _branch_series(math.sqrt(p2))
    else:
        w0 = x * (1.0 - x + 1.5 * x * x)
    w = _halley_w(x, max(w0, -1.0 + 1e-12), -1.0, 0.0)
    return _check_w_residual(w, x, "lambert_w0")


# ---------------------------------------------------------------------------
# The optimal constant
# ---------------------------------------------------------------------------


def _stationarity_log_domain(s: float) -> float:
    """Solve the maximizer equation for L = log(r*), stable for tiny s.

    In terms of ``L`` the equation ``r = s(1+r)log(1+r)`` reads
    ``s (1 + exp(-L)) (L + log1p(exp(-L))) = 1``; its residual is relative
    to ``r`` and stays well conditioned when ``r`` itself overflows.
    """

    def fval(L: float) -> float:
        e = math.exp(-L)
        return s * (1.0 + e) * (L + math.log1p(e)) - 1.0

    lo, hi = 1.0, 1.0 / s + 10.0
    flo = fval(lo)
    if flo > 0.0:  # r* below e; only reachable for s near the top of range
        lo = 1e-12
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fval(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def critical_r(s: float | RenyiOrder) -> float:
    """Location ``r*`` of the maximum of ``log(1+r)/r**s``.

    Solves ``r = s(1+r)log(1+r)``; the substitution ``t = -1/(s(1+r))``
    turns this into ``t exp(t) = -(1/s)exp(-1/s)``.  Of the two real W
    branches, the lower one returns the trivial root ``t = -1/s`` (i.e.
    ``r = 0``); the maximizer lives on the principal branch.  Returns ``0``
    at ``s = 1`` (continuity limit) and ``inf`` once ``r*`` exceeds the
    double range (``s`` below ~1.4e-3).
    """
    order = as_order(s)
    sv = order.s
    if sv == 1.0:
        return 0.0
    if sv < _LOG_DOMAIN_S:
        L = _stationarity_log_domain(sv)
        return math.exp(L) if L <= 709.0 else math.inf
    x = -(1.0 / sv) * math.exp(-1.0 / sv)
    t = lambert_w0(x)
    r = -1.0 / (sv * t) - 1.0
    # Newton polish on the stationarity equation for the residual certificate.
    for _ in range(4):
        f = r - sv * (1.0 + r) * math.log1p(r)
        fp = 1.0 - sv * (math.log1p(r) + 1.0)
        step = f / fp
        r -= step
        if abs(step) <= 1e-16 * (1.0 + abs(r)):
            break
    return max(r, 0.0)


def c_constant(s: float) -> float:
    """The prefactor ``c_s = s**s (1-s)**(1-s)`` with ``0**0 = 1``."""
    sv = as_order(s).s
    return sv**sv * (1.0 - sv) ** (1.0 - sv)


def g_constant(s: float | RenyiOrder) -> ScalarConstants:
    """Optimal constant ``g_s`` and companions for one order.

    Evaluates the closed form ``r***(1-s) / (s (1+r*))`` and cross-checks
    it against ``log(1+r*)/r***s``; the two agree to 1e-12 relative by
    construction of the root.
    """
    order = as_order(s)
    sv = order.s
    if sv == 1.0:
        return ScalarConstants(1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0)
    c = c_constant(sv)
    if sv >= _LOG_DOMAIN_S:
        r = critical_r(order)
        g_closed = r ** (1.0 - sv) / (sv * (1.0 + r))
        g_check = math.log1p(r) / r**sv
        residual = abs(r - sv * (1.0 + r) * math.log1p(r))
        r_report = r
    else:
        L = _stationarity_log_domain(sv)
        e = math.exp(-L)
        ln1pr = L + math.log1p(e)
        g_closed = math.exp(-sv * L - math.log(sv) - math.log1p(e))
        g_check = math.exp(math.log(ln1pr) - sv * L)
        residual = abs(sv * (1.0 + e) * ln1pr - 1.0)
        r_report = math.exp(L) if L <= 709.0 else math.inf
    if abs(g_closed / g_check - 1.0) > 1e-12:
        raise ArithmeticError(
            f"closed form and ratio form of g_s disagree at s={sv!r}: "
            f"{g_closed!r} vs {g_check!r}"
        )
    ratio = c / (sv * g_closed)
    return ScalarConstants(sv, g_closed, c, c / sv, r_report, ratio, residual)


def sweep_constants(s_values) -> list[ScalarConstants]:
    """Evaluate :func:`g_constant` over a grid of orders."""
    return [g_constant(float(s)) for s in np.asarray(s_values, dtype=float)]


# ---------------------------------------------------------------------------
# Grid certification of the scalar inequalities
# ---------------------------------------------------------------------------


def _margin_report(margins: np.ndarray, grid: np.ndarray) -> GridMargin:
    i = int(np.argmin(margins))
    return GridMargin(float(margins[i]), float(grid[i]), int(grid.size))


def _as_grid(r_grid) -> np.ndarray:
    grid = np.asarray(r_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty r grid")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0.0):
        raise ValueError("grid values must be finite and >= 0")
    return grid


def check_scalar_log_bound(s: float | RenyiOrder, r_grid) -> GridMargin:
    """Worst margin of ``g_s r**s - log(1+r)`` over a grid of ``r >= 0``.

    Nonnegative margins certify the defining inequality of ``g_s``; the
    minimum sits at ``r*`` where the bound is tight.
    """
    order = as_order(s)
    grid = _as_grid(r_grid)
    g = g_constant(order).g_s
    margins = g * np.power(grid, order.s) - np.log1p(grid)
    return _margin_report(margins, grid)


def check_aux_inequality(s: float | RenyiOrder, r_grid) -> GridMargin:
    """Worst margin of the auxiliary bound used above the threshold order.

    Certifies ``r log(1+r) <= (log 2) r**(s+1) + (1/2 - s log 2)(r - 1)``
    on the grid.  Only valid for ``s >= 1/(2 log 2)``; smaller orders raise.
    """
    order = as_order(s)
    if order.s < THRESHOLD_S - 1e-12:
        raise ValueError(
            f"auxiliary inequality requires s >= {THRESHOLD_S:.6f}, got {order.s}"
        )
    grid = _as_grid(r_grid)
    ln2 = math.log(2.0)
    margins = (
        ln2 * np.power(grid, order.s + 1.0)
        + (0.5 - order.s * ln2) * (grid - 1.0)
        - grid * np.log1p(grid)
    )
    return _margin_report(margins, grid)


def check_rational_bound(s: float | RenyiOrder, r_grid) -> GridMargin:
    """Worst margin of ``c_s - r**(1-s)/(1+r)`` over the grid.

    The rational function peaks at ``r = (1-s)/s`` with value exactly
    ``c_s``, so the minimum margin is ~0 whenever the grid hits the peak.
    """
    order = as_order(s)
    grid = _as_grid(r_grid)
    c = c_constant(order.s)
    margins = c - np.power(grid, 1.0 - order.s) / (1.0 + grid)
    return _margin_report(margins, grid)

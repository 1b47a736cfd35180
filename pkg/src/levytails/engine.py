"""Chernoff/Legendre machinery for h-function deviation bounds.

A nondecreasing "h-function" h with h(0) = 0 encodes a deviation inequality

    P(F - E[F] >= x) <= exp( - int_0^x h^{-1}(s) ds ),   0 < x < h(t_end-),

where h^{-1}(s) = inf{t > 0 : h(t) >= s} is the left-continuous inverse.
The same exponent arises as the Chernoff infimum

    inf_{0 < t < t_end} ( int_0^t h(u) du - t x ),

and the two routes are kept numerically independent here (pointwise
inversion + quadrature of h^{-1} on one side; root of h(t) = x + quadrature
of h on the other) so that their agreement is a genuine cross-check.

All functions are pure; there is no shared mutable state.
"""

from __future__ import annotations

import math
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import NonMonotone, OutOfRange, QuadratureFailure

# Tolerances fixed by contract.
_INVERT_XTOL = 1e-15
_INVERT_RTOL = 1e-12
_MONOTONE_SLACK = 1e-9
# Internal quadrature target. Tighter than the contractual 1e-9 so that
# downstream identities (duality at 1e-7 absolute-in-exponent, closed-form
# cross-checks at 1e-8 on bound values) keep headroom even when the
# exponent itself is ~40.
_QUAD_REL_TOL = 1e-11
# Absolute-tolerance floor: the consumer of the entropy integral is
# exp(-I), so an absolute error of 1e-14 in I is a 1e-14 relative error
# on the bound -- far inside every contract.  Without the floor, tiny
# integrals (I ~ x^2 for x -> 0) would demand tolerances below the noise
# floor of the brentq-computed integrand and the quadrature could never
# converge.
_QUAD_ABS_FLOOR = 1e-14
_MAX_SUBDIVISIONS = 2 ** 20
_BRACKET_T0 = 1e-12
# Bracket-memo size cap (see _InverseEvaluator): insort is O(n) per
# insert, so an unbounded memo would degrade pathological quadratures
# from linear to quadratic cost.
_MEMO_CAP = 20000


@dataclass(frozen=True)
class HFunction:
    """A nondecreasing function h on [0, t_end) with h(0) = 0.

    h_sup is the left limit h(t_end-); it bounds the range of validity of
    the induced tail bound. Both t_end and h_sup may be +inf.
    """

    eval_fn: Callable[[float], float]
    t_end: float = math.inf
    h_sup: float = math.inf
    name: str = "h"

    def __call__(self, t: float) -> float:
        return float(self.eval_fn(t))


@dataclass(frozen=True)
class TailBound:
    """A one-sided deviation bound x -> P(deviation >= x) <= fn(x).

    center tags what the deviation is measured from ("mean",
    "shifted_mean", or "median"); direction is "upper" or "lower".
    fn may raise OutOfRange outside (valid_lo, valid_hi); evaluate_grid
    flags such points instead. regime_fn labels which expression/regime
    produced the value at x (constant label for single-regime bounds).
    meta carries auxiliary information for verification (e.g. the shift
    added to the center, or transform="abs" for norm-type bounds).
    """

    name: str
    fn: Callable[[float], float]
    center: str = "mean"
    direction: str = "upper"
    valid_lo: float = 0.0
    valid_hi: float = math.inf
    regime_fn: Callable[[float], str] | None = None
    meta: dict = field(default_factory=dict)

    def regime(self, x: float) -> str:
        return self.regime_fn(x) if self.regime_fn is not None else self.name

    def __call__(self, x: float) -> float:
        return float(self.fn(x))

    def evaluate_grid(self, xs: Sequence[float]):
        """Evaluate on a grid, never raising for out-of-range points.

        Returns (bound, regime, valid) arrays/lists of the grid's length.
        Out-of-range or failed points get the trivial value (1 for upper
        bounds, 0 for lower bounds) and valid=False.
        """
        trivial = 1.0 if self.direction == "upper" else 0.0
        out = np.empty(len(xs), dtype=float)
        regimes: list[str] = []
        valid = np.zeros(len(xs), dtype=bool)
        for i, x in enumerate(xs):
            x = float(x)
            if not (self.valid_lo < x < self.valid_hi):
                out[i] = trivial
                regimes.append("out_of_range")
                continue
            try:
                out[i] = float(self.fn(x))
                regimes.append(self.regime(x))
                valid[i] = True
            except OutOfRange:
                out[i] = trivial
                regimes.append("out_of_range")
        return out, regimes, valid


# ----------------------------------------------------------------------
# Adaptive Simpson quadrature (hand-rolled by design: failures must be
# explicit, and the entropy integral must not share scipy code paths with
# anything it is cross-checked against).
# ----------------------------------------------------------------------

def _adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                      tol: float) -> float:
    """Integrate f on [a, b] to absolute tolerance ~tol.

    Classic recursion with Richardson correction, implemented iteratively
    with an explicit stack. Raises QuadratureFailure once more than 2^20
    subintervals have been created.
    """
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # stack entries: (a, m, b, fa, fm, fb, S, tol)
    stack = [(a, m, b, fa, fm, fb, whole, tol)]
    total = 0.0
    n_intervals = 1
    while stack:
        a0, m0, b0, fa0, fm0, fb0, s0, tol0 = stack.pop()
        lm = 0.5 * (a0 + m0)
        rm = 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        s_left = (m0 - a0) / 6.0 * (fa0 + 4.0 * flm + fm0)
        s_right = (b0 - m0) / 6.0 * (fm0 + 4.0 * frm + fb0)
        delta = s_left + s_right - s0
        if abs(delta) <= 15.0 * tol0 or (b0 - a0) <= 1e-15 * (b - a):
            total += s_left + s_right + delta / 15.0
            continue
        n_intervals += 2
        if n_intervals > _MAX_SUBDIVISIONS:
            raise QuadratureFailure(
                f"adaptive Simpson exceeded {_MAX_SUBDIVISIONS} subintervals "
                f"on [{a!r}, {b!r}]")
        half = 0.5 * tol0
        stack.append((a0, lm, m0, fa0, flm, fm0, s_left, half))
        stack.append((m0, rm, b0, fm0, frm, fb0, s_right, half))
    return total


def _simpson_rel(f: Callable[[float], float], a: float, b: float,
                 rel_tol: float = _QUAD_REL_TOL) -> float:
    """Adaptive Simpson targeting a relative tolerance.

    A cheap pilot estimate sets the absolute tolerance; one refinement pass
    re-runs with the tolerance rescaled to the first result when the pilot
    was badly off.
    """
    if b <= a:
        return 0.0
    # Pilot: composite Simpson on 8 intervals.
    ts = np.linspace(a, b, 9)
    vals = np.array([f(float(t)) for t in ts])
    pilot = (b - a) / 24.0 * (vals[0] + vals[-1]
                              + 4.0 * vals[1::2].sum() + 2.0 * vals[2:-1:2].sum())
    scale = max(abs(pilot), 1e-300)
    result = _adaptive_simpson(f, a, b, rel_tol * scale + _QUAD_ABS_FLOOR)
    if abs(result) > 10.0 * scale or abs(result) < 0.1 * scale:
        result = _adaptive_simpson(
            f, a, b, rel_tol * max(abs(result), 1e-300) + _QUAD_ABS_FLOOR)
    return result


# ----------------------------------------------------------------------
# Inversion
# ----------------------------------------------------------------------

class _InverseEvaluator:
    """Pointwise h^{-1} with bracket memoization.

    Successive queries (as issued by adaptive quadrature) are strongly
    clustered, so remembering every solved pair (s, t) and bracketing new
    queries between the nearest solved neighbours makes each brentq call
    converge in a handful of iterations. Results are identical to cold
    invert_h calls: same root problem, same tolerances.
    """

    def __init__(self, h: HFunction):
        self.h = h
        self._s: list[float] = []   # sorted solved ordinates
        self._t: dict[float, float] = {}

    def __call__(self, s: float) -> float:
        s = float(s)
        if s <= 0.0:
            return 0.0
        if not (s < self.h.h_sup):
            raise OutOfRange(
                f"s={s!r} is not below sup h = {self.h.h_sup!r}")
        t = self._t.get(s)
        if t is not None:
            return t
        if len(self._s) >= _MEMO_CAP:
            self._s.clear()
            self._t.clear()
        i = bisect_left(self._s, s)
        lo = self._t[self._s[i - 1]] if i > 0 else 0.0
        if i < len(self._s):
            hi = self._t[self._s[i]]
            t = _solve_inverse(self.h, s, lo, hi)
        else:
            t = _solve_inverse(self.h, s, lo, None)
        insort(self._s, s)
        self._t[s] = t
        return t


def _solve_inverse(h: HFunction, s: float, lo: float,
                   hi: float | None) -> float:
    """Root of h(t) = s on (lo, hi), expanding the bracket if hi is None.

    lo must satisfy h(lo) <= s (lo = 0 always works since h(0) = 0).
    Monotonicity is spot-checked during expansion: a decrease of more than
    1e-9 between successive probes raises NonMonotone.
    """
    if hi is None:
        t = max(_BRACKET_T0, lo * 2.0 if lo > 0 else _BRACKET_T0)
        prev_t, prev_v = lo, h(lo) if lo > 0 else 0.0
        while True:
            if h.t_end < math.inf and t >= h.t_end:
                t = 0.5 * (prev_t + h.t_end)
            v = h(t)
            if v < prev_v - _MONOTONE_SLACK:
                raise NonMonotone(
                    f"h({t!r}) = {v!r} < h({prev_t!r}) = {prev_v!r} - 1e-9")
            if v >= s:
                lo, hi = prev_t, t
                break
            prev_t, prev_v = t, v
            if h.t_end < math.inf:
                t = 0.5 * (t + h.t_end)
                if h.t_end - t <= 1e-15 * h.t_end:
                    raise OutOfRange(
                        f"h(t) stays below s={s!r} up to t_end={h.t_end!r}")
            else:
                t *= 2.0
                if t > 1e300:
                    raise OutOfRange(
                        f"h(t) stays below s={s!r} for t up to 1e300")
    if hi <= lo:
        return hi
    f_lo = (h(lo) if lo > 0 else 0.0) - s
    f_hi = h(hi) - s
    if f_lo > 0.0:
        # A memoized neighbour can overshoot by its root tolerance when two
        # ordinates are extremely close; restart from the safe left end.
        lo, f_lo = 0.0, -s
    if f_hi < 0.0:
        return _solve_inverse(h, s, hi, None)
    if f_hi == 0.0:
        return hi
    return float(brentq(lambda t: h(t) - s, lo, hi,
                        xtol=_INVERT_XTOL, rtol=_INVERT_RTOL))


def invert_h(h: HFunction, s: float) -> float:
    """Left-continuous inverse h^{-1}(s) = inf{t > 0 : h(t) >= s}.

    Requires 0 < s < h.h_sup; raises OutOfRange otherwise, and NonMonotone
    if bracketing observes h decreasing by more than 1e-9.
    """
    s = float(s)
    if not (s > 0.0):
        raise OutOfRange(f"s must be positive, got {s!r}")
    if not (s < h.h_sup):
        raise OutOfRange(f"s={s!r} is not below sup h = {h.h_sup!r}")
    return _solve_inverse(h, s, 0.0, None)


# ----------------------------------------------------------------------
# Entropy integral and Chernoff minimum
# ----------------------------------------------------------------------

def entropy_integral(h: HFunction, x: float,
                     _inv: _InverseEvaluator | None = None) -> float:
    """int_0^x h^{-1}(s) ds by adaptive Simpson on the pointwise inverse.

    Requires 0 < x < h.h_sup. The integrand is evaluated through invert_h
    (with bracket memoization); the quadrature itself is the hand-rolled
    adaptive Simpson with a 2^20-subinterval budget.
    """
    x = float(x)
    if not (x > 0.0):
        raise OutOfRange(f"x must be positive, got {x!r}")
    if not (x < h.h_sup):
        raise OutOfRange(f"x={x!r} is not below sup h = {h.h_sup!r}")
    inv = _inv if _inv is not None else _InverseEvaluator(h)
    return _simpson_rel(inv, 0.0, x)


def chernoff_min(h: HFunction, x: float) -> float:
    """min over t in (0, t_end) of int_0^t h(u) du - t*x.

    For x < h_sup the minimizer solves h(t) = x; the minimum is then the
    quadrature of h up to that root minus t*x. For x >= h_sup the infimum
    is approached at t -> t_end: with t_end = +inf it is -inf (returned as
    a float, not raised); with finite t_end it is the boundary value.
    The result is always <= 0 (t -> 0 gives 0).
    """
    x = float(x)
    if not (x > 0.0):
        raise OutOfRange(f"x must be positive, got {x!r}")
    if x < h.h_sup:
        t_star = invert_h(h, x)
        area = _simpson_rel(lambda t: h(t), 0.0, t_star)
        return min(area - t_star * x, 0.0)
    if math.isinf(h.t_end):
        # h is bounded by h_sup <= x, so the objective decays at least
        # linearly with slope h_sup - x <= 0; the infimum is -inf whenever
        # x exceeds h_sup (and for x == h_sup it is the negative of a
        # possibly divergent integral; report -inf unless it is provably
        # finite within the probe horizon).
        if x > h.h_sup:
            return -math.inf
        t, g_prev = 1.0, 0.0
        while t <= 1e9:
            g = _simpson_rel(lambda u: h(u), 0.0, t) - t * x
            if g < -1e12:
                return -math.inf
            if abs(g - g_prev) <= 1e-12 * (1.0 + abs(g)):
                return min(g, 0.0)
            g_prev, t = g, t * 4.0
        return -math.inf
    t_edge = h.t_end * (1.0 - 1e-12)
    area = _simpson_rel(lambda t: h(t), 0.0, t_edge)
    return min(area - t_edge * x, 0.0)


def tail_bound_from_h(h: HFunction) -> TailBound:
    """The deviation bound exp(-int_0^x h^{-1}) as a TailBound.

    center="mean", direction="upper", validity (0, h_sup). Evaluation is
    lazy; each scalar call runs its own entropy integral, while grid
    evaluation through evaluate_entropy_grid shares work across points.
    """
    inv = _InverseEvaluator(h)

    def fn(x: float) -> float:
        return math.exp(-entropy_integral(h, x, _inv=inv))

    return TailBound(
        name=f"entropy[{h.name}]",
        fn=fn,
        center="mean",
        direction="upper",
        valid_lo=0.0,
        valid_hi=h.h_sup,
        meta={"h_name": h.name},
    )


def evaluate_entropy_grid(h: HFunction, xs: Sequence[float]) -> np.ndarray:
    """Entropy integrals int_0^{x_i} h^{-1} for a whole grid at once.

    Sorts the grid, accumulates the integral piecewise between consecutive
    points (sharing one memoized inverse evaluator), and maps back to the
    input order. Exact reorganization of entropy_integral: every segment
    runs the same adaptive Simpson at the same relative tolerance, and the
    segments are nonnegative so relative errors do not cancel upward.
    Raises OutOfRange if any point falls outside (0, h_sup).
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.empty(0)
    if np.any(xs <= 0.0) or np.any(xs >= h.h_sup):
        raise OutOfRange("grid points must lie in (0, sup h)")
    order = np.argsort(xs)
    inv = _InverseEvaluator(h)
    totals = np.empty(xs.size)
    acc = 0.0
    prev = 0.0
    for idx in order:
        x = float(xs[idx])
        if x > prev:
            acc += _simpson_rel(inv, prev, x)
            prev = x
        totals[idx] = acc
    return totals

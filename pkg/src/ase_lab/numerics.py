"""Adaptive quadrature on semi-infinite domains with divergence diagnostics.

The half line ``[a, inf)`` is cut into a head panel ``[a, a + s 2**k_min]``
followed by dyadic windows ``[a + s 2**k, a + s 2**(k+1)]``.  Each window is
integrated by globally adaptive Gauss-Legendre (7/15 point pair).  The
sequence of window integrals doubles as a convergence diagnostic: a
convergent tail decays geometrically from window to window, a divergent one
does not.

Integrands must accept and return numpy arrays.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

CONVERGED = "converged"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"

_X7, _W7 = np.polynomial.legendre.leggauss(7)
_X15, _W15 = np.polynomial.legendre.leggauss(15)
_NODES = np.concatenate([_X7, _X15])

# window index range relative to the scale s
K_MIN = -40
K_MAX = 200
# consecutive non-decaying windows that certify divergence
N_WINDOWS = 8
# ratios at or above this count as "not decaying"
RHO_FLAT = 1.0 - 1e-3
# divergence is only declared once windows lie this far out (in units of s)
FAR_TAIL = 2.0**24

Integrand = Callable[[np.ndarray], np.ndarray]


class IntegrandError(ArithmeticError):
    """Raised when an integrand returns NaN."""

    def __init__(self, abscissa: float):
        super().__init__(f"integrand returned NaN at x={abscissa!r}")
        self.abscissa = abscissa


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    status: str
    evaluations: int

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def diverged(self) -> bool:
        return self.status == DIVERGED


class _Counter:
    def __init__(self, f: Integrand):
        self.f = f
        self.n = 0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        self.n += x.size
        with np.errstate(over="ignore", under="ignore"):
            y = np.asarray(self.f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        if np.isnan(y).any():
            raise IntegrandError(float(x[np.argmax(np.isnan(y))]))
        return y


def _panel(f: _Counter, lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = f(mid + half * _NODES)
    g7 = half * float(np.dot(_W7, y[:7]))
    g15 = half * float(np.dot(_W15, y[7:]))
    if not (math.isfinite(g7) and math.isfinite(g15)):
        return math.inf, math.inf
    return g15, abs(g15 - g7)


def adaptive_interval(f: Integrand, lo: float, hi: float, rtol: float,
                      atol: float = 0.0, max_panels: int = 2000,
                      breakpoints: Sequence[float] = ()) -> tuple[float, float, bool]:
    """Globally adaptive integral of ``f`` over ``[lo, hi]``.

    Returns ``(value, error_estimate, ok)``; ``ok`` is False when the panel
    budget ran out before the error target was met.
    """
    fc = f if isinstance(f, _Counter) else _Counter(f)
    edges = [lo] + sorted(b for b in breakpoints if lo < b < hi) + [hi]
    heap = []
    total = err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _panel(fc, a, b)
        total += v
        err += e
        heapq.heappush(heap, (-e, a, b, v))
    if not math.isfinite(total):
        return math.inf, math.inf, True
    n = len(heap)
    while err > max(rtol * abs(total), atol) and n < max_panels:
        e, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not (a < m < b):
            heapq.heappush(heap, (e, a, b, v))
            break
        v1, e1 = _panel(fc, a, m)
        v2, e2 = _panel(fc, m, b)
        total += v1 + v2 - v
        err += e1 + e2 + e
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        n += 1
        if not math.isfinite(total):
            return math.inf, math.inf, True
    # re-sum to shed accumulated cancellation in the running totals
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return total, err, err <= max(rtol * abs(total), atol)


def integrate_semi_infinite(f: Integrand, a: float = 0.0, tol: float = 1e-10,
                            scale: float = 1.0,
                            breakpoints: Sequence[float] = (),
                            k_min: int = K_MIN) -> QuadratureResult:
    """Integrate ``f`` over ``(a, inf)`` to relative tolerance ``tol``.

    ``scale`` sets the width unit of the dyadic windows; it only affects
    efficiency, as does ``k_min`` (the head panel is ``[a, a + s 2**k_min]``).
    Known kinks of the integrand can be listed in
    ``breakpoints``.  The integrand is assumed nonnegative in the tail.
    """
    if not 1e-14 < tol < 1e-2:
        raise ValueError(f"tol must lie in (1e-14, 1e-2), got {tol}")
    if scale <= 0:
        raise ValueError("scale must be positive")
    if not K_MIN <= k_min < 0:
        raise ValueError(f"k_min must lie in [{K_MIN}, 0)")
    fc = _Counter(f)
    rtol = tol / 4.0
    windows: list[float] = []
    value = err = 0.0

    def window(lo: float, hi: float) -> tuple[float, float, bool]:
        return adaptive_interval(fc, lo, hi, rtol, breakpoints=breakpoints)

    # tail extrapolation assumes one decay regime, so wait until every kink is behind us
    last_kink = max([b for b in breakpoints if b > a], default=a)
    v, e, ok = window(a, a + scale * 2.0**k_min)
    value, err = v, e
    all_ok = ok
    for k in range(k_min, K_MAX):
        lo = a + scale * 2.0**k
        hi = a + scale * 2.0**(k + 1)
        w, e, ok = window(lo, hi)
        all_ok &= ok
        if not math.isfinite(w):
            return QuadratureResult(math.inf, math.inf, DIVERGED, fc.n)
        windows.append(w)
        value += w
        err += e
        if len(windows) < 3 or a + scale * 2.0**(k - 2) < last_kink:
            continue
        w0, w1, w2 = windows[-3:]
        if w2 == 0.0 and w1 == 0.0 and value != 0.0:
            return _finish(value, err, all_ok, tol, fc.n)
        if w0 > 0 and w1 > 0 and w2 >= 0:
            r1, r2 = w1 / w0, w2 / w1
            if r1 < RHO_FLAT and r2 < RHO_FLAT:
                rho = max(r1, r2)
                bound = w2 * rho / (1.0 - rho)
                if bound <= rtol * abs(value):
                    tail = w2 * r2 / (1.0 - r2)
                    return _finish(value + tail, err + bound, all_ok, tol, fc.n)
                # stable ratio: the remaining tail is a geometric series
                spread = abs(r2 - r1)
                if spread <= 1e-3 * (1.0 - r2):
                    tail = w2 * r2 / (1.0 - r2)
                    tail_err = 2.0 * tail * spread / (1.0 - r2)
                    if tail_err <= rtol * abs(value + tail):
                        return _finish(value + tail, err + tail_err, all_ok, tol, fc.n)
        if (len(windows) >= N_WINDOWS and scale * 2.0**k >= FAR_TAIL
                and _flat(windows[-N_WINDOWS - 1:])):
            return QuadratureResult(value, math.inf, DIVERGED, fc.n)
    return QuadratureResult(value, err, INCONCLUSIVE, fc.n)


def _flat(ws: Sequence[float]) -> bool:
    return all(w0 > 0 and w1 >= RHO_FLAT * w0 for w0, w1 in zip(ws[:-1], ws[1:]))


def _finish(value: float, err: float, ok: bool, tol: float, n: int) -> QuadratureResult:
    status = CONVERGED if ok and err <= tol * abs(value) + 1e-300 else INCONCLUSIVE
    return QuadratureResult(value, err, status, n)


def integrate_double(f: Callable[[np.ndarray, float], np.ndarray], tol: float = 1e-6,
                     scale_r: float = 1.0, scale_t: float = 1.0,
                     breakpoints_r: Sequence[float] = (),
                     k_min: int = K_MIN) -> QuadratureResult:
    """Iterated integral of ``f(r, t)`` over the positive quadrant.

    The inner integral runs over ``r`` (vectorised) for each scalar ``t``;
    the outer one over ``t``.  Any diverged inner integral makes the whole
    result diverged.
    """
    evaluations = 0
    state = {"diverged": False, "inconclusive": False}

    def outer(t: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        out = np.empty_like(t)
        for i, ti in enumerate(t.flat):
            res = integrate_semi_infinite(lambda r: f(r, ti), 0.0, tol / 4,
                                          scale=scale_r, breakpoints=breakpoints_r,
                                          k_min=k_min)
            evaluations += res.evaluations
            if res.diverged:
                state["diverged"] = True
                out.flat[i] = math.inf
            else:
                state["inconclusive"] |= not res.converged
                out.flat[i] = res.value
        return out

    res = integrate_semi_infinite(outer, 0.0, tol, scale=scale_t, k_min=k_min)
    status = res.status
    if state["diverged"]:
        status = DIVERGED
    elif state["inconclusive"] and status == CONVERGED:
        status = INCONCLUSIVE
    return QuadratureResult(res.value, res.abs_error_estimate, status, evaluations)

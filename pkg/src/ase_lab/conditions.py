"""Sufficient conditions for the ASE plateau and the interference functional.

The plateau holds when the interference from a PPP of density lambda0, with
its nearest point removed, has a finite second negative moment.  That moment
is computed here through the Laplace transform of the interference (PGFL
representation) and cross-checked by direct simulation.  Simpler sufficient
tests on the path loss alone (Rayleigh-type ratio and Gaussian-weighted
integral conditions, and their lower-bound variant) are also provided.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from .models import (Deterministic, ElevatedPowerLaw, FadingModel, InversePoly, LosNlosComposite,
                     MinPowerLaw, MultiSlope, PathLossModel, ShiftedPowerLaw,
                     StretchedExp, UnboundedPowerLaw, check_feasibility)
from .numerics import CONVERGED, DIVERGED, INCONCLUSIVE, QuadratureResult, \
    integrate_double, integrate_semi_infinite
from .sim import Window, _workers, block_rng, draw_batch, window_truncation_bias

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
HOLDS, FAILS = True, False
ZETA_FLOOR = 1e-6
R_SCAN_MAX = 1e6
DEFAULT_LAMBDA0_GRID = tuple(float(x) for x in np.logspace(-1, 2, 7))


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class InterferenceFunctional:
    """Interference beyond the nearest point of a PPP of density ``lambda0``."""

    model: PathLossModel
    fading: FadingModel
    lambda0: float

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise PreconditionError("lambda0 must be positive")
        report = check_feasibility(self.model)
        if not report.feasible:
            raise PreconditionError(
                f"{self.model.kind} is infeasible (property {report.failed_property})")
        object.__setattr__(self, "_gamma", report.gamma)

    @property
    def mean_interference(self) -> float:
        return 2 * math.pi * self.lambda0 * self._gamma

    # per-link marks -----------------------------------------------------

    def link_complement(self, x, t: float):
        """E over fading and link state of ``1 - exp(-t h L(x))``."""
        m, fc = self.model, self.fading.mean_complement
        if isinstance(m, LosNlosComposite):
            p = m.p_los(x)
            return p * fc(t * m.los.eval(x)) + (1 - p) * fc(t * m.nlos.eval(x))
        return fc(t * m.eval(x))

    def link_exceedance(self, x, y: float):
        """P(h L(x) >= y), averaged over the link state."""
        m, sf = self.model, self.fading.survival
        with np.errstate(divide="ignore"):
            if isinstance(m, LosNlosComposite):
                p = m.p_los(x)
                return p * sf(y / m.los.eval(x)) + (1 - p) * sf(y / m.nlos.eval(x))
            return sf(y / m.eval(x))

    # tail exponent ------------------------------------------------------

    def tail_exponent(self, r, t: float, kind: str = "laplace") -> np.ndarray:
        """``int_r^inf x g(x) dx`` with g the link complement (or exceedance)."""
        table = _tail_table(self, float(t), kind)
        return table(np.asarray(r, dtype=float))

    def laplace(self, t: float) -> float:
        """E[exp(-t I)]."""
        if t == 0:
            return 1.0
        lam = self.lambda0
        scale = 1 / math.sqrt(math.pi * lam)

        def f(r):
            return 2 * math.pi * lam * r * np.exp(
                -math.pi * lam * r * r - 2 * math.pi * lam * self.tail_exponent(r, t))

        return integrate_semi_infinite(f, 0.0, 1e-9, scale=scale, k_min=-12).value

    def corollary1_integrand(self, kind: str = "laplace"):
        """Integrand f(r, t) of the double-integral conditions.

        ``kind="laplace"`` gives the second-negative-moment representation;
        ``kind="max"`` the bound through the strongest interferer.
        """
        lam = self.lambda0

        if kind == "laplace":
            def f(r, t):
                g = self.tail_exponent(r, t, "laplace")
                return 2 * math.pi * lam * r * t * np.exp(
                    -math.pi * lam * r * r - 2 * math.pi * lam * g)
        elif kind == "max":
            def f(r, t):
                g = self.tail_exponent(r, t, "max")
                return 2 * math.pi * lam * r * np.exp(
                    -math.pi * lam * r * r - 2 * math.pi * lam * g)
        else:
            raise ValueError(f"unknown integrand kind {kind!r}")
        return f


class _TailTable:
    """Tail integral ``int_r^inf x g(x) dx`` tabulated on a fixed log grid.

    Whole panels are summed once from the far end; a query adds the partial
    panel between ``r`` and the next grid edge.  Beyond the grid the caller
    supplies a bound ``far_tail(R)``.
    """

    def __init__(self, g, edges: np.ndarray, far_tail):
        self.g = g
        self.edges = edges
        self.far_tail = far_tail
        panels = self._gl(edges[:-1], edges[1:])
        far = far_tail(edges[-1])
        # cum[j] = integral from edges[j] to infinity
        self.cum = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]]) + far

    def _gl(self, lo, hi):
        half = 0.5 * (hi - lo)
        x = 0.5 * (hi + lo)[:, None] + half[:, None] * _GL_X
        return half * ((x * self.g(x)) @ _GL_W)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        out = np.empty(flat.shape)
        beyond = flat >= self.edges[-1]
        for i in np.flatnonzero(beyond):
            out[i] = self.far_tail(flat[i])
        inside = ~beyond
        if inside.any():
            ri = flat[inside]
            j = np.searchsorted(self.edges, ri, side="right")
            out[inside] = self.cum[j] + self._gl(ri, self.edges[j])
        return out.reshape(r.shape)


_GRID = np.concatenate([[0.0], np.logspace(-6, 6, 12 * 24 + 1)])


@lru_cache(maxsize=256)
def _tail_table(fn: InterferenceFunctional, t: float, kind: str) -> _TailTable:
    model = fn.model
    edges = np.unique(np.concatenate([_GRID, np.asarray(model.breakpoints(), float)]))
    if kind == "laplace":
        def g(x):
            return fn.link_complement(x, t)

        # 1 - exp(-y) <= y beyond the grid
        def far_tail(R):
            return t * model.gamma_tail(R)
    else:
        y = 1 / math.sqrt(t) if t > 0 else math.inf
        if isinstance(fn.fading, Deterministic) and math.isfinite(y):
            # the exceedance is a step; put its jumps on panel edges
            edges = np.unique(np.concatenate([edges, _level_crossings(model, y, edges)]))

        def g(x):
            return fn.link_exceedance(x, y)

        # Markov: P(h L >= y) <= L / y for unit-mean fading
        def far_tail(R):
            return model.gamma_tail(R) / y
    return _TailTable(g, edges, far_tail)


def _branches(model: PathLossModel) -> tuple[PathLossModel, ...]:
    if isinstance(model, LosNlosComposite):
        return model.los, model.nlos
    return (model,)


def _level_crossings(model: PathLossModel, y: float, grid: np.ndarray) -> np.ndarray:
    """Distances where a branch gain crosses the level ``y``."""
    out = []
    for branch in _branches(model):
        d = branch.eval(grid) - y
        for i in np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:])):
            a, b = grid[i], grid[i + 1]
            if d[i] == 0:
                out.append(a)
            elif branch.eval(a) != branch.eval(b) and np.isfinite(d[i]):
                out.append(optimize.brentq(lambda x: float(branch.eval(x)) - y, a, b,
                                           xtol=1e-14 * b, rtol=1e-14))
    return np.asarray(out, dtype=float)


def interference_laplace(fn: InterferenceFunctional, t: float) -> float:
    """Laplace transform E[exp(-t I)] of the interference, t >= 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return fn.laplace(t)


def second_negative_moment(fn: InterferenceFunctional, tol: float = 1e-6) -> QuadratureResult:
    """E[I^-2] as the double integral of t E[exp(-t I)]."""
    scale_t = 1.0 / fn.mean_interference
    scale_r = 1.0 / math.sqrt(math.pi * fn.lambda0)
    return integrate_double(fn.corollary1_integrand("laplace"), tol,
                            scale_r=scale_r, scale_t=scale_t, k_min=-12)


def corollary1_max_bound(fn: InterferenceFunctional, tol: float = 1e-6) -> QuadratureResult:
    """Upper bound on E[I^-2] through the strongest interferer."""
    scale_r = 1.0 / math.sqrt(math.pi * fn.lambda0)
    return integrate_double(fn.corollary1_integrand("max"), tol, scale_r=scale_r,
                            scale_t=1.0 / fn.model.l_zero() ** 2, k_min=-12)


# --------------------------------------------------------------------------
# Monte Carlo oracle


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    n: int
    # empty-window redraws of the whole network
    redraws: int
    # realizations with no interferer at all, redrawn
    empty_interference: int
    # mean power from stations beyond the simulated window
    far_mean: float


def _oracle_window(fn: InterferenceFunctional, max_points: float) -> Window:
    lam, model = fn.lambda0, fn.model
    R = math.sqrt(max_points / (math.pi * lam))
    m2 = integrate_semi_infinite(lambda r: r * model.second_moment(r), R, 1e-8,
                                 breakpoints=model.breakpoints()).value
    return Window(R, max_points, window_truncation_bias(model, lam, R),
                  2 * math.pi * lam * fn.fading.second_moment() * m2, "gamma")


def _oracle_block(fn, window, statistic, seed, block, n):
    rng = block_rng(seed, block)
    b = draw_batch(fn.model, fn.fading, fn.lambda0, window, n, rng)
    i, redraws, empty = b.interference, b.redraws, 0
    bad = i <= 0
    while bad.any():
        k = int(bad.sum())
        empty += k
        again = draw_batch(fn.model, fn.fading, fn.lambda0, window, k, rng)
        redraws += again.redraws
        i[bad] = again.interference
        bad = i <= 0
    v = statistic(i)
    return float(np.sum(v)), float(np.sum(v * v)), redraws, empty


def mc_interference_oracle(fn: InterferenceFunctional, statistic, n: int = 100_000,
                           seed: int = 0, max_points: float = 400.0,
                           block_size: int = 10_000, workers: int | None = None) -> MomentEstimate:
    """Simulated mean of ``statistic(I)`` with its standard error.

    Stations beyond the simulated disc contribute a moment-matched gamma
    term, as in the metric simulator.  Blocks use independent counter-based
    streams, so the result does not depend on ``workers``.
    """
    if n < 1000:
        raise ValueError("n must be >= 1000")
    window = _oracle_window(fn, max_points)
    sizes = [block_size] * (n // block_size) + ([n % block_size] if n % block_size else [])
    jobs = list(enumerate(sizes))
    nw = _workers(workers)
    run = lambda job: _oracle_block(fn, window, statistic, seed, *job)  # noqa: E731
    if nw == 1:
        parts = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(nw) as pool:
            parts = list(pool.map(run, jobs))
    total, total_sq = math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return MomentEstimate(mean, math.sqrt(var / n), n, sum(p[2] for p in parts),
                          sum(p[3] for p in parts), window.far_mean)


def mc_negative_moment_oracle(fn: InterferenceFunctional, n: int = 100_000, seed: int = 0,
                              **kwargs) -> MomentEstimate:
    """Simulated E[I^-2]; realizations without interferers are redrawn and counted."""
    return mc_interference_oracle(fn, lambda i: i**-2.0, n, seed, **kwargs)


def mc_laplace_oracle(fn: InterferenceFunctional, t: float, n: int = 100_000,
                      seed: int = 0, **kwargs) -> MomentEstimate:
    """Simulated E[exp(-t I)]."""
    return mc_interference_oracle(fn, lambda i: np.exp(-t * i), n, seed, **kwargs)


# --------------------------------------------------------------------------
# path-loss-only conditions


@dataclass(frozen=True)
class ConditionVerdict:
    corollary: str
    holds: bool | None
    lambda0_grid: tuple[float, ...]
    details: dict = field(default_factory=dict)
    zeta: float | None = None
    r0: float | None = None
    lambda_c: float | None = None
    witness: float | None = None
    notes: tuple[str, ...] = ()


def log_derivative(model: PathLossModel, r: np.ndarray) -> np.ndarray:
    """d ln L / dr; analytic when the model provides it, else central differences."""
    d = model.log_derivative(r)
    if d is not None:
        return np.asarray(d, dtype=float)
    h = 1e-6 * np.maximum(r, 1.0)
    return (model.log_eval(r + h) - model.log_eval(np.maximum(r - h, 0.0))) / (
        r + h - np.maximum(r - h, 0.0))


def decay_ratio(model: PathLossModel, r) -> np.ndarray:
    """``r L(r) / (-L'(r))``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return r / -log_derivative(model, r)


def table1_r0(model: PathLossModel) -> float:
    """Starting distance for the ratio and integral conditions."""
    if isinstance(model, MinPowerLaw):
        return max(1.0, model.crossover)
    if isinstance(model, InversePoly):
        return model.c0 * (model.eta - 2) / 2
    if isinstance(model, (ShiftedPowerLaw, ElevatedPowerLaw, StretchedExp)):
        return 1.0
    if isinstance(model, MultiSlope):
        return max(1.0, model.boundaries[-1])
    if isinstance(model, LosNlosComposite):
        return max(1.0, model.nlos.boundaries[-1])
    raise ValueError(f"no tabulated r0 for {model.kind}")


def lower_bound_pair(model: PathLossModel) -> tuple[PathLossModel, float]:
    """Tabulated deterministic lower bound and its starting distance."""
    r0 = table1_r0(model)
    if isinstance(model, MinPowerLaw):
        return UnboundedPowerLaw(model.A, model.eta), r0
    if isinstance(model, (ShiftedPowerLaw, InversePoly, ElevatedPowerLaw, StretchedExp)):
        return model, r0
    if isinstance(model, (MultiSlope, LosNlosComposite)):
        tail = model if isinstance(model, MultiSlope) else model.nlos
        A, eta, c = tail.amplitudes[-1], tail.exponents[-1], tail.elevation
        lower = ElevatedPowerLaw(A, c, eta) if c > 0 else UnboundedPowerLaw(A, eta)
        return lower, r0
    raise ValueError(f"no tabulated lower bound for {model.kind}")


def _scan(r0: float, per_decade: int = 200) -> np.ndarray:
    decades = max(math.log10(R_SCAN_MAX / r0), 1e-9)
    return np.geomspace(r0, R_SCAN_MAX, int(math.ceil(decades * per_decade)) + 1)


def _ratio_condition(model: PathLossModel, r0: float) -> tuple[float, bool, list[str]]:
    r = _scan(r0)
    d = log_derivative(model, r)
    notes = []
    if not np.all(d < 0):
        bad = float(r[np.argmax(~(d < 0))])
        notes.append(f"not strictly decreasing at r={bad:g}")
        return 0.0, False, notes
    ratio = r / -d
    zeta = float(np.min(ratio))
    last = ratio[r >= R_SCAN_MAX / 100]
    certified = bool(np.all(np.diff(last) >= -1e-12 * np.abs(last[1:])))
    if not certified:
        notes.append("ratio still decreasing at the end of the scan")
    return zeta, certified, notes


def _integral_condition(model: PathLossModel, r0: float, lambda0: float) -> QuadratureResult:
    """``int_r0^inf r L(r)^-2 exp(-pi lambda0 r^2) dr``, normalised at r0 to avoid underflow."""
    def phase(r):
        return -2 * model.log_eval(r) - math.pi * lambda0 * r * r

    p0 = float(phase(np.array([r0]))[0])

    def f(r):
        return r * np.exp(phase(r) - p0)

    res = integrate_semi_infinite(f, r0, 1e-6, scale=1 / math.sqrt(lambda0))
    with np.errstate(over="ignore", under="ignore"):
        factor = float(np.exp(p0))
    return QuadratureResult(res.value * factor, res.abs_error_estimate * factor,
                            res.status, res.evaluations)


def critical_density(model: PathLossModel, r0: float, lo: float, hi: float,
                     iterations: int = 40) -> float:
    """Bisect the density at which the integral condition starts to converge."""
    for _ in range(iterations):
        mid = math.sqrt(lo * hi)
        if _integral_condition(model, r0, mid).status == CONVERGED:
            hi = mid
        else:
            lo = mid
    return hi


def check_corollary2(model: PathLossModel, r0: float | None = None,
                     lambda0_grid=DEFAULT_LAMBDA0_GRID, refine: bool = True) -> ConditionVerdict:
    """Ratio condition plus Gaussian-weighted integral condition.

    ``lambda_c`` reports the smallest density from which every probe (and,
    with ``refine``, the bisected threshold) has a convergent integral.
    """
    if model.random_state:
        raise PreconditionError("the ratio test needs a path loss deterministic in distance")
    r0 = table1_r0(model) if r0 is None else float(r0)
    grid = tuple(sorted(float(x) for x in lambda0_grid))
    zeta, certified, notes = _ratio_condition(model, r0)
    details = {lam: _integral_condition(model, r0, lam) for lam in grid}
    ok = [details[lam].status == CONVERGED for lam in grid]
    lambda_c = None
    for i in range(len(grid)):
        if all(ok[i:]):
            lambda_c = grid[i]
            break
    if lambda_c is not None and refine and lambda_c != grid[0]:
        below = grid[grid.index(lambda_c) - 1]
        if details[below].status == DIVERGED:
            lambda_c = critical_density(model, r0, below, lambda_c)
    if zeta > 0:
        notes.append(f"closed-form bound applies for lambda0 > {1 / (math.pi * zeta):.6g}")
    if zeta < ZETA_FLOOR or lambda_c is None:
        holds = FAILS
    elif not certified or any(d.status == INCONCLUSIVE for d in details.values()):
        holds = None
    else:
        holds = HOLDS
    return ConditionVerdict("2", holds, grid, details, zeta, r0, lambda_c, notes=tuple(notes))


def lower_envelope(model: PathLossModel, r) -> np.ndarray:
    """Smallest gain any link can see at distance r."""
    if isinstance(model, LosNlosComposite):
        return np.minimum(model.los.eval(r), model.nlos.eval(r))
    return model.eval(r)


def check_corollary5(model: PathLossModel, lower_bound: PathLossModel | None = None,
                     r0: float | None = None, lambda0_grid=DEFAULT_LAMBDA0_GRID) -> ConditionVerdict:
    """Lower-bound variant: find L~ <= L beyond r0 meeting the Rayleigh conditions."""
    if lower_bound is None:
        lower_bound, default_r0 = lower_bound_pair(model)
        r0 = default_r0 if r0 is None else r0
    if r0 is None:
        r0 = table1_r0(model)
    r = _scan(r0, per_decade=1000)
    r = np.unique(np.concatenate([r, [b for b in model.breakpoints() if b >= r0]]))
    excess = lower_bound.eval(r) > lower_envelope(model, r) * (1 + 1e-12)
    if excess.any():
        w = float(r[np.argmax(excess)])
        return ConditionVerdict("5", FAILS, tuple(lambda0_grid), r0=r0, witness=w,
                                notes=(f"lower bound exceeds the path loss at r={w:g}",))
    inner = check_corollary2(lower_bound, r0, lambda0_grid)
    return ConditionVerdict("5", inner.holds, inner.lambda0_grid, inner.details, inner.zeta,
                            r0, inner.lambda_c, notes=inner.notes)


def check_corollary1(fn: InterferenceFunctional, kind: str = "laplace",
                     tol: float = 1e-6) -> ConditionVerdict:
    """Evaluate one of the double-integral conditions at a single density."""
    res = second_negative_moment(fn, tol) if kind == "laplace" else corollary1_max_bound(fn, tol)
    holds = {CONVERGED: HOLDS, DIVERGED: FAILS}.get(res.status)
    return ConditionVerdict("1a" if kind == "laplace" else "1b", holds, (fn.lambda0,),
                            {fn.lambda0: res})

"""Monte Carlo engine for the Poisson cellular downlink.

The typical user sits at the origin and is served by the nearest base
station.  Base stations inside a disc of radius R are simulated exactly; the
aggregate power from stations beyond R is drawn from a gamma law matched to
its first two moments (Campbell), or replaced by its mean, or dropped,
depending on ``SimConfig.far_field``.

Work is split into fixed blocks of realizations.  Block ``b`` draws from a
Philox stream keyed by ``(seed, b)``, so results do not depend on how many
workers run the blocks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .analytic import InfeasibleModelError, ase_limit, gamma_integral
from .models import FadingModel, PathLossModel
from .numerics import integrate_semi_infinite

FAR_FIELD_MODES = ("gamma", "mean", "none")
TAIL_FRACTION = 1e-3
MIN_EXPECTED_POINTS = 50.0


@dataclass(frozen=True)
class SimConfig:
    model: PathLossModel
    fading: FadingModel
    lam: float
    n0: float | None = None
    window_radius: float | None = None
    realizations: int = 100_000
    seed: int = 0
    theta0_list: tuple[float, ...] = (1.0,)
    far_field: str = "gamma"
    # cap on the expected number of stations simulated per realization
    max_points: float = 400.0
    block_size: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "theta0_list", tuple(float(t) for t in self.theta0_list))
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.n0 is not None and not self.n0 > 0:
            raise ValueError("n0 must be positive")
        if self.realizations < 100:
            raise ValueError("realizations must be >= 100")
        if self.far_field not in FAR_FIELD_MODES:
            raise ValueError(f"far_field must be one of {FAR_FIELD_MODES}")
        if self.max_points < MIN_EXPECTED_POINTS:
            raise ValueError("max_points must be >= 50")
        if any(t < 0 for t in self.theta0_list):
            raise ValueError("SINR thresholds must be nonnegative")
        if self.window_radius is not None:
            if self.lam * math.pi * self.window_radius**2 < MIN_EXPECTED_POINTS:
                raise ValueError("window must hold at least 50 stations on average")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def noise(self) -> float:
        return self.n0 if self.n0 is not None else 1e-6 * self.model.l_zero()


@dataclass(frozen=True)
class SinrSample:
    r0: float
    signal: float
    interference: float
    sinr: float


@dataclass(frozen=True)
class Window:
    radius: float
    expected_points: float
    # mean and variance of the aggregate power from beyond the window
    far_mean: float
    far_var: float
    far_field: str


def auto_radius(model: PathLossModel, lam: float, gamma: float | None = None) -> float:
    """Smallest R leaving < 0.1% of the path-loss mass outside and >= 50 stations inside."""
    gamma = gamma_integral(model) if gamma is None else gamma
    floor = math.sqrt(MIN_EXPECTED_POINTS / (math.pi * lam))
    if model.gamma_tail(floor) < TAIL_FRACTION * gamma:
        return floor
    hi = 2 * floor
    while model.gamma_tail(hi) >= TAIL_FRACTION * gamma:
        hi *= 2
    return optimize.brentq(lambda R: model.gamma_tail(R) - TAIL_FRACTION * gamma,
                           hi / 2, hi, xtol=1e-12 * hi, rtol=1e-12)


def resolve_window(cfg: SimConfig) -> Window:
    model = cfg.model
    if cfg.window_radius is not None:
        R = cfg.window_radius
    else:
        R = auto_radius(model, cfg.lam)
        if cfg.far_field != "none" and cfg.lam * math.pi * R**2 > cfg.max_points:
            R = math.sqrt(cfg.max_points / (math.pi * cfg.lam))
    far_mean = far_var = 0.0
    if cfg.far_field != "none":
        far_mean = 2 * math.pi * cfg.lam * model.gamma_tail(R)
        m2 = integrate_semi_infinite(lambda r: r * model.second_moment(r), R, 1e-8,
                                     breakpoints=model.breakpoints())
        far_var = 2 * math.pi * cfg.lam * cfg.fading.second_moment() * m2.value
    return Window(R, cfg.lam * math.pi * R**2, far_mean, far_var, cfg.far_field)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass
class Batch:
    r0: np.ndarray
    signal: np.ndarray
    interference: np.ndarray
    in_window: np.ndarray
    redraws: int

    @property
    def total_power(self) -> np.ndarray:
        return self.signal + self.interference


def draw_batch(model: PathLossModel, fading: FadingModel, lam: float, window: Window,
               n: int, rng: np.random.Generator) -> Batch:
    """Draw ``n`` independent network realizations seen from the origin."""
    mu = window.expected_points
    counts = rng.poisson(mu, n)
    redraws = 0
    empty = counts == 0
    while empty.any():
        k = int(empty.sum())
        redraws += k
        counts[empty] = rng.poisson(mu, k)
        empty = counts == 0
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    total = int(counts.sum())
    r = window.radius * np.sqrt(rng.random(total))
    seg = np.repeat(np.arange(n), counts)
    rmin = np.minimum.reduceat(r, starts)
    serving = r == rmin[seg]
    if int(serving.sum()) != n:
        # tied distances: keep the first minimum of each realization
        order = np.lexsort((r, seg))
        serving = np.zeros(total, dtype=bool)
        serving[order[starts]] = True
    power = fading.sample(rng, total) * model.sample(r, rng)
    signal = power[serving]
    in_window = np.bincount(seg, weights=np.where(serving, 0.0, power), minlength=n)
    far = _far_field(window, n, rng)
    return Batch(rmin, signal, in_window + far, in_window, redraws)


def _far_field(window: Window, n: int, rng: np.random.Generator) -> np.ndarray:
    if window.far_field == "none" or window.far_mean == 0:
        return np.zeros(n)
    if window.far_field == "mean" or window.far_var == 0:
        return np.full(n, window.far_mean)
    shape = window.far_mean**2 / window.far_var
    return rng.standard_gamma(shape, n) * (window.far_var / window.far_mean)


def sinr_from_distances(model: PathLossModel, distances, n0: float, fading: FadingModel,
                        rng: np.random.Generator | None = None) -> SinrSample:
    """SINR at the origin for an explicit set of station distances."""
    d = np.asarray(distances, dtype=float)
    rng = rng if rng is not None else np.random.default_rng(0)
    k = int(np.argmin(d))
    power = fading.sample(rng, d.size) * model.sample(d, rng)
    signal = float(power[k])
    interference = float(power.sum() - signal)
    return SinrSample(float(d[k]), signal, interference, signal / (interference + n0))


def sample_realization(cfg: SimConfig, rng: np.random.Generator) -> SinrSample:
    b = draw_batch(cfg.model, cfg.fading, cfg.lam, resolve_window(cfg), 1, rng)
    s, i = float(b.signal[0]), float(b.interference[0])
    return SinrSample(float(b.r0[0]), s, i, s / (i + cfg.noise))


# --------------------------------------------------------------------------
# metric estimation


@dataclass(frozen=True)
class MetricEstimate:
    lam: float
    n: int
    ase: float
    ase_se: float
    constrained_ase: dict
    constrained_ase_se: dict
    potential_throughput: dict
    potential_throughput_se: dict
    coverage: dict
    coverage_se: dict
    scaled_sinr: float
    scaled_sinr_se: float
    interference_mean: float
    interference_se: float
    total_power_mean: float
    total_power_se: float
    redraws: int
    window: Window = field(repr=False)


def _block_sums(cfg: SimConfig, window: Window, block: int, n: int) -> tuple[np.ndarray, int]:
    rng = block_rng(cfg.seed, block)
    b = draw_batch(cfg.model, cfg.fading, cfg.lam, window, n, rng)
    sinr = b.signal / (b.interference + cfg.noise)
    x = np.log2(1.0 + sinr)
    cols = [x, sinr, b.interference, b.total_power]
    for theta in cfg.theta0_list:
        ind = sinr >= theta
        c = np.where(ind, x, 0.0)
        pt = np.where(ind, np.minimum(math.log2(1.0 + theta), x), 0.0)
        cols += [c, pt, ind.astype(float)]
    m = np.stack(cols)
    return np.concatenate([m.sum(axis=1), (m * m).sum(axis=1)]), b.redraws


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("ASE_LAB_THREADS")
    return max(1, int(env)) if env else 1


def estimate_metrics(cfg: SimConfig, workers: int | None = None) -> MetricEstimate:
    """Estimate ASE, constrained ASE, potential throughput and coverage.

    Deterministic in ``cfg.seed`` whatever the number of workers.
    """
    window = resolve_window(cfg)
    sizes = [cfg.block_size] * (cfg.realizations // cfg.block_size)
    if cfg.realizations % cfg.block_size:
        sizes.append(cfg.realizations % cfg.block_size)
    jobs = list(enumerate(sizes))
    nw = _workers(workers)
    if nw == 1:
        parts = [_block_sums(cfg, window, b, n) for b, n in jobs]
    else:
        with ThreadPoolExecutor(nw) as pool:
            parts = list(pool.map(lambda job: _block_sums(cfg, window, *job), jobs))
    sums = np.sum(np.stack([p[0] for p in parts]), axis=0)
    redraws = sum(p[1] for p in parts)
    n = cfg.realizations
    k = sums.size // 2
    mean = sums[:k] / n
    var = np.maximum(sums[k:] / n - mean**2, 0.0) * n / (n - 1)
    se = np.sqrt(var / n)
    lam = cfg.lam

    def col(i, scale=1.0):
        return float(scale * mean[i]), float(scale * se[i])

    ase, ase_se = col(0, lam)
    s_sinr, s_sinr_se = col(1, lam)
    i_mean, i_se = col(2)
    p_mean, p_se = col(3)
    cons, cons_se, pt, pt_se, cov, cov_se = {}, {}, {}, {}, {}, {}
    for j, theta in enumerate(cfg.theta0_list):
        base = 4 + 3 * j
        cons[theta], cons_se[theta] = col(base, lam)
        pt[theta], pt_se[theta] = col(base + 1, lam)
        cov[theta], cov_se[theta] = col(base + 2)
    return MetricEstimate(lam, n, ase, ase_se, cons, cons_se, pt, pt_se, cov, cov_se,
                          s_sinr, s_sinr_se, i_mean, i_se, p_mean, p_se, redraws, window)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    ase: float
    ase_se: float
    constrained_ase: dict
    potential_throughput: dict
    coverage: dict
    analytic_limit: float
    n_realizations: int
    estimate: MetricEstimate = field(repr=False, compare=False)


def analytic_limit_or_nan(model: PathLossModel) -> float:
    try:
        return ase_limit(model).general_value
    except InfeasibleModelError:
        return math.nan


def lambda_sweep(cfg_template: SimConfig, lambda_grid, workers: int | None = None) -> list[SweepRow]:
    """One metric estimate per density, all other settings held fixed."""
    grid = [float(x) for x in lambda_grid]
    if len(grid) < 4 or any(b <= a for a, b in zip(grid[:-1], grid[1:])):
        raise ValueError("lambda grid needs >= 4 strictly increasing values")
    if grid[-1] / grid[0] < 1e3 * (1 - 1e-12):
        raise ValueError("lambda grid must span at least 3 decades")
    limit = analytic_limit_or_nan(cfg_template.model)
    rows = []
    for lam in grid:
        est = estimate_metrics(replace(cfg_template, lam=lam), workers)
        rows.append(SweepRow(lam, est.ase, est.ase_se, est.constrained_ase,
                             est.potential_throughput, est.coverage, limit, est.n, est))
    return rows


def mean_interference_target(model: PathLossModel, lam: float) -> float:
    """Total mean received power ``2 pi lam gamma`` from all stations."""
    return 2 * math.pi * lam * gamma_integral(model)


def window_truncation_bias(model: PathLossModel, lam: float, radius: float) -> float:
    """Mean power from stations beyond ``radius``."""
    return 2 * math.pi * lam * model.gamma_tail(radius)


__all__ = [
    "SimConfig", "SinrSample", "Window", "MetricEstimate", "SweepRow", "Batch",
    "auto_radius", "resolve_window", "draw_batch", "block_rng", "sinr_from_distances",
    "sample_realization", "estimate_metrics", "lambda_sweep",
    "mean_interference_target", "window_truncation_bias",
]

"""Path-loss and fading models.

Distances are in normalized units and gains are linear power ratios.  Every
path-loss model evaluates on scalars or numpy arrays.  Models whose gain
depends on a random link state (LoS/NLoS) expose the state-averaged gain
through ``eval`` and the per-link random gain through ``sample``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import ClassVar

import numpy as np
from scipy import special

from .numerics import CONVERGED, DIVERGED, integrate_semi_infinite

__all__ = [
    "PathLossModel", "UnboundedPowerLaw", "MinPowerLaw", "ShiftedPowerLaw",
    "InversePoly", "ElevatedPowerLaw", "StretchedExp", "MultiSlope",
    "LosNlosComposite", "ExpDecay", "Clamp",
    "FadingModel", "Deterministic", "Rayleigh", "NakagamiM", "LogNormalUnitMean",
    "FeasibilityReport", "ContinuityWarning",
    "eval_pathloss", "l_zero", "check_feasibility", "sample_fading",
    "sample_link_gain", "pathloss_from_dict", "fading_from_dict",
]


class ContinuityWarning(UserWarning):
    pass


def _arr(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be nonnegative")
    return r


def _out(r, y):
    return float(y) if np.ndim(r) == 0 else y


def _positive(**params):
    for name, v in params.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


# --------------------------------------------------------------------------
# path loss


class PathLossModel:
    """Base class.  Subclasses are frozen dataclasses."""

    kind: ClassVar[str] = ""
    # analytic argument that L is non-increasing in r
    monotone: ClassVar[bool] = False
    random_state: ClassVar[bool] = False

    def eval(self, r):
        raise NotImplementedError

    def log_eval(self, r):
        with np.errstate(divide="ignore"):
            return np.log(self.eval(r))

    def log_derivative(self, r):
        """d ln L / dr, or None when no closed form is available."""
        return None

    def l_zero(self) -> float:
        return float(self.eval(0.0))

    def gamma_closed_form(self) -> float | None:
        return None

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def gamma_tail(self, R: float) -> float:
        """Integral of r L(r) over (R, inf)."""
        res = integrate_semi_infinite(lambda r: r * self.eval(r), R, 1e-10,
                                      breakpoints=self.breakpoints())
        return res.value if res.status != DIVERGED else math.inf

    def second_moment(self, r):
        """E[L(r)^2] over the link state."""
        return self.eval(r) ** 2

    def sample(self, r, rng: np.random.Generator):
        return self.eval(r)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class UnboundedPowerLaw(PathLossModel):
    """Standard power law ``A r^-eta``; kept for reference, never feasible."""

    A: float
    eta: float
    kind: ClassVar[str] = "UnboundedPowerLaw"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, eta=self.eta)

    def eval(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            return _out(r, self.A * r ** -self.eta)

    def log_eval(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            return _out(r, math.log(self.A) - self.eta * np.log(r))

    def log_derivative(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            return _out(r, -self.eta / r)

    def l_zero(self) -> float:
        return math.inf

    def gamma_closed_form(self) -> float:
        return math.inf

    def gamma_tail(self, R: float) -> float:
        if self.eta <= 2 or R == 0:
            return math.inf
        return self.A * R ** (2 - self.eta) / (self.eta - 2)


@dataclass(frozen=True)
class MinPowerLaw(PathLossModel):
    """``A min(c0, r^-eta)``."""

    A: float
    c0: float
    eta: float
    kind: ClassVar[str] = "MinPowerLaw"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, c0=self.c0, eta=self.eta)

    @property
    def crossover(self) -> float:
        return self.c0 ** (-1.0 / self.eta)

    def eval(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            return _out(r, self.A * np.minimum(self.c0, r ** -self.eta))

    def log_derivative(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            # right derivative at the kink
            return _out(r, np.where(r >= self.crossover, -self.eta / r, 0.0))

    def breakpoints(self):
        return (self.crossover,)

    def gamma_closed_form(self) -> float:
        if self.eta <= 2:
            return math.inf
        return self.A * self.c0 ** (1 - 2 / self.eta) * self.eta / (2 * (self.eta - 2))

    def gamma_tail(self, R: float) -> float:
        if self.eta <= 2:
            return math.inf
        rc = self.crossover
        far = self.A * max(R, rc) ** (2 - self.eta) / (self.eta - 2)
        near = self.A * self.c0 * (rc**2 - R**2) / 2 if R < rc else 0.0
        return near + far


@dataclass(frozen=True)
class ShiftedPowerLaw(PathLossModel):
    """``A (c0 + r)^-eta``."""

    A: float
    c0: float
    eta: float
    kind: ClassVar[str] = "ShiftedPowerLaw"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, c0=self.c0, eta=self.eta)

    def eval(self, r):
        r = _arr(r)
        return _out(r, self.A * (self.c0 + r) ** -self.eta)

    def log_eval(self, r):
        r = _arr(r)
        return _out(r, math.log(self.A) - self.eta * np.log(self.c0 + r))

    def log_derivative(self, r):
        r = _arr(r)
        return _out(r, -self.eta / (self.c0 + r))

    def gamma_closed_form(self) -> float:
        if self.eta <= 2:
            return math.inf
        e = self.eta
        return self.A * self.c0 ** (2 - e) / ((e - 1) * (e - 2))

    def gamma_tail(self, R: float) -> float:
        e = self.eta
        if e <= 2:
            return math.inf
        u = self.c0 + R
        return self.A * (u ** (2 - e) / (e - 2) - self.c0 * u ** (1 - e) / (e - 1))


@dataclass(frozen=True)
class InversePoly(PathLossModel):
    """``A / (c0 + r^eta)``."""

    A: float
    c0: float
    eta: float
    kind: ClassVar[str] = "InversePoly"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, c0=self.c0, eta=self.eta)

    def eval(self, r):
        r = _arr(r)
        return _out(r, self.A / (self.c0 + r**self.eta))

    def log_eval(self, r):
        r = _arr(r)
        return _out(r, math.log(self.A) - np.log(self.c0 + r**self.eta))

    def log_derivative(self, r):
        r = _arr(r)
        return _out(r, -self.eta * r ** (self.eta - 1) / (self.c0 + r**self.eta))

    def gamma_closed_form(self) -> float:
        e = self.eta
        if e <= 2:
            return math.inf
        return self.A * self.c0 ** (2 / e - 1) * (math.pi / e) / math.sin(2 * math.pi / e)


@dataclass(frozen=True)
class ElevatedPowerLaw(PathLossModel):
    """``A (c0^2 + r^2)^(-eta/2)`` with ``c0`` the elevation difference."""

    A: float
    c0: float
    eta: float
    kind: ClassVar[str] = "ElevatedPowerLaw"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, c0=self.c0, eta=self.eta)

    def eval(self, r):
        r = _arr(r)
        return _out(r, self.A * (self.c0**2 + r**2) ** (-self.eta / 2))

    def log_eval(self, r):
        r = _arr(r)
        return _out(r, math.log(self.A) - 0.5 * self.eta * np.log(self.c0**2 + r**2))

    def log_derivative(self, r):
        r = _arr(r)
        return _out(r, -self.eta * r / (self.c0**2 + r**2))

    def gamma_closed_form(self) -> float:
        if self.eta <= 2:
            return math.inf
        return self.A * self.c0 ** (2 - self.eta) / (self.eta - 2)

    def gamma_tail(self, R: float) -> float:
        if self.eta <= 2:
            return math.inf
        return self.A * (self.c0**2 + R**2) ** (1 - self.eta / 2) / (self.eta - 2)


@dataclass(frozen=True)
class StretchedExp(PathLossModel):
    """``A exp(-alpha r^beta)`` with ``0 < beta <= 2``."""

    A: float
    alpha: float
    beta: float
    kind: ClassVar[str] = "StretchedExp"
    monotone: ClassVar[bool] = True

    def __post_init__(self):
        _positive(A=self.A, alpha=self.alpha, beta=self.beta)
        if self.beta > 2:
            raise ValueError("beta must lie in (0, 2]")

    def eval(self, r):
        r = _arr(r)
        return _out(r, self.A * np.exp(-self.alpha * r**self.beta))

    def log_eval(self, r):
        r = _arr(r)
        return _out(r, math.log(self.A) - self.alpha * r**self.beta)

    def log_derivative(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore"):
            return _out(r, -self.alpha * self.beta * r ** (self.beta - 1))

    def gamma_closed_form(self) -> float:
        b = self.beta
        return self.A * math.gamma(2 / b) / (b * self.alpha ** (2 / b))

    def gamma_tail(self, R: float) -> float:
        b = self.beta
        return self.gamma_closed_form() * float(special.gammaincc(2 / b, self.alpha * R**b))


def _segment_antiderivative(eta: float, c: float, r: float) -> float:
    """Antiderivative of r (r^2 + c^2)^(-eta/2)."""
    s = r * r + c * c
    if eta == 2:
        return 0.5 * math.log(s) if s > 0 else -math.inf
    if s == 0:
        return 0.0 if eta < 2 else -math.inf
    return s ** (1 - eta / 2) / (2 - eta)


@dataclass(frozen=True)
class MultiSlope(PathLossModel):
    """Piecewise power law ``A_i (r^2 + c^2)^(-eta_i/2)`` on ``[r_{i-1}, r_i)``.

    ``boundaries`` holds the n-1 interior breakpoints; the first segment
    starts at 0 and the last runs to infinity.  ``elevation`` (c) is 0 for
    the plain multi-slope law.
    """

    amplitudes: tuple[float, ...]
    exponents: tuple[float, ...]
    boundaries: tuple[float, ...]
    elevation: float = 0.0
    kind: ClassVar[str] = "MultiSlope"

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        n = len(self.amplitudes)
        if n < 2 or len(self.exponents) != n or len(self.boundaries) != n - 1:
            raise ValueError("need n >= 2 amplitudes/exponents and n-1 boundaries")
        for a in self.amplitudes:
            _positive(amplitude=a)
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")
        b = self.boundaries
        if b[0] <= 0 or any(y <= x for x, y in zip(b[:-1], b[1:])):
            raise ValueError("boundaries must be positive and strictly increasing")
        if self.elevation < 0:
            raise ValueError("elevation must be nonnegative")
        mismatch = self.continuity_mismatch()
        if mismatch > 0.01:
            warnings.warn(f"multi-slope gain jumps by {mismatch:.1%} at a boundary",
                          ContinuityWarning, stacklevel=3)

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    def continuity_mismatch(self) -> float:
        """Largest relative gain jump across a boundary."""
        worst = 0.0
        c2 = self.elevation**2
        for i, rb in enumerate(self.boundaries):
            s = rb * rb + c2
            left = self.amplitudes[i] * s ** (-self.exponents[i] / 2)
            right = self.amplitudes[i + 1] * s ** (-self.exponents[i + 1] / 2)
            worst = max(worst, abs(left - right) / max(left, right))
        return worst

    @classmethod
    def continuous(cls, first_amplitude: float, exponents, boundaries,
                   elevation: float = 0.0) -> "MultiSlope":
        """Build a multi-slope law whose amplitudes make the gain continuous."""
        amps = [float(first_amplitude)]
        c2 = elevation**2
        for i, rb in enumerate(boundaries):
            s = rb * rb + c2
            amps.append(amps[-1] * s ** ((exponents[i + 1] - exponents[i]) / 2))
        return cls(tuple(amps), tuple(exponents), tuple(boundaries), elevation)

    def _segment(self, r):
        return np.searchsorted(np.asarray(self.boundaries), r, side="right")

    def eval(self, r):
        r = _arr(r)
        i = self._segment(r)
        A = np.asarray(self.amplitudes)[i]
        eta = np.asarray(self.exponents)[i]
        with np.errstate(divide="ignore"):
            return _out(r, A * (r * r + self.elevation**2) ** (-eta / 2))

    def log_eval(self, r):
        r = _arr(r)
        i = self._segment(r)
        A = np.asarray(self.amplitudes)[i]
        eta = np.asarray(self.exponents)[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(A) - 0.5 * eta * np.log(r * r + self.elevation**2)
        return _out(r, np.where(eta == 0, np.log(A), lg))

    def log_derivative(self, r):
        r = _arr(r)
        eta = np.asarray(self.exponents)[self._segment(r)]
        with np.errstate(divide="ignore", invalid="ignore"):
            d = -eta * r / (r * r + self.elevation**2)
        return _out(r, np.where(eta == 0, 0.0, d))

    def breakpoints(self):
        return self.boundaries

    def _gamma_from(self, R: float) -> float:
        if self.exponents[-1] <= 2:
            return math.inf
        edges = (0.0,) + self.boundaries + (math.inf,)
        c = self.elevation
        total = 0.0
        for i in range(self.n):
            lo, hi = max(edges[i], R), edges[i + 1]
            if hi <= lo:
                continue
            eta = self.exponents[i]
            F_lo = _segment_antiderivative(eta, c, lo)
            F_hi = 0.0 if math.isinf(hi) else _segment_antiderivative(eta, c, hi)
            if F_lo == -math.inf:
                return math.inf
            total += self.amplitudes[i] * (F_hi - F_lo)
        return total

    def gamma_closed_form(self) -> float:
        return self._gamma_from(0.0)

    def gamma_tail(self, R: float) -> float:
        return self._gamma_from(R)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "amplitudes": list(self.amplitudes),
                "exponents": list(self.exponents), "boundaries": list(self.boundaries),
                "elevation": self.elevation}


@dataclass(frozen=True)
class ExpDecay:
    """LoS probability ``exp(-r / mu)``."""

    mu: float
    kind: ClassVar[str] = "ExpDecay"

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")

    def __call__(self, r):
        return np.exp(-np.asarray(r, dtype=float) / self.mu)


@dataclass(frozen=True)
class Clamp:
    """LoS probability ``min(d / r, 1)``."""

    d: float
    kind: ClassVar[str] = "Clamp"

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("d must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.minimum(self.d / r, 1.0)


_LOS_PROBABILITIES = {c.kind: c for c in (ExpDecay, Clamp)}


@dataclass(frozen=True)
class LosNlosComposite(PathLossModel):
    """Link-state dependent path loss.

    Each link is LoS with probability ``p_los(r)`` independently of all other
    links, in which case the ``los`` branch applies, else the ``nlos`` one.
    """

    los: MultiSlope
    nlos: MultiSlope
    p_los: ExpDecay | Clamp
    kind: ClassVar[str] = "LosNlosComposite"
    random_state: ClassVar[bool] = True

    def __post_init__(self):
        if self.los.elevation != self.nlos.elevation:
            raise ValueError("LoS and NLoS branches must share the elevation")

    @property
    def c0(self) -> float:
        return self.los.elevation

    def eval(self, r):
        r = _arr(r)
        p = self.p_los(r)
        return _out(r, p * self.los.eval(r) + (1 - p) * self.nlos.eval(r))

    def second_moment(self, r):
        r = _arr(r)
        p = self.p_los(r)
        return _out(r, p * self.los.eval(r) ** 2 + (1 - p) * self.nlos.eval(r) ** 2)

    def sample(self, r, rng):
        r = _arr(r)
        is_los = rng.random(r.shape) < self.p_los(r)
        return _out(r, np.where(is_los, self.los.eval(r), self.nlos.eval(r)))

    def breakpoints(self):
        return tuple(sorted(set(self.los.boundaries) | set(self.nlos.boundaries)))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "los": self.los.to_dict(), "nlos": self.nlos.to_dict(),
                "p_los": {"kind": self.p_los.kind, **asdict(self.p_los)}}


_PATHLOSS = {c.kind: c for c in (UnboundedPowerLaw, MinPowerLaw, ShiftedPowerLaw,
                                 InversePoly, ElevatedPowerLaw, StretchedExp,
                                 MultiSlope, LosNlosComposite)}


def pathloss_from_dict(d: dict) -> PathLossModel:
    """Inverse of ``PathLossModel.to_dict``; raises ValueError on bad input."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _PATHLOSS:
        raise ValueError(f"unknown path-loss kind {kind!r}; expected one of {sorted(_PATHLOSS)}")
    if kind == "MultiSlope":
        d = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
    if kind == "LosNlosComposite":
        p = dict(d.get("p_los", {}))
        pk = p.pop("kind", None)
        if pk not in _LOS_PROBABILITIES:
            raise ValueError(f"unknown p_los kind {pk!r}")
        try:
            d = {"los": pathloss_from_dict({"kind": "MultiSlope", **_strip_kind(d["los"])}),
                 "nlos": pathloss_from_dict({"kind": "MultiSlope", **_strip_kind(d["nlos"])}),
                 "p_los": _LOS_PROBABILITIES[pk](**p)}
        except KeyError as exc:
            raise ValueError(f"LosNlosComposite missing field {exc}") from None
    try:
        return _PATHLOSS[kind](**d)
    except TypeError as exc:
        raise ValueError(f"{kind}: {exc}") from None


def _strip_kind(d: dict) -> dict:
    return {k: v for k, v in d.items() if k != "kind"}


# --------------------------------------------------------------------------
# fading


class FadingModel:
    """Unit-mean small-scale fading power."""

    kind: ClassVar[str] = ""

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def second_moment(self) -> float:
        raise NotImplementedError

    def mean_complement(self, s):
        """E[1 - exp(-h s)] for s >= 0."""
        raise NotImplementedError

    def survival(self, y):
        """P(h >= y)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Deterministic(FadingModel):
    kind: ClassVar[str] = "Deterministic"

    def sample(self, rng, size=None):
        return 1.0 if size is None else np.ones(size)

    def second_moment(self):
        return 1.0

    def mean_complement(self, s):
        return -np.expm1(-np.asarray(s, dtype=float))

    def survival(self, y):
        return (np.asarray(y) <= 1.0).astype(float)


@dataclass(frozen=True)
class Rayleigh(FadingModel):
    kind: ClassVar[str] = "Rayleigh"

    def sample(self, rng, size=None):
        return rng.standard_exponential(size)

    def second_moment(self):
        return 2.0

    def mean_complement(self, s):
        s = np.asarray(s, dtype=float)
        return s / (1.0 + s)

    def survival(self, y):
        return np.exp(-np.maximum(np.asarray(y, dtype=float), 0.0))


@dataclass(frozen=True)
class NakagamiM(FadingModel):
    """Gamma(m, 1/m) power gain."""

    m: float
    kind: ClassVar[str] = "NakagamiM"

    def __post_init__(self):
        if not self.m >= 0.5:
            raise ValueError("Nakagami m must be >= 0.5")

    def sample(self, rng, size=None):
        return rng.standard_gamma(self.m, size) / self.m

    def second_moment(self):
        return 1.0 + 1.0 / self.m

    def mean_complement(self, s):
        s = np.asarray(s, dtype=float)
        return -np.expm1(-self.m * np.log1p(s / self.m))

    def survival(self, y):
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        return special.gammaincc(self.m, self.m * y)


_GH_X, _GH_W = np.polynomial.hermite_e.hermegauss(60)
_GH_W = _GH_W / _GH_W.sum()


@dataclass(frozen=True)
class LogNormalUnitMean(FadingModel):
    """Log-normal power with ``sigma_db`` spread, rescaled to unit mean."""

    sigma_db: float
    kind: ClassVar[str] = "LogNormalUnitMean"

    def __post_init__(self):
        if not self.sigma_db > 0:
            raise ValueError("sigma_db must be positive")

    @property
    def sigma(self) -> float:
        return self.sigma_db * math.log(10) / 10

    def sample(self, rng, size=None):
        s = self.sigma
        return np.exp(s * rng.standard_normal(size) - s * s / 2)

    def second_moment(self):
        return math.exp(self.sigma**2)

    def mean_complement(self, s):
        s = np.asarray(s, dtype=float)
        h = np.exp(self.sigma * _GH_X - self.sigma**2 / 2)
        return -np.expm1(-np.multiply.outer(s, h)) @ _GH_W

    def survival(self, y):
        from scipy.stats import norm

        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            z = (np.log(y) + self.sigma**2 / 2) / self.sigma
        return norm.sf(z)


_FADING = {c.kind: c for c in (Deterministic, Rayleigh, NakagamiM, LogNormalUnitMean)}


def fading_from_dict(d: dict) -> FadingModel:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _FADING:
        raise ValueError(f"unknown fading kind {kind!r}; expected one of {sorted(_FADING)}")
    try:
        return _FADING[kind](**d)
    except TypeError as exc:
        raise ValueError(f"{kind}: {exc}") from None


# --------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class FeasibilityReport:
    l_zero: float
    bounded: bool
    gamma: float
    feasible: bool
    failed_property: int | None = None
    gamma_status: str = CONVERGED
    notes: tuple[str, ...] = field(default_factory=tuple)


def eval_pathloss(model: PathLossModel, r):
    """Mean channel gain at distance ``r`` (state-averaged for composites)."""
    return model.eval(r)


def l_zero(model: PathLossModel) -> float:
    """Gain at distance zero; ``math.inf`` when the model has a pole there."""
    return model.l_zero()


def scan_grid(model: PathLossModel, r_max: float = 1e6, per_decade: int = 1000) -> np.ndarray:
    decades = int(round(math.log10(r_max))) + 6
    grid = np.concatenate([[0.0], np.logspace(-6, math.log10(r_max), decades * per_decade + 1)])
    extra = [b * (1 + d) for b in model.breakpoints() for d in (-1e-9, 0.0, 1e-9)]
    return np.unique(np.concatenate([grid, extra]))


def check_feasibility(model: PathLossModel, tol: float = 1e-10) -> FeasibilityReport:
    """Test the three physical-feasibility properties in order.

    1. finite gain at distance zero,
    2. gain never exceeds that value,
    3. finite positive area integral of r L(r).
    """
    L0 = model.l_zero()
    if not (math.isfinite(L0) and L0 >= 0):
        return FeasibilityReport(L0, False, math.inf, False, 1,
                                 notes=("gain is unbounded at r = 0",))
    grid = scan_grid(model)
    peak = float(np.max(model.eval(grid)))
    bounded = peak <= L0 * (1 + 1e-12)
    notes = []
    if model.monotone:
        notes.append("non-increasing by construction")
    if not bounded:
        at = float(grid[np.argmax(model.eval(grid))])
        return FeasibilityReport(L0, False, math.nan, False, 2,
                                 notes=(f"L({at:g}) = {peak:g} exceeds L0 = {L0:g}",))
    res = integrate_semi_infinite(lambda r: r * model.eval(r), 0.0, tol,
                                  breakpoints=model.breakpoints())
    if res.status == DIVERGED:
        return FeasibilityReport(L0, True, math.inf, False, 3, gamma_status=DIVERGED,
                                 notes=tuple(notes) + ("integral of r L(r) diverges",))
    if res.value <= 0:
        return FeasibilityReport(L0, True, res.value, False, 3, gamma_status=res.status,
                                 notes=tuple(notes) + ("integral of r L(r) is zero",))
    if res.status != CONVERGED:
        notes.append("gamma quadrature inconclusive")
    return FeasibilityReport(L0, True, res.value, True, None, gamma_status=res.status,
                             notes=tuple(notes))


def sample_fading(model: FadingModel, rng: np.random.Generator, size=None):
    return model.sample(rng, size)


def sample_link_gain(model: PathLossModel, r, rng: np.random.Generator):
    """Per-link gain; draws the link state independently for composites."""
    return model.sample(r, rng)

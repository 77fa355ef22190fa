"""Area integral of the path loss and the asymptotic ASE it implies.

The dense-network ASE limit is ``L0 / (2 pi ln2 gamma)`` with
``gamma = int_0^inf r L(r) dr``.  That route is authoritative here; the
per-model closed forms are kept as cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .models import (ElevatedPowerLaw, InversePoly, MinPowerLaw, MultiSlope,
                     PathLossModel, ShiftedPowerLaw, StretchedExp, check_feasibility)
from .numerics import DIVERGED, QuadratureResult, integrate_semi_infinite

LN2 = math.log(2.0)


class InfeasibleModelError(ValueError):
    def __init__(self, model: PathLossModel, prop: int, detail: str = ""):
        msg = f"{model.kind} is not physically feasible: property {prop} fails"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.failed_property = prop


class DivergentGammaError(InfeasibleModelError):
    def __init__(self, model: PathLossModel):
        super().__init__(model, 3, "gamma diverges")


@dataclass(frozen=True)
class AseLimit:
    general_value: float
    closed_form_value: float | None
    gamma: float
    l_zero: float
    agreement: float | None


def gamma_quadrature(model: PathLossModel, tol: float = 1e-10) -> QuadratureResult:
    return integrate_semi_infinite(lambda r: r * model.eval(r), 0.0, tol,
                                   breakpoints=model.breakpoints())


def gamma_integral(model: PathLossModel, tol: float = 1e-10) -> float:
    """``int_0^inf r L(r) dr``, closed form where one exists.

    Raises DivergentGammaError when the integral is infinite.
    """
    closed = model.gamma_closed_form()
    if closed is not None:
        if math.isinf(closed):
            raise DivergentGammaError(model)
        return closed
    res = gamma_quadrature(model, tol)
    if res.status == DIVERGED:
        raise DivergentGammaError(model)
    return res.value


def gamma_cross_check(model: PathLossModel, tol: float = 1e-10) -> tuple[float, float | None]:
    """Return ``(quadrature, closed_form)``; the latter may be None."""
    res = gamma_quadrature(model, tol)
    if res.status == DIVERGED:
        raise DivergentGammaError(model)
    return res.value, model.gamma_closed_form()


def limit_from_gamma(l0: float, gamma: float) -> float:
    return l0 / (2 * math.pi * LN2 * gamma)


def table1_limit(model: PathLossModel) -> float | None:
    """Closed-form dense limit for the five single-slope bounded models."""
    pi = math.pi
    if isinstance(model, MinPowerLaw):
        e, c0 = model.eta, model.c0
        return (e - 2) * c0 ** (2 / e) / (e * pi * LN2)
    if isinstance(model, ShiftedPowerLaw):
        e, c0 = model.eta, model.c0
        return (e * e - 3 * e + 2) / (2 * pi * LN2 * c0**2)
    if isinstance(model, InversePoly):
        e, c0 = model.eta, model.c0
        return e * math.sin(2 * pi / e) / (2 * pi**2 * LN2 * c0 ** (2 / e))
    if isinstance(model, ElevatedPowerLaw):
        e, c0 = model.eta, model.c0
        return (e - 2) / (2 * pi * c0**2 * LN2)
    if isinstance(model, StretchedExp):
        a, b = model.alpha, model.beta
        return b * a ** (2 / b) / (2 * pi * LN2 * math.gamma(2 / b))
    return None


def multislope_limit_printed(model: MultiSlope) -> float:
    """The published multi-slope formula, evaluated literally.

    Its last-segment term divides by ``eta_n`` rather than ``eta_n - 2``; see
    ``multislope_limit`` for the value actually implied by the model.
    """
    A, eta, r = model.amplitudes, model.exponents, model.boundaries
    n = model.n
    acc = A[0] * r[0] ** 2 / 2 + A[-1] * r[-1] ** (2 - eta[-1]) / eta[-1]
    for i in range(1, n - 1):
        acc += A[i] * (r[i] ** (2 - eta[i]) / (2 - eta[i])
                       + r[i - 1] ** (2 - eta[i]) / (eta[i] - 2))
    return A[0] / (2 * math.pi * LN2) / acc


@dataclass(frozen=True)
class MultiSlopeLimit:
    value: float
    printed_formula: float
    relative_difference: float


def multislope_limit(model: MultiSlope) -> MultiSlopeLimit:
    if model.exponents[0] != 0:
        raise ValueError("first exponent must be 0 for a bounded multi-slope law")
    if model.elevation != 0:
        raise ValueError("the multi-slope limit formula assumes zero elevation")
    gamma = model.gamma_closed_form()
    if math.isinf(gamma):
        raise DivergentGammaError(model)
    value = limit_from_gamma(model.l_zero(), gamma)
    printed = multislope_limit_printed(model)
    return MultiSlopeLimit(value, printed, abs(printed - value) / value)


def ase_limit(model: PathLossModel, tol: float = 1e-10) -> AseLimit:
    """Dense-network limit of the average ASE.

    Raises InfeasibleModelError naming the failed feasibility property.
    """
    report = check_feasibility(model, tol)
    if not report.feasible:
        raise InfeasibleModelError(model, report.failed_property, "; ".join(report.notes))
    gamma = gamma_integral(model, tol)
    general = limit_from_gamma(report.l_zero, gamma)
    closed = table1_limit(model)
    if closed is None and isinstance(model, MultiSlope) and model.exponents[0] == 0 \
            and model.elevation == 0:
        closed = multislope_limit(model).value
    agreement = None if closed is None else abs(closed - general) / general
    return AseLimit(general, closed, gamma, report.l_zero, agreement)

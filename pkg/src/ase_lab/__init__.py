"""Dense-network area spectral efficiency under bounded path loss.

Path-loss and fading models (``models``), semi-infinite quadrature with
divergence detection (``numerics``), the dense-network ASE limit
(``analytic``), sufficient-condition checks and the interference functional
(``conditions``), a Monte Carlo engine (``sim``) and a CLI (``cli``).
"""
from .analytic import AseLimit, InfeasibleModelError, ase_limit, gamma_integral
from .conditions import (ConditionVerdict, InterferenceFunctional, check_corollary2,
                         check_corollary5, interference_laplace, mc_negative_moment_oracle,
                         second_negative_moment)
from .models import (Clamp, Deterministic, ElevatedPowerLaw, ExpDecay, InversePoly,
                     LogNormalUnitMean, LosNlosComposite, MinPowerLaw, MultiSlope, NakagamiM,
                     Rayleigh, ShiftedPowerLaw, StretchedExp, UnboundedPowerLaw,
                     check_feasibility, eval_pathloss, l_zero)
from .numerics import QuadratureResult, integrate_semi_infinite
from .sim import SimConfig, estimate_metrics, lambda_sweep

__version__ = "0.1.0"

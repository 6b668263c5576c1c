"""Special functions: Eisenstein-type series, elliptic kernels, Laurent
fits, Bernoulli numbers, truncated Laurent series, and the Jacobi slash
action."""

from .eisenstein import (
    eisenstein,
    eisenstein_tilde,
    eisenstein_tilde_series_coefficient,
    eisenstein_twisted,
    p1_twisted_series_coefficient,
)
from .laurent import LaurentFit, laurent_coeffs_p1
from .points import (
    AnnulusPoint,
    ModularPoint,
    SL2Element,
    Truncation,
    TwistPair,
    default_truncation,
    phase,
)
from .series import QLaurentSeries, bernoulli, stable_sum
from .slash import jacobi_slash
from .weierstrass import weier_p, weier_p_deformed, weier_p_tilde, weier_p_twisted

__all__ = [
    "AnnulusPoint",
    "LaurentFit",
    "ModularPoint",
    "QLaurentSeries",
    "SL2Element",
    "Truncation",
    "TwistPair",
    "bernoulli",
    "default_truncation",
    "eisenstein",
    "eisenstein_tilde",
    "eisenstein_tilde_series_coefficient",
    "eisenstein_twisted",
    "jacobi_slash",
    "laurent_coeffs_p1",
    "p1_twisted_series_coefficient",
    "phase",
    "stable_sum",
    "weier_p",
    "weier_p_deformed",
    "weier_p_tilde",
    "weier_p_twisted",
]

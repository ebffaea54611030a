"""Circular Dyson process, multiple radial SLE and their spectral theory."""

from fractions import Fraction

from . import _sledyson
from ._sledyson import (
    DomainError,
    IntegratorError,
    cs_spectrum,
    derivative_at_origin,
    drift,
    gap_cdf,
    gap_normalization,
    ks_gap,
    ks_two_sample,
    one_arm_eigenvalue,
    one_arm_lambda_exact,
    potential,
    sample_matrix_ensemble,
    sample_stationary,
    simulate,
    validate,
)

__version__ = _sledyson.__version__


def _fraction(pair):
    return Fraction(*pair)


def beta_from_kappa(kappa):
    """4/kappa as an exact Fraction; kappa may be an int, Fraction or "p/q" string."""
    return _fraction(_sledyson.beta_from_kappa(str(Fraction(kappa))))


def kac_h_1_s(kappa, p):
    return _fraction(_sledyson.kac_h_1_s(str(Fraction(kappa)), p))


def fusion_exponent(p, kappa):
    return _fraction(_sledyson.fusion_exponent(p, str(Fraction(kappa))))


def ansatz_exponent(p, beta):
    return _fraction(_sledyson.ansatz_exponent(p, str(Fraction(beta))))


def h21(kappa):
    return _fraction(_sledyson.h21(str(Fraction(kappa))))


__all__ = [
    "DomainError",
    "IntegratorError",
    "ansatz_exponent",
    "beta_from_kappa",
    "cs_spectrum",
    "derivative_at_origin",
    "drift",
    "fusion_exponent",
    "gap_cdf",
    "gap_normalization",
    "h21",
    "kac_h_1_s",
    "ks_gap",
    "ks_two_sample",
    "one_arm_eigenvalue",
    "one_arm_lambda_exact",
    "potential",
    "sample_matrix_ensemble",
    "sample_stationary",
    "simulate",
    "validate",
]

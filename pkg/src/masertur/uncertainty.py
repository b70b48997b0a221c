"""Entropy production and the thermodynamic uncertainty of the engine.

The dimensionless uncertainty Q = sigma * var / mean^2 (k_B = 1) reduces to
the bath log-ratio times the Fano factor. Its population part depends only
on the bath occupations and never goes below 2; violations of the
conventional bound Q >= 2 live entirely in the transport part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .counting import EQUILIBRIUM_GUARD, fano, transport_coefficients
from .errors import DomainError
from .model import EngineParams


@dataclass(frozen=True)
class TurReport:
    """Uncertainty figures at one parameter point (quantum plus classical twin)."""

    sigma: float
    q: float
    q_pop: float
    q_tr: float
    q_classical: float
    advantage: float
    mean_rate: float
    variance_rate: float


def log_bath_ratio(n_u: float, n_l: float) -> float:
    """ln[n_l (n_u + 1) / (n_u (n_l + 1))], accurate near equilibrium.

    Evaluated as log1p((n_l - n_u) / (n_u (n_l + 1))): the argument ratio
    equals 1 + that increment exactly, and the log1p form keeps the result
    accurate relative to its own (possibly tiny) size.
    """
    if n_u <= 0.0 or n_l <= 0.0:
        raise DomainError("bath log-ratio diverges: n_u and n_l must be > 0")
    if n_l == n_u:
        raise DomainError("bath log-ratio vanishes identically at n_l = n_u")
    return math.log1p((n_l - n_u) / (n_u * (n_l + 1.0)))


def entropy_production(params: EngineParams, mean: float) -> float:
    """Entropy production rate sigma = ln-ratio * mean (k_B = 1).

    Positive whenever the current flows: the mean carries the same sign as
    n_l - n_u, and so does the log-ratio.
    """
    return log_bath_ratio(params.n_u, params.n_l) * mean


def q_pop(params: EngineParams) -> float:
    """Population part of the uncertainty; >= 2 for all valid occupations."""
    _check_ratio_domain(params)
    fano_pop = (
        2.0 * params.n_l * params.n_u + params.n_l + params.n_u
    ) / (params.n_l - params.n_u)
    return log_bath_ratio(params.n_u, params.n_l) * fano_pop


def quantum_advantage(params: EngineParams) -> float:
    """Q - Q_cl in factored form 2 mean ln-ratio (C_cl - C).

    The factorisation keeps sign(advantage) = sign(delta^2 - Gamma^2) exact
    in floating point, which the sign-law sweeps rely on.
    """
    _check_ratio_domain(params)
    cum = fano(params, "classical")
    sigma = entropy_production(params, cum.mean)
    _, c_diff = transport_coefficients(params)
    return -2.0 * sigma * c_diff


def thermodynamic_uncertainty(params: EngineParams, model: str = "quantum") -> TurReport:
    """Full uncertainty report for the chosen model.

    For the quantum model the classical twin (same golden-rule rate, hence
    same mean) is evaluated alongside; for the classical model the report
    describes the classical system itself and the advantage is zero.
    """
    _check_ratio_domain(params)
    cum = fano(params, model)
    ln_ratio = log_bath_ratio(params.n_u, params.n_l)
    sigma = ln_ratio * cum.mean
    pop = ln_ratio * cum.fano_pop
    tr = ln_ratio * cum.fano_tr
    q = pop + tr
    if model == "quantum":
        cum_cl = fano(params, "classical")
        q_classical = pop + ln_ratio * cum_cl.fano_tr
        _, c_diff = transport_coefficients(params)
        advantage = -2.0 * sigma * c_diff
    else:
        q_classical = q
        advantage = 0.0
    return TurReport(
        sigma=sigma,
        q=q,
        q_pop=pop,
        q_tr=tr,
        q_classical=q_classical,
        advantage=advantage,
        mean_rate=cum.mean,
        variance_rate=cum.variance,
    )


def _check_ratio_domain(params: EngineParams) -> None:
    if params.n_u <= 0.0 or params.n_l <= 0.0:
        raise DomainError("uncertainty undefined: n_u and n_l must be > 0")
    if abs(params.n_l - params.n_u) < EQUILIBRIUM_GUARD:
        raise DomainError("uncertainty singular at equilibrium: |n_l - n_u| below 1e-9")
    if params.epsilon == 0.0:
        raise DomainError("uncertainty undefined: epsilon = 0 gives zero mean rate")

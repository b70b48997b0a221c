"""Quantum lower bound B = sigma / (Upsilon + Psi) on the uncertainty.

Upsilon is the steady-state rate of bath-induced jumps (dynamical
activity); Psi corrects for the coherent part of the dynamics and is built
from two half-Lindbladian supermatrices acting on either side of the
density matrix. Those maps do not preserve hermiticity individually, so
this module works in the complete complex basis

    (rho_xx, rho_uu, rho_ll, rho_ul, rho_lu)

and converts to/from the real 5-basis used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counting import charpoly_coeffs_quantum, mean_rate
from .errors import NumericalError
from .model import EngineParams, steady_state_closed_form, SteadyState
from .uncertainty import entropy_production

_PINV_RCOND = 1e-12
_RANK_TOL = 1e-10
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class BoundComponents:
    """Pieces of the bound: activity, coherent contribution, scaling slope, B."""

    upsilon: float
    psi: float
    h_prime: float
    bound: float


def real_to_complete() -> np.ndarray:
    """Change of basis from (x, u, l, Re ul, Im ul) to (x, u, l, ul, lu)."""
    T = np.eye(5, dtype=complex)
    T[3, 3] = 1.0
    T[3, 4] = 1.0j
    T[4, 3] = 1.0
    T[4, 4] = -1.0j
    return T


def complete_to_real() -> np.ndarray:
    T = np.eye(5, dtype=complex)
    T[3, 3] = 0.5
    T[3, 4] = 0.5
    T[4, 3] = -0.5j
    T[4, 4] = 0.5j
    return T


def full_basis_steady_state(ss: SteadyState) -> np.ndarray:
    """Steady state as a complete-basis vector (rho_lu = conj(rho_ul))."""
    return np.array(
        [ss.rho_xx, ss.rho_uu, ss.rho_ll, ss.rho_ul, np.conj(ss.rho_ul)],
        dtype=complex,
    )


def k_supermatrices(params: EngineParams) -> tuple[np.ndarray, np.ndarray]:
    """The two half-Lindbladian supermatrices in the complete basis.

    K1 collects -i H rho and the left half of the dissipators, K2 the
    +i rho H side and the right half; their sum is the full Liouvillian.
    """
    gu, gl = params.gamma_u, params.gamma_l
    nu, nl = params.n_u, params.n_l
    ie = 1j * params.epsilon
    idlt = 1j * params.delta
    up_u = 0.5 * gu * nu
    up_l = 0.5 * gl * nl
    down_u = 0.5 * gu * (nu + 1.0)
    down_l = 0.5 * gl * (nl + 1.0)
    k1 = np.array(
        [
            [-down_l - down_u, up_u, up_l, 0.0, 0.0],
            [down_u, idlt - up_u, 0.0, 0.0, -ie],
            [down_l, 0.0, -up_l, -ie, 0.0],
            [0.0, 0.0, -ie, idlt - up_u, 0.0],
            [0.0, -ie, 0.0, 0.0, -up_l],
        ],
        dtype=complex,
    )
    k2 = np.array(
        [
            [-down_l - down_u, up_u, up_l, 0.0, 0.0],
            [down_u, -idlt - up_u, 0.0, ie, 0.0],
            [down_l, 0.0, -up_l, 0.0, ie],
            [0.0, ie, 0.0, -up_l, 0.0],
            [0.0, 0.0, ie, 0.0, -idlt - up_u],
        ],
        dtype=complex,
    )
    return k1, k2


def full_liouvillian(params: EngineParams) -> np.ndarray:
    """Complete-basis Liouvillian, the sum of the two half supermatrices."""
    k1, k2 = k_supermatrices(params)
    return k1 + k2


def dynamical_activity(params: EngineParams, ss: SteadyState) -> float:
    """Average steady-state rate of bath jumps."""
    return (
        params.gamma_u * (1.0 + params.n_u) * ss.rho_xx
        + params.gamma_u * params.n_u * ss.rho_uu
        + params.gamma_l * (1.0 + params.n_l) * ss.rho_xx
        + params.gamma_l * params.n_l * ss.rho_ll
    )


def projected_pseudoinverse(l_full: np.ndarray, ss_full: np.ndarray) -> np.ndarray:
    """(I - P) L^+ (I - P) with the steady-state projector.

    P repeats the steady-state vector in the three population columns and
    is zero elsewhere; it is idempotent but not hermitian, and is applied
    exactly as printed rather than orthogonalised. L^+ is the
    Moore-Penrose pseudoinverse computed by SVD with a relative cutoff.
    """
    singulars = np.linalg.svd(l_full, compute_uv=False)
    scale = singulars[0]
    if scale == 0.0 or singulars[-1] > _RANK_TOL * scale:
        raise NumericalError("Liouvillian is not singular: no steady-state kernel")
    if singulars[-2] <= _DEGENERACY_TOL * scale:
        raise NumericalError("Liouvillian kernel dimension != 1")
    trace = ss_full[0] + ss_full[1] + ss_full[2]
    if abs(trace - 1.0) > 1e-10:
        raise NumericalError("steady-state vector is not trace normalized")
    pinv = np.linalg.pinv(l_full, rcond=_PINV_RCOND)
    projector = np.zeros((5, 5), dtype=complex)
    for col in range(3):
        projector[:, col] = ss_full
    complement = np.eye(5, dtype=complex) - projector
    return complement @ pinv @ complement


def coherent_contribution(params: EngineParams, ss_full: np.ndarray) -> float:
    """Coherent-dynamics correction Psi to the dynamical activity.

    Psi = -4 Tr[K1 Lp K2 rho + K2 Lp K1 rho]; the trace of a vectorized
    operator is the sum of its three population components. The result is
    real up to rounding; a residue above 1e-8 (relative to the value)
    aborts instead of being silently discarded.
    """
    k1, k2 = k_supermatrices(params)
    lp = projected_pseudoinverse(k1 + k2, ss_full)
    vec = k1 @ (lp @ (k2 @ ss_full)) + k2 @ (lp @ (k1 @ ss_full))
    psi = -4.0 * (vec[0] + vec[1] + vec[2])
    if abs(psi.imag) > 1e-8 * max(1.0, abs(psi.real)):
        raise NumericalError(
            f"coherent contribution has non-real residue {psi.imag:.3e}"
        )
    return psi.real


def quantum_bound(params: EngineParams) -> BoundComponents:
    """Evaluate the bound B = sigma / (Upsilon + Psi).

    The scaling slope of the current under uniform rate rescaling is
    exactly 1 for this engine, so it enters as a fixed factor; the scaling
    property itself is exercised by tests, not recomputed here.
    """
    ss = steady_state_closed_form(params)
    ss_full = full_basis_steady_state(ss)
    upsilon = dynamical_activity(params, ss)
    psi = coherent_contribution(params, ss_full)
    mean = mean_rate(charpoly_coeffs_quantum(params))
    sigma = entropy_production(params, mean)
    denom = upsilon + psi
    if denom <= 0.0:
        raise NumericalError(
            "bound undefined: dynamical activity plus coherent contribution "
            f"is not positive ({denom!r})"
        )
    return BoundComponents(upsilon=upsilon, psi=psi, h_prime=1.0, bound=sigma / denom)

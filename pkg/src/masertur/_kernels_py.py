"""Pure-numpy batch kernels (fallback when the compiled core is absent).

Both backends implement the same two entry points with identical
semantics:

* uniform_streams: counter-based uniforms keyed by (seed, sample index,
  stream), so any partition of the index range reproduces the same draws;
* batch_uncertainty: the closed-form per-sample pipeline from parameters
  to uncertainty figures.

The random stream is a stateless splitmix64: output j of the generator
seeded with s is finalize(s + (j + 1) * GOLDEN), evaluated here directly
at j = 8 * sample + stream. Integer work is exact, so the two backends
agree bitwise on the uniforms; the float pipeline agrees to rounding.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STRIDE = 8  # counter slots reserved per sample
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def _finalize(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_streams(seed: int, start: int, count: int, nstreams: int) -> np.ndarray:
    """Uniforms in [0, 1) for samples [start, start+count), shape (nstreams, count)."""
    if not 0 < nstreams <= _STRIDE:
        raise ValueError(f"nstreams must be in 1..{_STRIDE}")
    seed64 = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    base = np.arange(start, start + count, dtype=np.uint64) * np.uint64(_STRIDE)
    out = np.empty((nstreams, count))
    for k in range(nstreams):
        counter = base + np.uint64(k)
        state = seed64 + (counter + np.uint64(1)) * _GOLDEN
        out[k] = (_finalize(state) >> np.uint64(11)).astype(np.float64) * _TO_UNIT
    return out


def batch_uncertainty(gu, gl, nu, nl, eps, dlt):
    """Uncertainty figures for arrays of valid parameter points.

    Returns (mean_q, mean_cl, q, q_cl, q_pop, advantage). Callers must
    filter out near-equilibrium points (|n_l - n_u| too small) first; the
    kernel assumes every row is in the valid domain.

    The classical uncertainty is assembled as q_pop plus an exactly
    non-positive transport term, and the quantum one as q_cl plus the
    factored advantage, so the ordering q_cl <= q_pop and the sign law
    sign(advantage) = sign(delta^2 - Gamma^2) hold without rounding
    exceptions.
    """
    gamma_big = 0.5 * (gu * nu + gl * nl)
    ssq = dlt * dlt + gamma_big * gamma_big
    gamma_c = 2.0 * eps * eps * gamma_big / ssq
    a_pop = 3.0 * nl * nu + nl + nu
    gg = gu * gl
    c1 = 2.0 * gamma_c * (3.0 * gamma_big + gl + gu) + gg * a_pop
    a1 = gg * ssq * a_pop + 4.0 * eps * eps * gamma_big * (3.0 * gamma_big + gl + gu)
    mean_q = 2.0 * eps * eps * gg * (nl - nu) * gamma_big / a1
    mean_cl = gamma_c * gg * (nl - nu) / c1
    fano_pop = (2.0 * nl * nu + nl + nu) / (nl - nu)
    c_cl = (2.0 * gamma_c + 4.0 * gamma_big + gl + gu) / c1
    c_diff = ((gamma_big * gamma_big - dlt * dlt) / ssq) * (gg / gamma_big) * (a_pop / c1)
    ln_ratio = np.log1p((nl - nu) / (nu * (nl + 1.0)))
    sigma = ln_ratio * mean_cl
    q_pop = ln_ratio * fano_pop
    q_cl = q_pop + (-2.0 * sigma * c_cl)
    advantage = -2.0 * sigma * c_diff
    q = q_cl + advantage
    return mean_q, mean_cl, q, q_cl, q_pop, advantage

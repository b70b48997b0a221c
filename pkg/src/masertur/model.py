"""Physical parameters, Liouvillian generators and steady states.

The engine is a three-level system (lower/upper lasing levels l, u and an
excited state x) coupled to two thermal baths and a resonant drive of
strength epsilon detuned by delta from the lasing transition. Everything
here works in the rotating frame, so only the detuning enters; absolute
level energies never appear.

Basis conventions used throughout the package:

* quantum (real) basis: (rho_xx, rho_uu, rho_ll, Re rho_ul, Im rho_ul)
* classical basis:      (rho_xx, rho_uu, rho_ll)

Counting fields chi_u, chi_l multiply the bath jump terms by exp(+-i chi)
so that derivatives of the dominant eigenvalue of the generator give the
cumulants of the emitted-quanta current (see the counting module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import mpmath as mp
import numpy as np

from .errors import DomainError, NumericalError

# Left null covectors of the generators at zero counting field
# (trace preservation).
TRACE_COVECTOR_QUANTUM = np.array([1.0, 1.0, 1.0, 0.0, 0.0])
TRACE_COVECTOR_CLASSICAL = np.array([1.0, 1.0, 1.0])

# (row, col, sign, field) entries that carry a counting phase exp(i*sign*chi).
_COUNTING_QUANTUM = ((0, 1, +1, "u"), (1, 0, -1, "u"), (0, 2, +1, "l"), (2, 0, -1, "l"))
_COUNTING_CLASSICAL = ((0, 1, +1, "u"), (1, 0, -1, "u"))

# Singular-value thresholds for the null-space solve, relative to the
# largest singular value.
_NULL_TOL = 1e-8
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class EngineParams:
    """The six physical parameters of the engine.

    gamma_u, gamma_l are the bath coupling rates, n_u, n_l the bath
    occupations, epsilon the drive strength and delta the detuning.
    All quantities are in the same (arbitrary) rate unit.
    """

    gamma_u: float
    gamma_l: float
    n_u: float
    n_l: float
    epsilon: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("gamma_u", "gamma_l", "n_u", "n_l", "epsilon", "delta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.gamma_u <= 0 or self.gamma_l <= 0:
            raise DomainError("bath rates gamma_u, gamma_l must be > 0")
        if self.n_u < 0 or self.n_l < 0:
            raise DomainError("bath occupations n_u, n_l must be >= 0")
        if self.epsilon < 0:
            raise DomainError("drive strength epsilon must be >= 0")

    @property
    def decoherence_rate(self) -> float:
        """Linewidth of the lasing transition, (gamma_u n_u + gamma_l n_l)/2."""
        return 0.5 * (self.gamma_u * self.n_u + self.gamma_l * self.n_l)

    @property
    def classical_rate(self) -> float:
        """Golden-rule rate replacing the coherent drive in the classical twin."""
        return derived_rates(self)[1]

    def rescaled(self, factor: float) -> "EngineParams":
        """Uniformly rescale all rates (gamma_u, gamma_l, epsilon, delta)."""
        return replace(
            self,
            gamma_u=factor * self.gamma_u,
            gamma_l=factor * self.gamma_l,
            epsilon=factor * self.epsilon,
            delta=factor * self.delta,
        )


def derived_rates(params: EngineParams) -> tuple[float, float]:
    """Return (decoherence rate, classical rate).

    The classical rate 2 eps^2 Gamma / (delta^2 + Gamma^2) is undefined
    when the drive is on but both the linewidth and the detuning vanish.
    """
    gamma_big = params.decoherence_rate
    if params.epsilon == 0.0:
        return gamma_big, 0.0
    denom = params.delta * params.delta + gamma_big * gamma_big
    if denom == 0.0:
        raise DomainError(
            "classical rate undefined: epsilon > 0 with zero linewidth and zero detuning"
        )
    gamma_c = 2.0 * params.epsilon * params.epsilon * gamma_big / denom
    return gamma_big, gamma_c


@dataclass(frozen=True)
class SteadyState:
    """Steady-state populations and lasing coherence (real/imaginary parts)."""

    rho_xx: float
    rho_uu: float
    rho_ll: float
    rho_ul_re: float = 0.0
    rho_ul_im: float = 0.0

    @property
    def rho_ul(self) -> complex:
        return complex(self.rho_ul_re, self.rho_ul_im)

    def as_vector(self) -> np.ndarray:
        """The state in the real 5-basis."""
        return np.array(
            [self.rho_xx, self.rho_uu, self.rho_ll, self.rho_ul_re, self.rho_ul_im]
        )

    def validate(self, tol: float = 1e-12) -> None:
        pops = (self.rho_xx, self.rho_uu, self.rho_ll)
        if abs(sum(pops) - 1.0) > tol:
            raise NumericalError(f"populations do not sum to 1: {pops}")
        if any(p < -tol or p > 1.0 + tol for p in pops):
            raise NumericalError(f"population outside [0, 1]: {pops}")
        coh2 = self.rho_ul_re**2 + self.rho_ul_im**2
        if coh2 > self.rho_uu * self.rho_ll + tol:
            raise NumericalError("coherence violates positivity of the lasing block")


@dataclass(frozen=True)
class GeneratorMatrix:
    """Dense generator with the counting fields it was built at."""

    entries: np.ndarray
    chi_u: float = 0.0
    chi_l: float = 0.0

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _quantum_base(params: EngineParams) -> np.ndarray:
    """Real 5x5 generator at zero counting fields.

    Population columns sum to zero exactly in floating point because the
    diagonal reuses the same products as the off-diagonal entries.
    """
    gu, gl = params.gamma_u, params.gamma_l
    nu, nl = params.n_u, params.n_l
    eps, dlt = params.epsilon, params.delta
    up_u = gu * nu            # u -> x absorption
    up_l = gl * nl            # l -> x absorption
    down_u = gu * (nu + 1.0)  # x -> u emission
    down_l = gl * (nl + 1.0)  # x -> l emission
    gamma_big = 0.5 * (up_u + up_l)
    L = np.zeros((5, 5))
    L[0, 0] = -(down_u + down_l)
    L[0, 1] = up_u
    L[0, 2] = up_l
    L[1, 0] = down_u
    L[1, 1] = -up_u
    L[1, 4] = -2.0 * eps
    L[2, 0] = down_l
    L[2, 2] = -up_l
    L[2, 4] = 2.0 * eps
    L[3, 3] = -gamma_big
    L[3, 4] = -dlt
    L[4, 1] = eps
    L[4, 2] = -eps
    L[4, 3] = dlt
    L[4, 4] = -gamma_big
    return L


def _classical_base(params: EngineParams) -> np.ndarray:
    """Real 3x3 rate-equation generator at zero counting field."""
    _, gamma_c = derived_rates(params)
    gu, gl = params.gamma_u, params.gamma_l
    up_u = gu * params.n_u
    up_l = gl * params.n_l
    down_u = gu * (params.n_u + 1.0)
    down_l = gl * (params.n_l + 1.0)
    L = np.zeros((3, 3))
    L[0, 0] = -(down_u + down_l)
    L[0, 1] = up_u
    L[0, 2] = up_l
    L[1, 0] = down_u
    L[1, 1] = -(gamma_c + up_u)
    L[1, 2] = gamma_c
    L[2, 0] = down_l
    L[2, 1] = gamma_c
    L[2, 2] = -(gamma_c + up_l)
    return L


def _apply_counting(base: np.ndarray, counting, chi_u: float, chi_l: float) -> np.ndarray:
    out = base.astype(complex)
    for row, col, sign, field in counting:
        chi = chi_u if field == "u" else chi_l
        if chi != 0.0:
            out[row, col] *= np.exp(1j * sign * chi)
    return out


def build_quantum_generator(
    params: EngineParams, chi_u: float = 0.0, chi_l: float = 0.0
) -> GeneratorMatrix:
    """Counting-field generator in the real 5-basis.

    At chi_u = chi_l = 0 this is the plain time-evolution generator; the
    covector (1, 1, 1, 0, 0) is then an exact left null vector.
    """
    entries = _apply_counting(_quantum_base(params), _COUNTING_QUANTUM, chi_u, chi_l)
    return GeneratorMatrix(entries=entries, chi_u=chi_u, chi_l=chi_l)


def build_classical_generator(params: EngineParams, chi_u: float = 0.0) -> GeneratorMatrix:
    """Counting-field generator of the classical reference (3-basis).

    Only the u-bath jumps carry a counting phase; the drive is replaced by
    the golden-rule rate coupling the lasing populations directly.
    """
    entries = _apply_counting(_classical_base(params), _COUNTING_CLASSICAL, chi_u, 0.0)
    return GeneratorMatrix(entries=entries, chi_u=chi_u, chi_l=0.0)


def steady_state_closed_form(params: EngineParams) -> SteadyState:
    """Steady state from the closed-form expressions.

    Populations are shared with the classical twin (both depend on the
    drive only through the classical rate); the coherence is
    (-delta + i Gamma) eps (n_l - n_u) / ((delta^2 + Gamma^2) A + eps^2 B).
    """
    gamma_big, gamma_c = derived_rates(params)
    gu, gl = params.gamma_u, params.gamma_l
    nu, nl = params.n_u, params.n_l
    denom = (gl * (2.0 * nl + 1.0) + gamma_c) * (gu * (2.0 * nu + 1.0) + gamma_c) - (
        gl * (nl + 1.0) - gamma_c
    ) * (gu * (nu + 1.0) - gamma_c)
    if denom == 0.0:
        raise DomainError(
            "steady state not unique: both baths empty and no effective drive"
        )
    shared = gamma_c * (gl * (nl + 1.0) + gu * (nu + 1.0))
    rho_ll = (gl * gu * nu * (nl + 1.0) + shared) / denom
    rho_uu = (gl * gu * nl * (nu + 1.0) + shared) / denom
    rho_xx = 1.0 - rho_uu - rho_ll
    ssq = params.delta * params.delta + gamma_big * gamma_big
    a_pop = 3.0 * nl * nu + nl + nu
    b_rate = 2.0 * gamma_big * ((3.0 * nl + 2.0) / gu + (3.0 * nu + 2.0) / gl)
    coh_denom = ssq * a_pop + params.epsilon * params.epsilon * b_rate
    if coh_denom == 0.0:
        rho_ul = 0.0j
    else:
        rho_ul = (
            complex(-params.delta, gamma_big) * params.epsilon * (nl - nu) / coh_denom
        )
    return SteadyState(
        rho_xx=rho_xx,
        rho_uu=rho_uu,
        rho_ll=rho_ll,
        rho_ul_re=rho_ul.real,
        rho_ul_im=rho_ul.imag,
    )


def steady_state_numeric(generator: GeneratorMatrix) -> SteadyState:
    """Steady state as the null vector of the zero-field generator.

    Serves as the independent cross-check of the closed forms. The null
    direction is located by SVD and then polished by solving the bordered
    system (trace row in place of the redundant first row) in extended
    precision, which keeps the 1e-10 closed-form agreement even for badly
    scaled rate combinations.
    """
    if generator.chi_u != 0.0 or generator.chi_l != 0.0:
        raise DomainError("steady state requires zero counting fields")
    entries = generator.entries
    if np.abs(entries.imag).max() != 0.0:
        raise DomainError("generator has complex entries at zero counting field")
    matrix = entries.real
    n = matrix.shape[0]
    singulars = np.linalg.svd(matrix, compute_uv=False)
    scale = singulars[0]
    if scale == 0.0 or singulars[-1] > _NULL_TOL * scale:
        raise NumericalError("generator has no null direction")
    if singulars[-2] <= _DEGENERACY_TOL * scale:
        raise NumericalError("null space dimension != 1: steady state not unique")
    with mp.workdps(30):
        bordered = mp.matrix(n, n)
        for i in range(n):
            for j in range(n):
                bordered[i, j] = mp.mpf(matrix[i, j])
        for j in range(n):
            bordered[0, j] = mp.mpf(1.0) if j < 3 else mp.mpf(0.0)
        rhs = mp.matrix(n, 1)
        rhs[0, 0] = mp.mpf(1.0)
        solution = mp.lu_solve(bordered, rhs)
        vec = np.array([float(solution[i, 0]) for i in range(n)])
    if n == 3:
        return SteadyState(rho_xx=vec[0], rho_uu=vec[1], rho_ll=vec[2])
    return SteadyState(
        rho_xx=vec[0], rho_uu=vec[1], rho_ll=vec[2], rho_ul_re=vec[3], rho_ul_im=vec[4]
    )


def coherence_ridge(params: EngineParams, delta: float) -> tuple[float, float]:
    """Drive strength and height of the coherence maximum at fixed detuning.

    |rho_ul| peaks on the curve eps^2 = (delta^2 + Gamma^2) A / B with the
    detuning-independent value (n_l - n_u) / (2 sqrt(A B)).
    """
    if params.n_l == params.n_u:
        raise DomainError("coherence ridge undefined for n_l = n_u")
    gamma_big = params.decoherence_rate
    nu, nl = params.n_u, params.n_l
    a_pop = 3.0 * nl * nu + nl + nu
    b_rate = 2.0 * gamma_big * (
        (3.0 * nl + 2.0) / params.gamma_u + (3.0 * nu + 2.0) / params.gamma_l
    )
    ssq = delta * delta + gamma_big * gamma_big
    eps_peak = math.sqrt(ssq * a_pop / b_rate)
    peak = (nl - nu) / (2.0 * math.sqrt(a_pop * b_rate))
    return eps_peak, peak

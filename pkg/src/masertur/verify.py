"""Release checks: closed forms against oracles, inequalities, invariants.

Each check reports its worst-case residual against a pinned tolerance.
The suite is deterministic: parameter draws come from the same
counter-based stream as the Monte Carlo sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .bound import full_liouvillian, quantum_bound
from .counting import (
    charpoly_coeffs_classical,
    charpoly_coeffs_numeric,
    charpoly_coeffs_quantum,
    cumulants_via_eigenvalue,
    fano,
    mean_rate,
    variance_rate,
)
from .errors import DomainError, NumericalError
from .explorer import MC_EXCLUSION, STANDARD_RANGES
from .model import (
    build_quantum_generator,
    coherence_ridge,
    EngineParams,
    steady_state_closed_form,
    steady_state_numeric,
)
from .uncertainty import thermodynamic_uncertainty

FIG2_POINT = EngineParams(
    gamma_u=2.0, gamma_l=0.1, n_u=0.027, n_l=5.0, epsilon=0.15, delta=0.0
)

_TINY = 1e-300


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    n: int
    detail: str = ""


def draw_parameter_arrays(seed: int, count: int, offset: int = 0):
    """Arrays of valid parameter draws from the standard region."""
    streams = kernels.uniform_streams(seed, offset, count, len(kernels.PARAM_ORDER))
    columns = [lo + streams[k] * (hi - lo) for k, (lo, hi) in enumerate(STANDARD_RANGES)]
    gu, gl, nu, nl, eps, dlt = columns
    valid = np.abs(nl - nu) >= MC_EXCLUSION
    return tuple(c[valid] for c in columns)


def draw_parameter_points(seed: int, count: int) -> list[EngineParams]:
    """At least `count` valid EngineParams draws."""
    points: list[EngineParams] = []
    offset = 0
    while len(points) < count:
        block = count - len(points) + 8
        arrays = draw_parameter_arrays(seed, block, offset)
        offset += block
        points.extend(EngineParams(*vals) for vals in zip(*arrays))
    return points[:count]


def _rel(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(value), abs(reference), _TINY)


def check_steady_state_cross(seed: int, n: int = 300) -> CheckResult:
    """Closed-form steady state against the null-space solve."""
    tol = 1e-10
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        closed = steady_state_closed_form(params).as_vector()
        numeric = steady_state_numeric(build_quantum_generator(params)).as_vector()
        worst = max(worst, float(np.abs(closed - numeric).max()))
    return CheckResult("steady_state_cross_check", worst <= tol, worst, tol, n + 1)


def check_fixed_point(seed: int, n: int = 300) -> CheckResult:
    """Coherence satisfies rho_ul = -eps (rho_uu - rho_ll) / (delta + i Gamma)."""
    tol = 1e-12
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        ss = steady_state_closed_form(params)
        gamma_big = params.decoherence_rate
        if gamma_big == 0.0 and params.delta == 0.0:
            continue
        expected = -params.epsilon * (ss.rho_uu - ss.rho_ll) / complex(
            params.delta, gamma_big
        )
        worst = max(worst, abs(ss.rho_ul - expected))
    return CheckResult("steady_state_fixed_point", worst <= tol, worst, tol, n + 1)


def check_ridge_constancy() -> CheckResult:
    """|rho_ul| along the ridge is detuning-independent and hits the peak formula."""
    tol = 1e-12
    worst = 0.0
    values = []
    for delta in np.linspace(0.0, 1.0, 21):
        eps_peak, peak = coherence_ridge(FIG2_POINT, float(delta))
        at_peak = steady_state_closed_form(
            replace(FIG2_POINT, epsilon=eps_peak, delta=float(delta))
        )
        value = abs(at_peak.rho_ul)
        values.append(value)
        worst = max(worst, abs(value - peak))
    worst = max(worst, max(values) - min(values))
    return CheckResult("ridge_constancy", worst <= tol, worst, tol, 21)


def check_mean_coherence_identity(seed: int, n: int = 500) -> CheckResult:
    """Mean rate equals 2 eps Im rho_ul."""
    tol = 1e-12
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        mean = mean_rate(charpoly_coeffs_quantum(params))
        ss = steady_state_closed_form(params)
        worst = max(worst, _rel(mean, 2.0 * params.epsilon * ss.rho_ul_im))
    return CheckResult("mean_coherence_identity", worst <= tol, worst, tol, n + 1)


def check_mean_equality(seed: int, n: int) -> CheckResult:
    """Quantum and classical mean rates coincide."""
    tol = 1e-12
    gu, gl, nu, nl, eps, dlt = draw_parameter_arrays(seed, n)
    mean_q, mean_cl, *_ = kernels.batch_uncertainty(gu, gl, nu, nl, eps, dlt)
    rel = np.abs(mean_q - mean_cl) / np.maximum(
        np.maximum(np.abs(mean_q), np.abs(mean_cl)), _TINY
    )
    worst = float(rel.max()) if len(rel) else 0.0
    return CheckResult("mean_equality", worst <= tol, worst, tol, len(rel))


def _coefficient_residual(params: EngineParams, model: str) -> float:
    printed = (
        charpoly_coeffs_quantum(params)
        if model == "quantum"
        else charpoly_coeffs_classical(params)
    )
    numeric = charpoly_coeffs_numeric(params, model)
    dim = 5 if model == "quantum" else 3
    scale = (1.0 + float(np.abs(build_quantum_generator(params).entries).max())) ** dim
    worst = 0.0
    for name in ("a0_p", "a0_pp", "a1", "a1_p", "a2"):
        p, q = getattr(printed, name), getattr(numeric, name)
        magnitude = max(abs(p), abs(q))
        if magnitude <= 1e-20 * scale:  # both zero up to derivative noise
            continue
        worst = max(worst, abs(p - q) / magnitude)
    return worst


def check_charpoly_transcription(seed: int, n: int = 20) -> CheckResult:
    """Printed coefficient formulas against the expanded characteristic polynomial."""
    tol = 1e-9
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        for model in ("quantum", "classical"):
            worst = max(worst, _coefficient_residual(params, model))
    return CheckResult("charpoly_transcription", worst <= tol, worst, tol, 2 * (n + 1))


def check_cumulant_oracle(seed: int, n: int, tolerance: float) -> CheckResult:
    """Closed-form mean/variance against the dominant-eigenvalue oracle."""
    worst = 0.0
    evaluated = 0
    for params in draw_parameter_points(seed, n):
        for model in ("quantum", "classical"):
            coeffs = (
                charpoly_coeffs_quantum(params)
                if model == "quantum"
                else charpoly_coeffs_classical(params)
            )
            mean = mean_rate(coeffs)
            variance = variance_rate(coeffs, mean)
            oracle_mean, oracle_var = cumulants_via_eigenvalue(params, model)
            worst = max(worst, _rel(mean, oracle_mean), _rel(variance, oracle_var))
            evaluated += 1
    return CheckResult("cumulant_oracle", worst <= tolerance, worst, tolerance, evaluated)


def check_fano_reconciliation(seed: int, n: int = 500) -> CheckResult:
    """Fano-route F * mean equals the coefficient-route variance."""
    tol = 1e-10
    worst = 0.0
    count = 0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        for model in ("quantum", "classical"):
            cum = fano(params, model)
            worst = max(worst, _rel(cum.fano * cum.mean, cum.variance))
            count += 1
    return CheckResult("fano_variance_reconciliation", worst <= tol, worst, tol, count)


def check_q_reconciliation(seed: int, n: int = 500) -> CheckResult:
    """Q assembled from the Fano factor equals sigma var / mean^2."""
    tol = 1e-10
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        report = thermodynamic_uncertainty(params, "quantum")
        raw = report.sigma * report.variance_rate / report.mean_rate**2
        worst = max(worst, _rel(report.q, raw))
    return CheckResult("q_reconciliation", worst <= tol, worst, tol, n + 1)


def check_population_bounds(seed: int, n: int) -> CheckResult:
    """q_pop >= 2, 2 <= q_cl <= q_pop on the standard region."""
    gu, gl, nu, nl, eps, dlt = draw_parameter_arrays(seed, n)
    _, _, _, q_cl, q_pop, _ = kernels.batch_uncertainty(gu, gl, nu, nl, eps, dlt)
    bad = (
        int((q_pop < 2.0 - 1e-12).sum())
        + int((q_cl < 2.0 - 1e-9).sum())
        + int((q_cl > q_pop + 1e-10).sum())
    )
    worst = float(max(2.0 - q_pop.min(), 2.0 - q_cl.min(), (q_cl - q_pop).max()))
    return CheckResult(
        "population_bounds",
        bad == 0,
        worst,
        1e-9,
        len(q_pop),
        detail=f"violations={bad}",
    )


def check_sign_law(seed: int, n: int) -> CheckResult:
    """sign(Q - Q_cl) follows sign(delta^2 - Gamma^2) with no exceptions."""
    gu, gl, nu, nl, eps, dlt = draw_parameter_arrays(seed, n)
    _, mean_cl, _, _, _, advantage = kernels.batch_uncertainty(gu, gl, nu, nl, eps, dlt)
    gamma_big = 0.5 * (gu * nu + gl * nl)
    rhs = dlt * dlt - gamma_big * gamma_big
    applicable = (rhs != 0.0) & (mean_cl != 0.0)
    exceptions = int((np.sign(advantage[applicable]) != np.sign(rhs[applicable])).sum())
    return CheckResult(
        "advantage_sign_law",
        exceptions == 0,
        float(exceptions),
        0.0,
        int(applicable.sum()),
    )


def check_bound_adherence(seed: int, n: int = 300) -> CheckResult:
    """Q stays above the quantum bound B."""
    tol = 1e-8
    worst = math.inf
    count = 0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        try:
            report = thermodynamic_uncertainty(params, "quantum")
            components = quantum_bound(params)
        except (DomainError, NumericalError):
            continue
        worst = min(worst, report.q - components.bound)
        count += 1
    return CheckResult("bound_adherence", worst >= -tol, worst, tol, count)


def check_pseudoinverse_identities(seed: int, n: int = 40) -> CheckResult:
    """Moore-Penrose identities of the Liouvillian pseudoinverse."""
    tol = 1e-10
    worst = 0.0
    for params in draw_parameter_points(seed, n):
        liou = full_liouvillian(params)
        pinv = np.linalg.pinv(liou, rcond=1e-12)
        norm_l = np.linalg.norm(liou)
        norm_p = np.linalg.norm(pinv)
        lp = liou @ pinv
        pl = pinv @ liou
        worst = max(
            worst,
            np.linalg.norm(liou @ pl - liou) / norm_l,
            np.linalg.norm(pinv @ lp - pinv) / norm_p,
            np.linalg.norm(lp.conj().T - lp) / max(np.linalg.norm(lp), _TINY),
            np.linalg.norm(pl.conj().T - pl) / max(np.linalg.norm(pl), _TINY),
        )
    return CheckResult("pseudoinverse_identities", worst <= tol, float(worst), tol, n)


def check_bound_scale_invariance(seed: int, n: int = 50) -> CheckResult:
    """B is invariant under uniform rescaling of all rates."""
    tol = 1e-10
    worst = 0.0
    for params in [FIG2_POINT] + draw_parameter_points(seed, n):
        reference = quantum_bound(params).bound
        for factor in (0.5, 2.0):
            scaled = quantum_bound(params.rescaled(factor)).bound
            worst = max(worst, _rel(scaled, reference))
    return CheckResult("bound_scale_invariance", worst <= tol, worst, tol, 2 * (n + 1))


def run_all(
    seed: int = 0,
    samples: int = 100_000,
    oracle_points: int = 100,
    oracle_tolerance: float = 1e-6,
) -> list[CheckResult]:
    """Run the full suite; order groups fast structural checks first."""
    return [
        check_steady_state_cross(seed),
        check_fixed_point(seed),
        check_ridge_constancy(),
        check_mean_coherence_identity(seed),
        check_mean_equality(seed, samples),
        check_charpoly_transcription(seed),
        check_cumulant_oracle(seed, oracle_points, oracle_tolerance),
        check_fano_reconciliation(seed),
        check_q_reconciliation(seed),
        check_population_bounds(seed, samples),
        check_sign_law(seed, samples),
        check_bound_adherence(seed),
        check_pseudoinverse_identities(seed),
        check_bound_scale_invariance(seed),
    ]

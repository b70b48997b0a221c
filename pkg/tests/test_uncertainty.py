import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest

from masertur import (
    charpoly_coeffs_classical,
    charpoly_coeffs_quantum,
    DomainError,
    EngineParams,
    entropy_production,
    mean_rate,
    q_pop,
    quantum_advantage,
    quantum_bound,
    thermodynamic_uncertainty,
)

from conftest import random_params


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestEntropyProduction:
    def test_positive_for_forward_engine(self, fig2):
        mean = mean_rate(charpoly_coeffs_quantum(fig2))
        assert entropy_production(fig2, mean) > 0.0

    def test_positive_for_reversed_engine(self, fig2):
        # hotter upper bath: log factor and mean flip sign together
        params = replace(fig2, n_u=5.0, n_l=0.027)
        mean = mean_rate(charpoly_coeffs_quantum(params))
        assert mean < 0.0
        assert entropy_production(params, mean) > 0.0

    def test_value_against_direct_log(self, fig2):
        mean = mean_rate(charpoly_coeffs_quantum(fig2))
        direct = math.log(
            fig2.n_l * (fig2.n_u + 1.0) / (fig2.n_u * (fig2.n_l + 1.0))
        ) * mean
        assert _rel(entropy_production(fig2, mean), direct) < 1e-13

    def test_vanishes_continuously_at_equilibrium(self, fig2):
        values = []
        for gap in (1e-2, 1e-4, 1e-6):
            params = replace(fig2, n_u=1.0, n_l=1.0 + gap)
            mean = mean_rate(charpoly_coeffs_quantum(params))
            values.append(entropy_production(params, mean))
        assert values[0] > values[1] > values[2] > 0.0

    def test_empty_bath_rejected(self, fig2):
        with pytest.raises(DomainError):
            entropy_production(replace(fig2, n_u=0.0), 0.1)

    def test_reconciles_with_bound_pieces(self, fig2):
        # sigma recovered from B * (Upsilon + Psi)
        report = thermodynamic_uncertainty(fig2)
        components = quantum_bound(fig2)
        recovered = components.bound * (components.upsilon + components.psi)
        assert _rel(report.sigma, recovered) < 1e-12


class TestUncertaintyReport:
    def test_operating_point_violates_classical_limit(self, fig2):
        report = thermodynamic_uncertainty(fig2)
        assert report.q < 2.0 <= report.q_classical
        # pinned from the cross-validated pipeline (closed forms vs the
        # eigenvalue oracle agree to 14 digits here)
        assert report.q == pytest.approx(1.6781121628241271, rel=1e-12)

    def test_split_is_exact(self, rng):
        for _ in range(100):
            report = thermodynamic_uncertainty(random_params(rng))
            assert report.q == report.q_pop + report.q_tr

    def test_sweep_minimum_regression(self, fig2):
        # 200-point logarithmic drive sweep; minimum sits near eps ~ 0.168
        grid = np.geomspace(0.01, 1.0, 200)
        values = [
            thermodynamic_uncertainty(replace(fig2, epsilon=float(e))).q for e in grid
        ]
        assert min(values) == pytest.approx(1.6516312353726075, rel=1e-10)

    def test_classical_stays_above_two_on_sweep(self, fig2):
        for eps in np.geomspace(0.01, 1.0, 100):
            report = thermodynamic_uncertainty(replace(fig2, epsilon=float(eps)))
            assert report.q_classical >= 2.0

    def test_classical_captures_weak_and_strong_driving(self, fig2):
        for eps in (1e-3, 10.0):
            report = thermodynamic_uncertainty(replace(fig2, epsilon=eps))
            assert abs(report.q - report.q_classical) < 0.01

    def test_raw_definition_identity(self, rng, fig2):
        # Q equals sigma * var / mean^2 assembled from raw pieces
        for params in [fig2] + [random_params(rng) for _ in range(200)]:
            report = thermodynamic_uncertainty(params)
            raw = report.sigma * report.variance_rate / report.mean_rate**2
            assert _rel(report.q, raw) < 1e-10

    def test_classical_model_report(self, fig2):
        report = thermodynamic_uncertainty(fig2, "classical")
        assert report.q == report.q_classical
        assert report.advantage == 0.0
        assert report.q >= 2.0

    def test_guards(self, fig2):
        with pytest.raises(DomainError):
            thermodynamic_uncertainty(replace(fig2, epsilon=0.0))
        with pytest.raises(DomainError):
            thermodynamic_uncertainty(replace(fig2, n_u=5.0, n_l=5.0 + 1e-12))
        with pytest.raises(DomainError):
            thermodynamic_uncertainty(replace(fig2, n_u=0.0))


class TestQuantumAdvantage:
    def test_zero_at_matched_detuning(self, fig2):
        gamma_big = fig2.decoherence_rate
        assert quantum_advantage(replace(fig2, delta=gamma_big)) == 0.0

    def test_negative_on_resonance(self, fig2):
        assert quantum_advantage(fig2) < 0.0

    def test_positive_beyond_linewidth(self, fig2):
        params = replace(fig2, delta=2.0 * fig2.decoherence_rate)
        advantage = quantum_advantage(params)
        assert advantage > 0.0
        # independent evaluation through the coefficient route
        cq = charpoly_coeffs_quantum(params)
        cc = charpoly_coeffs_classical(params)
        c_quantum = cq.a2 / cq.a1 - 1.0 / params.decoherence_rate
        c_classical = cc.a2 / cc.a1
        mean = mean_rate(cq)
        ln_ratio = math.log1p(
            (params.n_l - params.n_u) / (params.n_u * (params.n_l + 1.0))
        )
        assert _rel(advantage, 2.0 * mean * ln_ratio * (c_classical - c_quantum)) < 1e-12

    def test_matches_report_difference(self, rng):
        for _ in range(200):
            params = random_params(rng)
            report = thermodynamic_uncertainty(params)
            assert abs((report.q - report.q_classical) - report.advantage) <= 1e-11 * max(
                1.0, abs(report.q)
            )

    def test_sign_law(self, rng):
        for _ in range(500):
            params = random_params(rng)
            gamma_big = params.decoherence_rate
            rhs = params.delta**2 - gamma_big**2
            if rhs == 0.0:
                continue
            assert np.sign(quantum_advantage(params)) == np.sign(rhs)


class TestPopulationPart:
    def test_equilibrium_limit_is_two(self, fig2):
        params = replace(fig2, n_u=1.0, n_l=1.0 * (1.0 + 1e-6))
        value = q_pop(params)
        assert 2.0 <= value < 2.0 + 1e-10

    def test_value_against_high_precision(self):
        params = EngineParams(gamma_u=2.0, gamma_l=0.1, n_u=0.027, n_l=5.0, epsilon=0.15)
        value = q_pop(params)
        assert value > 2.0
        with mp.workdps(60):
            nl, nu = mp.mpf(5.0), mp.mpf(0.027)
            exact = mp.log(nl * (nu + 1) / (nu * (nl + 1))) * (
                (nl * (nu + 1) + nu * (nl + 1)) / (nl - nu)
            )
        assert _rel(value, float(exact)) < 1e-14

    def test_symmetric_under_occupation_swap(self, rng):
        for _ in range(100):
            params = random_params(rng)
            swapped = replace(params, n_u=params.n_l, n_l=params.n_u)
            assert _rel(q_pop(params), q_pop(swapped)) < 1e-12

    def test_always_at_least_two(self, rng):
        for _ in range(500):
            assert q_pop(random_params(rng)) >= 2.0 - 1e-12

    def test_classical_transport_never_positive(self, rng):
        for _ in range(500):
            report = thermodynamic_uncertainty(random_params(rng), "classical")
            assert report.q_tr <= 0.0
            assert report.q <= report.q_pop

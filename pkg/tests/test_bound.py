from dataclasses import replace

import numpy as np
import pytest

from masertur import (
    build_quantum_generator,
    coherent_contribution,
    dynamical_activity,
    EngineParams,
    full_basis_steady_state,
    full_liouvillian,
    k_supermatrices,
    mean_rate,
    NumericalError,
    projected_pseudoinverse,
    quantum_bound,
    steady_state_closed_form,
    thermodynamic_uncertainty,
)
from masertur.bound import complete_to_real, real_to_complete
from masertur.counting import charpoly_coeffs_quantum

from conftest import random_params


def _ket_bra(i, j):
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


def _operator_level_k_matrices(params):
    """Independent construction from the Hamiltonian and weighted jumps.

    Levels ordered (x, u, l); the retained subspace is spanned by the three
    populations and the lasing coherences, which the dynamics never leaves.
    """
    H = -params.delta * _ket_bra(1, 1) + params.epsilon * (
        _ket_bra(1, 2) + _ket_bra(2, 1)
    )
    jumps = [
        (_ket_bra(1, 0), params.gamma_u * (params.n_u + 1.0)),
        (_ket_bra(0, 1), params.gamma_u * params.n_u),
        (_ket_bra(2, 0), params.gamma_l * (params.n_l + 1.0)),
        (_ket_bra(0, 2), params.gamma_l * params.n_l),
    ]

    def k1_map(rho):
        out = -1j * (H @ rho)
        for L, rate in jumps:
            out = out + 0.5 * rate * (L @ rho @ L.conj().T - L.conj().T @ L @ rho)
        return out

    def k2_map(rho):
        out = 1j * (rho @ H)
        for L, rate in jumps:
            out = out + 0.5 * rate * (L @ rho @ L.conj().T - rho @ L.conj().T @ L)
        return out

    basis = [(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)]

    def to_supermatrix(apply_map):
        matrix = np.zeros((5, 5), dtype=complex)
        for col, (i, j) in enumerate(basis):
            image = apply_map(_ket_bra(i, j))
            for row, (a, b) in enumerate(basis):
                matrix[row, col] = image[a, b]
                image[a, b] = 0.0
            assert np.abs(image).max() < 1e-15  # stays in the retained subspace
        return matrix

    return to_supermatrix(k1_map), to_supermatrix(k2_map)


class TestKSupermatrices:
    def test_printed_entry(self, fig2):
        k1, _ = k_supermatrices(fig2)
        expected = 1j * fig2.delta - 0.5 * fig2.gamma_u * fig2.n_u
        assert k1[1, 1] == expected

    def test_matches_operator_level_construction(self, rng, fig2):
        for params in [fig2] + [random_params(rng) for _ in range(25)]:
            k1, k2 = k_supermatrices(params)
            ref1, ref2 = _operator_level_k_matrices(params)
            assert np.abs(k1 - ref1).max() < 1e-14
            assert np.abs(k2 - ref2).max() < 1e-14

    def test_sum_annihilates_steady_state(self, rng, fig2):
        for params in [fig2] + [random_params(rng) for _ in range(50)]:
            ss_full = full_basis_steady_state(steady_state_closed_form(params))
            residue = full_liouvillian(params) @ ss_full
            assert np.abs(residue).max() < 1e-10

    def test_basis_change_consistency(self, rng, fig2):
        # conjugating the real-basis generator reproduces the complete-basis one
        to_complete = real_to_complete()
        to_real = complete_to_real()
        assert np.abs(to_complete @ to_real - np.eye(5)).max() < 1e-15
        for params in [fig2] + [random_params(rng) for _ in range(25)]:
            l_real = build_quantum_generator(params).entries
            conjugated = to_complete @ l_real @ to_real
            assert np.abs(conjugated - full_liouvillian(params)).max() < 1e-12


class TestProjectedPseudoinverse:
    def test_moore_penrose_identities(self, rng, fig2):
        for params in [fig2] + [random_params(rng) for _ in range(25)]:
            liou = full_liouvillian(params)
            pinv = np.linalg.pinv(liou, rcond=1e-12)
            lp, pl = liou @ pinv, pinv @ liou
            assert np.linalg.norm(liou @ pl - liou) < 1e-10 * np.linalg.norm(liou)
            assert np.linalg.norm(pinv @ lp - pinv) < 1e-10 * np.linalg.norm(pinv)
            assert np.linalg.norm(lp.conj().T - lp) < 1e-10
            assert np.linalg.norm(pl.conj().T - pl) < 1e-10

    def test_projector_idempotent(self, fig2):
        ss_full = full_basis_steady_state(steady_state_closed_form(fig2))
        projector = np.zeros((5, 5), dtype=complex)
        for col in range(3):
            projector[:, col] = ss_full
        complement = np.eye(5) - projector
        assert np.abs(complement @ complement - complement).max() < 1e-12
        # the printed projector is idempotent but deliberately not hermitian
        assert np.abs(projector - projector.conj().T).max() > 1e-3

    def test_kills_steady_state(self, rng, fig2):
        for params in [fig2] + [random_params(rng) for _ in range(25)]:
            ss_full = full_basis_steady_state(steady_state_closed_form(params))
            lp = projected_pseudoinverse(full_liouvillian(params), ss_full)
            assert np.abs(lp @ ss_full).max() < 1e-10

    def test_rejects_unnormalized_state(self, fig2):
        ss_full = 2.0 * full_basis_steady_state(steady_state_closed_form(fig2))
        with pytest.raises(NumericalError):
            projected_pseudoinverse(full_liouvillian(fig2), ss_full)

    def test_rejects_nonsingular_matrix(self, fig2):
        ss_full = full_basis_steady_state(steady_state_closed_form(fig2))
        shifted = full_liouvillian(fig2) - 0.5 * np.eye(5)
        with pytest.raises(NumericalError):
            projected_pseudoinverse(shifted, ss_full)


class TestCoherentContribution:
    def test_operating_point_regression(self, fig2):
        ss_full = full_basis_steady_state(steady_state_closed_form(fig2))
        psi = coherent_contribution(fig2, ss_full)
        assert psi == pytest.approx(0.3573091963340145, rel=1e-12)

    def test_undriven_resonant_baseline(self, fig2):
        # with the drive off and zero detuning the correction degenerates
        params = replace(fig2, epsilon=0.0, delta=0.0)
        ss_full = full_basis_steady_state(steady_state_closed_form(params))
        assert abs(coherent_contribution(params, ss_full)) < 1e-20

    def test_gauge_invariance(self, rng, fig2):
        # a relative phase between the lasing levels must not change Psi
        for params in [fig2] + [random_params(rng) for _ in range(10)]:
            ss_full = full_basis_steady_state(steady_state_closed_form(params))
            reference = coherent_contribution(params, ss_full)
            phase = np.exp(1j * 0.813)
            gauge = np.diag([1.0, 1.0, 1.0, phase, np.conj(phase)])
            gauge_inv = np.diag([1.0, 1.0, 1.0, np.conj(phase), phase])
            k1, k2 = k_supermatrices(params)
            k1g = gauge @ k1 @ gauge_inv
            k2g = gauge @ k2 @ gauge_inv
            ss_g = gauge @ ss_full
            lp = projected_pseudoinverse(k1g + k2g, ss_g)
            vec = k1g @ (lp @ (k2g @ ss_g)) + k2g @ (lp @ (k1g @ ss_g))
            psi_g = (-4.0 * (vec[0] + vec[1] + vec[2])).real
            assert abs(psi_g - reference) < 1e-10 * max(1.0, abs(reference))


class TestDynamicalActivity:
    def test_empty_baths_leave_decay_only(self):
        from masertur import SteadyState

        params = EngineParams(gamma_u=2.0, gamma_l=0.5, n_u=0.0, n_l=0.0, epsilon=0.3, delta=0.2)
        state = SteadyState(rho_xx=0.3, rho_uu=0.4, rho_ll=0.3)
        upsilon = dynamical_activity(params, state)
        assert upsilon == pytest.approx((params.gamma_u + params.gamma_l) * 0.3, rel=1e-14)
        drained = SteadyState(rho_xx=0.0, rho_uu=0.6, rho_ll=0.4)
        assert dynamical_activity(params, drained) == 0.0

    def test_operating_point_values(self, fig2):
        ss = steady_state_closed_form(fig2)
        upsilon = dynamical_activity(fig2, ss)
        assert upsilon == pytest.approx(0.3046219702834744, rel=1e-12)
        mean = mean_rate(charpoly_coeffs_quantum(fig2))
        assert upsilon >= abs(mean)

    def test_undriven_regression(self, fig2):
        params = replace(fig2, epsilon=0.0, delta=0.0)
        ss = steady_state_closed_form(params)
        assert dynamical_activity(params, ss) == pytest.approx(
            0.13191826215022157, rel=1e-12
        )


class TestQuantumBound:
    def test_components_identity(self, fig2):
        components = quantum_bound(fig2)
        assert components.h_prime == 1.0
        recomputed = components.bound * (components.upsilon + components.psi)
        report = thermodynamic_uncertainty(fig2)
        assert abs(recomputed - report.sigma) < 1e-12 * max(1.0, report.sigma)
        assert components.bound == pytest.approx(0.41382484028184735, rel=1e-12)

    def test_bound_below_q_on_drive_sweep(self, fig2):
        for eps in np.geomspace(0.01, 1.0, 50):
            params = replace(fig2, epsilon=float(eps))
            report = thermodynamic_uncertainty(params)
            components = quantum_bound(params)
            assert report.q >= components.bound - 1e-8
            if report.q < 2.0:  # violation region: the bound stays informative
                assert components.bound < 2.0

    def test_bound_below_q_random(self, rng):
        for _ in range(300):
            params = random_params(rng)
            report = thermodynamic_uncertainty(params)
            components = quantum_bound(params)
            assert report.q >= components.bound - 1e-8
            assert components.upsilon > 0.0
            assert components.upsilon + components.psi > 0.0

    def test_scale_invariance(self, rng, fig2):
        for params in [fig2] + [random_params(rng) for _ in range(30)]:
            reference = quantum_bound(params).bound
            for factor in (0.5, 2.0):
                scaled = quantum_bound(params.rescaled(factor)).bound
                assert abs(scaled - reference) < 1e-10 * max(1.0, reference)

    def test_bound_positive_for_forward_engine(self, fig2):
        assert quantum_bound(fig2).bound > 0.0

"""Information-matrix structure against dense linear-algebra oracles."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from orbitdesign import (
    MomentSet,
    OrbitDesign,
    OrbitDesignError,
    SingularDesignError,
    assemble_general,
    assemble_inverse,
    block_eigenvalues,
    brute_force_info,
    build_s_matrix,
    design_moments,
    inverse_coefficients,
    log_det_symmetric,
    model_dims,
    orbit_moment,
    regularity,
)

from conftest import random_symmetric_designs, symmetric_design

# Incidence of factors in the 15 interaction pairs for K=6, transposed
# (factors as rows), in lexicographic pair order.
S6_TRANSPOSED = [
    [1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0, 1],
    [0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1],
]

ZERO_MOMENTS = MomentSet(0, 0, 0, 0)


class TestModelDims:
    def test_parameter_count(self):
        for k_factors in range(2, 23):
            dims = model_dims(k_factors)
            assert dims.p == 1 + k_factors * (k_factors + 1) // 2
            assert dims.p == 1 + k_factors + dims.n_inter

    def test_too_small(self):
        with pytest.raises(OrbitDesignError):
            model_dims(1)


class TestSMatrix:
    def test_k6_display(self):
        assert build_s_matrix(6).T.tolist() == S6_TRANSPOSED

    def test_k2_single_row(self):
        assert build_s_matrix(2).tolist() == [[1, 1]]

    def test_row_and_column_sums(self):
        s = build_s_matrix(4)
        assert s.sum(axis=1).tolist() == [2] * 6
        assert s.sum(axis=0).tolist() == [3] * 4

    def test_gram_identity(self):
        for k_factors in range(2, 9):
            s = build_s_matrix(k_factors)
            expected = (k_factors - 2) * np.eye(k_factors) + np.ones(
                (k_factors, k_factors)
            )
            assert np.array_equal(s.T @ s, expected)


class TestAssembleGeneral:
    def test_zero_moments_give_identity(self):
        for k_factors in (2, 4, 6):
            info = assemble_general(k_factors, ZERO_MOMENTS)
            assert np.array_equal(info.dense, np.eye(info.dims.p))

    def test_single_orbit_against_enumeration(self):
        d = OrbitDesign(4, {1: Fraction(1)})
        m = design_moments(d)
        structured = assemble_general(4, m, exact=True)
        enumerated = brute_force_info(d, exact=True)
        assert (structured.dense == enumerated.dense).all()

    def test_symmetric_design_kills_coupling_block(self):
        d = symmetric_design(6, {1: Fraction(1, 2), 2: Fraction(1, 2)})
        info = assemble_general(6, design_moments(d), exact=True)
        coupling = info.dense[1:7, 7:]
        assert all(value == 0 for value in coupling.ravel())

    def test_matches_enumeration_on_random_designs(self):
        for k_factors in range(2, 9):
            for d in random_symmetric_designs(k_factors, 6, seed=k_factors):
                structured = assemble_general(k_factors, design_moments(d)).dense
                enumerated = brute_force_info(d).dense
                assert np.abs(structured - enumerated).max() <= 1e-12

    def test_asymmetric_design_against_enumeration(self):
        d = OrbitDesign(5, {1: Fraction(1, 4), 2: Fraction(3, 4)})
        structured = assemble_general(5, design_moments(d), exact=True)
        enumerated = brute_force_info(d, exact=True)
        assert (structured.dense == enumerated.dense).all()


class TestBlockEigenvalues:
    def test_identity_case(self):
        ev = block_eigenvalues(6, ZERO_MOMENTS)
        assert (ev.lambda_one, ev.lambda_S, ev.lambda_I) == (1, 1, 1)
        assert ev.mult_one + ev.mult_S + ev.mult_I == 15

    def test_single_symmetric_orbit_zeroes_lambda_one(self):
        d = OrbitDesign(6, {2: Fraction(1, 2)}, symmetric=True)
        ev = block_eigenvalues(6, design_moments(d))
        assert ev.lambda_one == 0

    def test_central_orbit_zeroes_lambda_s(self):
        d = OrbitDesign(6, {3: Fraction(1)}, symmetric=True)
        ev = block_eigenvalues(6, design_moments(d))
        assert ev.lambda_S == 0

    def test_rejects_asymmetric_moments(self):
        with pytest.raises(OrbitDesignError):
            block_eigenvalues(6, MomentSet(Fraction(1, 3), 0, 0, 0))

    def test_multiplicities_against_dense_eigenvalues(self):
        for k_factors in range(4, 9):
            for d in random_symmetric_designs(k_factors, 4, seed=100 + k_factors):
                m = design_moments(d)
                ev = block_eigenvalues(k_factors, m)
                info = assemble_general(k_factors, m)
                block = info.dense[k_factors + 1 :, k_factors + 1 :] - float(
                    m.m2
                ) ** 2 * np.ones((info.dims.n_inter, info.dims.n_inter))
                dense = np.sort(np.linalg.eigvalsh(block))
                structured = np.sort(
                    np.array(
                        [float(ev.lambda_one)] * ev.mult_one
                        + [float(ev.lambda_S)] * ev.mult_S
                        + [float(ev.lambda_I)] * ev.mult_I
                    )
                )
                assert np.abs(dense - structured).max() <= 1e-8


class TestLogDet:
    def test_identity_log_det_zero(self):
        assert log_det_symmetric(6, ZERO_MOMENTS) == 0.0

    def test_reference_efficiency_k6(self):
        d = OrbitDesign(
            6, {2: Fraction("0.3865"), 3: Fraction("0.2270")}, symmetric=True
        )
        ld = log_det_symmetric(6, design_moments(d))
        assert round(math.exp(ld / 22), 4) == 0.8854

    def test_against_dense_determinant(self):
        for k_factors in range(2, 11):
            for d in random_symmetric_designs(k_factors, 5, seed=200 + k_factors):
                m = design_moments(d)
                ld = log_det_symmetric(k_factors, m)
                dense = assemble_general(k_factors, m).dense
                if ld == -math.inf:
                    rank = np.linalg.matrix_rank(dense, tol=1e-8)
                    assert rank < model_dims(k_factors).p
                else:
                    sign, dense_ld = np.linalg.slogdet(dense)
                    assert sign > 0
                    assert abs(ld - dense_ld) <= 1e-10 * max(1.0, abs(dense_ld))

    def test_singular_design_gives_neg_inf(self):
        d = OrbitDesign(6, {3: Fraction(1)}, symmetric=True)
        assert log_det_symmetric(6, design_moments(d)) == -math.inf


class TestRegularity:
    def test_two_good_orbits(self):
        d = symmetric_design(6, {2: Fraction(1, 2), 3: Fraction(1, 2)})
        assert regularity(d).regular

    def test_outer_plus_center_fails(self):
        d = symmetric_design(6, {0: Fraction(1, 2), 3: Fraction(1, 2)})
        report = regularity(d)
        assert not report.regular
        assert "lambda_S" in report.failing

    def test_first_two_orbits_fail_lambda_i(self):
        d = symmetric_design(8, {0: Fraction(1, 2), 1: Fraction(1, 2)})
        report = regularity(d)
        assert not report.regular
        assert "lambda_I" in report.failing

    def test_small_k_needs_two_orbits_only(self):
        assert regularity(symmetric_design(3, {0: Fraction(1, 2), 1: Fraction(1, 2)})).regular
        assert not regularity(OrbitDesign(3, {1: Fraction(1, 2)}, symmetric=True)).regular

    def test_exhaustive_against_dense_rank(self):
        for k_factors in range(2, 11):
            n_sym = k_factors // 2 + 1
            p = model_dims(k_factors).p
            for size in range(1, min(3, n_sym) + 1):
                for subset in combinations(range(n_sym), size):
                    totals = {k: Fraction(1, size) for k in subset}
                    d = symmetric_design(k_factors, totals)
                    dense = brute_force_info(d).dense
                    dense_regular = np.linalg.matrix_rank(dense, tol=1e-8) == p
                    assert regularity(d).regular == dense_regular, (
                        k_factors,
                        subset,
                    )


class TestInverse:
    def test_identity_coefficients(self):
        coeffs = inverse_coefficients(6, ZERO_MOMENTS)
        assert (coeffs.c0, coeffs.c2) == (1, 0)
        assert (coeffs.delta_S, coeffs.delta_J) == (0, 0)
        assert (coeffs.m11_inv_diag, coeffs.m11_inv_offdiag) == (1, 0)

    def test_reconstruction_on_reference_designs(self):
        designs = [
            OrbitDesign(6, {2: 0.3865, 3: 0.2270}, symmetric=True),
            OrbitDesign(8, {2: 0.2282, 4: 1 - 2 * 0.2282}, symmetric=True),
        ]
        for d in designs:
            m = design_moments(d)
            dense = assemble_general(d.k_factors, m).dense
            inv = assemble_inverse(d.k_factors, m)
            p = model_dims(d.k_factors).p
            assert np.abs(dense @ inv - np.eye(p)).max() <= 1e-10

    def test_reconstruction_on_random_designs(self):
        for k_factors in range(2, 11):
            for d in random_symmetric_designs(k_factors, 4, seed=300 + k_factors):
                m = design_moments(d)
                if log_det_symmetric(k_factors, m) == -math.inf:
                    continue
                dense = assemble_general(k_factors, m).dense
                inv = assemble_inverse(k_factors, m)
                p = model_dims(k_factors).p
                assert np.abs(dense @ inv - np.eye(p)).max() <= 1e-10

    def test_singular_design_raises(self):
        d = OrbitDesign(6, {3: Fraction(1)}, symmetric=True)
        with pytest.raises(SingularDesignError):
            inverse_coefficients(6, design_moments(d))

    def test_exact_inverse_times_matrix_is_identity(self):
        # With exact moments the coefficient formulas are exact rationals.
        d = symmetric_design(6, {1: Fraction(1, 3), 2: Fraction(1, 3), 3: Fraction(1, 3)})
        m = design_moments(d)
        coeffs = inverse_coefficients(6, m)
        assert isinstance(coeffs.c2, Fraction)
        dense = assemble_general(6, m).dense
        inv = assemble_inverse(6, m)
        assert np.abs(dense @ inv - np.eye(22)).max() <= 1e-12

"""Rank-five symmetric two-qutrit family: construction, local frames,
range/kernel extraction, Schmidt ranks, serialization."""

import numpy as np
import pytest

from qutritdistill import states
from qutritdistill.linalg import partial_transpose
from qutritdistill.states import (
    CASES,
    CASE_INDEX,
    LocalOperator,
    OutOfRange,
    build_family,
    basis_ket,
    symmetric_basis,
    apply_local,
    range_kernel,
    schmidt_rank,
    coefficient_matrix,
    uniform_state_on_span,
    state_to_json,
    state_from_json,
)


# ---------------------------------------------------------------------- basis


def test_symmetric_basis_orthonormal():
    e = symmetric_basis()
    assert e.shape == (5, 9)
    np.testing.assert_allclose(e.conj() @ e.T, np.eye(5), atol=1e-14)


def test_symmetric_basis_swap_invariant():
    e = symmetric_basis()
    for k in range(5):
        np.testing.assert_allclose(states.SWAP @ e[k], e[k], atol=1e-14)


def test_case_index_is_a_permutation():
    assert sorted(CASE_INDEX[c] for c in CASES) == [0, 1, 2, 3, 4]


# --------------------------------------------------------------- build_family


def test_family_pure_at_one():
    st = build_family("v", 1.0)
    assert st.degenerate
    lam = np.sort(np.linalg.eigvalsh(st.rho))
    np.testing.assert_allclose(lam[-1], 1.0, atol=1e-12)
    assert np.sum(lam > 1e-12) == 1


def test_family_uniform_point_is_projector_fifth():
    # x = 1/5: all five weights equal, so rho is the symmetric projector / 5
    st = build_family("v", 0.2)
    e = symmetric_basis()
    proj = e.T @ e.conj()
    np.testing.assert_allclose(st.rho, proj / 5.0, atol=1e-12)
    # and the point is inside the PPT window of this branch
    g = partial_transpose(st.rho, 3, 3)
    assert np.min(np.linalg.eigvalsh(g)) >= -1e-12


def test_family_npt_point():
    g = partial_transpose(build_family("i", 0.5).rho, 3, 3)
    assert np.min(np.linalg.eigvalsh(g)) < -1e-6


def test_family_rejects_out_of_range():
    for bad in (-0.1, 1.0001, 2.0):
        with pytest.raises(OutOfRange):
            build_family("v", bad)
    with pytest.raises(Exception):
        build_family("nope", 0.3)


def test_family_degenerate_flag_at_zero():
    assert build_family("i", 0.0).degenerate
    assert not build_family("i", 0.3).degenerate


def test_family_invariants_over_grid():
    for case in CASES:
        for x in np.linspace(0.01, 0.99, 15):
            st = build_family(case, float(x))
            assert abs(np.trace(st.rho) - 1.0) <= 1e-12
            lam = np.linalg.eigvalsh(st.rho)
            assert lam[0] >= -1e-12
            assert np.sum(lam > 1e-10) == 5
            # support inside the symmetric subspace
            np.testing.assert_allclose(
                states.SWAP @ st.rho @ states.SWAP, st.rho, atol=1e-12
            )


def test_family_weight_placement():
    # the case label selects which basis vector carries weight x
    for case in CASES:
        st = build_family(case, 0.9)
        e = symmetric_basis()
        k = CASE_INDEX[case]
        val = float(np.real(e[k].conj() @ st.rho @ e[k]))
        assert abs(val - 0.9) <= 1e-12


# ---------------------------------------------------------------- apply_local


def test_apply_local_identity():
    st = build_family("iii", 0.4)
    out = apply_local(st, LocalOperator(np.eye(3), np.eye(3), unitary_flag=True))
    np.testing.assert_allclose(out, st.rho, atol=1e-14)


def test_apply_local_hadamard_maps_case_i_to_ii():
    k = states.hadamard_on_01()
    op = LocalOperator(k, k, unitary_flag=True)
    for x in (0.1, 0.3, 0.7):
        out = apply_local(build_family("i", x), op)
        np.testing.assert_allclose(out, build_family("ii", x).rho, atol=1e-12)


def test_apply_local_phase_mix_keeps_spectrum():
    k = states.phase_mix_on_01()
    op = LocalOperator(k, k.conj(), unitary_flag=True)
    st = build_family("v", 1 / 7)
    out = apply_local(st, op)
    assert np.linalg.norm(out - out.conj().T) <= 1e-12
    np.testing.assert_allclose(
        np.linalg.eigvalsh(out), np.linalg.eigvalsh(st.rho), atol=1e-12
    )


def test_local_unitary_spectrum_invariance():
    rng = np.random.default_rng(29)
    st = build_family("v", 0.35)
    for _ in range(20):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        out = apply_local(st, LocalOperator(q, q, unitary_flag=True))
        np.testing.assert_allclose(
            np.linalg.eigvalsh(out), np.linalg.eigvalsh(st.rho), atol=1e-11
        )


# --------------------------------------------------------------- range_kernel


def test_range_kernel_dimensions_and_annihilation():
    st = build_family("v", 0.2)
    rng_cols, ker_cols = range_kernel(st)
    assert rng_cols.shape == (9, 5)
    assert ker_cols.shape == (9, 4)
    np.testing.assert_allclose(rng_cols.conj().T @ rng_cols, np.eye(5), atol=1e-12)
    np.testing.assert_allclose(ker_cols.conj().T @ ker_cols, np.eye(4), atol=1e-12)
    assert np.linalg.norm(st.rho @ ker_cols) <= 1e-12
    # range columns reproduce the support projector
    p = rng_cols @ rng_cols.conj().T
    np.testing.assert_allclose(p @ st.rho, st.rho, atol=1e-12)


def test_range_kernel_spans_are_orthogonal():
    st = build_family("ii", 0.6)
    rng_cols, ker_cols = range_kernel(st)
    assert np.linalg.norm(rng_cols.conj().T @ ker_cols) <= 1e-12


# --------------------------------------------------------------- schmidt_rank


def test_schmidt_rank_values():
    assert schmidt_rank(basis_ket(1, 2)) == 1
    e = symmetric_basis()
    assert schmidt_rank(e[3]) == 2
    assert schmidt_rank(e[4]) == 3


def test_schmidt_rank_zero_vector_raises():
    with pytest.raises(states.ZeroVector):
        schmidt_rank(np.zeros(9))


def test_coefficient_matrix_row_col_convention():
    # |ab> must land at entry (a, b)
    c = coefficient_matrix(basis_ket(1, 2))
    expect = np.zeros((3, 3))
    expect[1, 2] = 1.0
    np.testing.assert_allclose(c, expect, atol=1e-15)


# ------------------------------------------------------- partial-transpose ties


def test_pt_spectra_pair_i_ii():
    for x in np.linspace(0.01, 0.99, 33):
        a = np.linalg.eigvalsh(partial_transpose(build_family("i", float(x)).rho, 3, 3))
        b = np.linalg.eigvalsh(partial_transpose(build_family("ii", float(x)).rho, 3, 3))
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_pt_spectra_pair_iii_iv():
    for x in np.linspace(0.01, 0.99, 33):
        a = np.linalg.eigvalsh(partial_transpose(build_family("iii", float(x)).rho, 3, 3))
        b = np.linalg.eigvalsh(partial_transpose(build_family("iv", float(x)).rho, 3, 3))
        np.testing.assert_allclose(a, b, atol=1e-10)


# ---------------------------------------------------------------- construction


def test_uniform_state_on_span():
    span = [basis_ket(0, 0), basis_ket(1, 1), basis_ket(2, 2)]
    st = uniform_state_on_span(span)
    lam = np.sort(np.linalg.eigvalsh(st.rho))[::-1]
    np.testing.assert_allclose(lam[:3], [1 / 3] * 3, atol=1e-12)
    assert np.all(np.abs(lam[3:]) <= 1e-12)


def test_uniform_state_on_span_redundant_vectors():
    # linearly dependent input collapses to the actual span dimension
    span = [basis_ket(0, 0), basis_ket(0, 0), basis_ket(1, 1)]
    st = uniform_state_on_span(span)
    lam = np.sort(np.linalg.eigvalsh(st.rho))[::-1]
    np.testing.assert_allclose(lam[:2], [0.5, 0.5], atol=1e-12)


# --------------------------------------------------------------- serialization


def test_json_round_trip():
    st = build_family("iv", 1 / 7)
    doc = state_to_json(st)
    back = state_from_json(doc)
    np.testing.assert_allclose(back.rho, st.rho, atol=1e-14)
    assert back.case_id == st.case_id
    assert back.x == st.x


def test_from_density_normalizes():
    st = build_family("v", 0.3)
    again = states.from_density(2.0 * st.rho)
    np.testing.assert_allclose(again.rho, st.rho, atol=1e-12)

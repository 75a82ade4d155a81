"""Integrability checks: R-matrix structure, factorization equation,
reference-state action, commuting transfer family, Hamiltonian recovery."""

import numpy as np
import pytest

from tasep2 import (
    NestedWeights,
    RMatrix,
    build_hamiltonian_tasep,
    build_transfer_matrix,
    check_yang_baxter,
    hamiltonian_from_transfer,
    transfer_hamiltonian_check,
)
from tasep2.yangbaxter import (
    _swap23,
    fun_g,
    fun_h,
    r_tensor,
    transfer_trace,
    weight_a,
    weight_c,
)


def test_r_matrix_five_rules():
    th = 0.37 - 0.21j
    t = r_tensor(th)
    a, c = np.exp(th), 2 * np.sinh(th)
    for al in range(3):
        for be in range(3):
            for i in range(3):
                for l in range(3):
                    v = t[al, be, i, l]
                    if al == be == i == l:
                        assert v == pytest.approx(a)
                    elif (i, l) == (be, al) and al < be:
                        assert v == pytest.approx(c)
                    elif (i, l) == (al, be) and al < be:
                        assert v == pytest.approx(a)
                    elif (i, l) == (al, be) and al > be:
                        assert v == pytest.approx(np.exp(-th))
                    else:
                        assert v == 0


def test_yang_baxter_zero_arguments():
    assert check_yang_baxter(0.7, 0.7, 0.7) <= 1e-14


def test_yang_baxter_100_random_triples():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        th = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
        th /= np.maximum(1.0, np.abs(th))
        worst = max(worst, check_yang_baxter(*th))
    assert worst <= 1e-12


def test_yang_baxter_radius_two():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        th = 2 * (rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3))
        th /= np.maximum(1.0, np.abs(th) / 2.0)
        worst = max(worst, check_yang_baxter(*th))
    assert worst <= 1e-12


def test_yang_baxter_detects_perturbation():
    # same contraction as check_yang_baxter but with one corrupted entry
    th = (0.31 + 0.11j, -0.42 + 0.05j, 0.2 - 0.3j)
    eye = np.eye(3)
    P = _swap23()

    def op(theta, corrupt):
        t = r_tensor(theta)
        if corrupt:
            t[0, 1, 0, 1] += 1e-3
        return np.transpose(t, (0, 1, 3, 2)).reshape(9, 9)

    r12 = np.kron(op(th[0] - th[1], True), eye)
    r23 = np.kron(eye, op(th[1] - th[2], False))
    r13 = P @ np.kron(op(th[0] - th[2], False), eye) @ P
    resid = np.max(np.abs(r12 @ r13 @ r23 - r23 @ r13 @ r12))
    assert resid > 1e-4


def test_nested_weights():
    th = 0.83 + 0.12j
    w = NestedWeights(th)
    coeff = w.coefficients()
    assert coeff[(1, 1, 1, 1)] == 1.0
    assert coeff[(1, 2, 1, 2)] == 1.0
    assert coeff[(2, 1, 1, 2)] == pytest.approx(2 * np.sinh(th) * np.exp(-th))
    assert coeff[(2, 1, 2, 1)] == pytest.approx(np.exp(-2 * th))
    assert coeff[(2, 2, 2, 2)] == 1.0


def test_g_times_h_is_one():
    rng = np.random.default_rng(5)
    for _ in range(20):
        th = rng.uniform(-1.5, 1.5) + 1j * rng.uniform(-1.5, 1.5)
        assert abs(fun_g(th) * fun_h(th) - 1.0) <= 1e-14


def test_reference_state_action():
    length, th = 3, 0.37
    tm = build_transfer_matrix(length, th)
    omega = np.zeros(3 ** length)
    omega[0] = 1.0  # all-A product state
    aL = weight_a(th) ** length
    cL = weight_c(th) ** length
    np.testing.assert_allclose(tm.block(0, 0) @ omega, aL * omega, atol=1e-12)
    np.testing.assert_allclose(tm.block(1, 1) @ omega, cL * omega, atol=1e-12)
    np.testing.assert_allclose(tm.block(2, 2) @ omega, cL * omega, atol=1e-12)
    # annihilation of the C operators and off-diagonal D block
    np.testing.assert_allclose(tm.block(0, 1) @ omega, 0, atol=1e-14)
    np.testing.assert_allclose(tm.block(0, 2) @ omega, 0, atol=1e-14)
    np.testing.assert_allclose(tm.block(1, 2) @ omega, 0, atol=1e-14)
    np.testing.assert_allclose(tm.block(2, 1) @ omega, 0, atol=1e-14)
    # the creation operators act nontrivially
    assert np.linalg.norm(tm.block(1, 0) @ omega) > 1e-8
    assert np.linalg.norm(tm.block(2, 0) @ omega) > 1e-8


def test_transfer_matrices_commute():
    rng = np.random.default_rng(11)
    for length in (2, 3, 4):
        for _ in range(10):
            t1, t2 = rng.uniform(-0.9, 0.9, 2) + 1j * rng.uniform(-0.4, 0.4, 2)
            m1 = np.asarray(transfer_trace(length, t1).todense())
            m2 = np.asarray(transfer_trace(length, t2).todense())
            comm = m1 @ m2 - m2 @ m1
            scale = max(np.max(np.abs(m1 @ m2)), 1.0)
            assert np.max(np.abs(comm)) / scale <= 1e-10


def test_transfer_conserves_sectors():
    length = 3
    tm = build_transfer_matrix(length, 0.29)
    mat = np.asarray(tm.matrix.todense())

    def counts(idx):
        digs = []
        # kron ordering: first site is the most significant trit
        for _ in range(length):
            digs.append(idx % 3)
            idx //= 3
        return digs.count(0), digs.count(1)

    nz = np.argwhere(np.abs(mat) > 1e-14)
    for r, c in nz:
        assert counts(int(r)) == counts(int(c))


def test_tau_zero_is_translation():
    for length in (2, 3, 4):
        mat = np.asarray(transfer_trace(length, 0.0).todense())
        assert np.all((np.abs(mat) < 1e-12) | (np.abs(mat - 1) < 1e-12))
        np.testing.assert_allclose(mat.sum(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(mat.sum(axis=1), 1.0, atol=1e-12)
        assert not np.allclose(mat, np.eye(3 ** length))


def test_transfer_size_limit():
    with pytest.raises(ValueError):
        build_transfer_matrix(9, 0.1)
    with pytest.raises(ValueError):
        hamiltonian_from_transfer(7)


def test_hamiltonian_recovery():
    for length in (2, 3):
        chk = transfer_hamiltonian_check(length)
        assert chk["discrepancy"] <= 1e-6
        assert chk["scale"] == -0.5
        assert chk["offset"] == pytest.approx(length / 2)


def test_finite_difference_order():
    # truncation-dominated regime: Richardson-refined stencil is 4th order
    length = 2
    h_coarse, h_fine = 0.08, 0.04
    target = build_hamiltonian_tasep(length).to_dense()

    def err(h):
        k = hamiltonian_from_transfer(length, step=h)
        rec = (length * np.eye(3 ** length) - k) / 2.0
        return np.max(np.abs(rec - target))

    ratio = err(h_coarse) / err(h_fine)
    assert ratio > 6.0

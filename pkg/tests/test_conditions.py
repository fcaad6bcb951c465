import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpnorm.channels import Channel, identity_channel
from cpnorm.conditions import (
    FormParams,
    check_postr,
    choi_entrywise_nonneg,
    condition_matrix,
    random_unitary,
    recognize_form,
    search_basis,
    transform_condition_matrix,
)
from cpnorm.zoo import (
    depolarizing,
    diagonal_map,
    form_map,
    qc_map,
    qubit_canonical,
    random_channel,
    werner_holevo,
    werner_holevo_unnormalized,
)

A_NEG = np.array([[2.0, -1.0], [-1.0, 2.0]])


def _conjugated(channel, V):
    """Kraus set of ``rho -> V^H Phi(V rho V^H) V``."""
    return Channel(np.einsum("ji,ajk,kl->ail", V.conj(), channel.kraus, V), trace_preserving=channel.trace_preserving)


def test_condition_matrix_of_identity():
    assert np.allclose(condition_matrix(identity_channel(3)), np.eye(9))


def test_condition_matrix_of_diagonal_map():
    A = np.array([[1, 0.5j, 0.2], [-0.5j, 2, 0.1], [0.2, 0.1, 1.5]])
    X = condition_matrix(diagonal_map(A))
    assert np.allclose(X, np.diag(np.abs(A.ravel()) ** 2), atol=1e-12)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25)
def test_condition_matrix_is_psd(seed):
    ch = random_channel(3, 2, 2, seed=seed)
    X = condition_matrix(ch)
    assert np.allclose(X, X.conj().T, atol=1e-13)
    lam = np.linalg.eigvalsh(X)
    assert lam[0] >= -1e-10


def test_transform_law(rng):
    ch = random_channel(3, 3, 2, seed=5)
    U = random_unitary(3, rng)
    direct = condition_matrix(ch, U)
    assert np.max(np.abs(direct - transform_condition_matrix(condition_matrix(ch), U))) <= 1e-11


def test_basis_covariance(rng):
    ch = random_channel(2, 2, 3, seed=1)
    V = random_unitary(2, rng)
    rotated = _conjugated(ch, V)
    assert np.allclose(condition_matrix(ch, V), condition_matrix(rotated), atol=1e-12)
    assert check_postr(ch, V).holds == check_postr(rotated).holds


def test_condition_matrix_rejects_non_unitary():
    with pytest.raises(ValueError):
        condition_matrix(identity_channel(2), np.diag([1.0, 2.0]))


def test_check_postr_examples():
    assert check_postr(diagonal_map(A_NEG)).holds
    assert check_postr(werner_holevo(3)).holds
    assert check_postr(werner_holevo_unnormalized(4)).holds
    assert check_postr(qubit_canonical([0, 0, 0.2], [0.6, 0.3, 0.5])).holds


def test_qubit_t3_maps_need_ordered_lambdas():
    # x[(0,1),(1,0)] = (lam1**2 - lam2**2) / 2
    chk = check_postr(qubit_canonical([0, 0, 0.1], [0.3, 0.5, 0.2]))
    assert not chk.holds
    assert chk.min_entry == pytest.approx((0.3**2 - 0.5**2) / 2)


def test_unnormalized_werner_holevo_condition_entries():
    d = 3
    X = condition_matrix(werner_holevo_unnormalized(d)).real
    eye = np.eye(d)
    expected = (d - 2) * np.einsum("ik,jl->ikjl", eye, eye) + np.einsum("ij,kl->ikjl", eye, eye)
    assert np.allclose(X, expected.reshape(d * d, d * d))


def test_choi_entrywise_nonneg():
    assert not choi_entrywise_nonneg(diagonal_map(A_NEG))
    assert choi_entrywise_nonneg(identity_channel(2))
    assert choi_entrywise_nonneg(qubit_canonical([0.2, 0, 0.1], [0.6, 0.4, 0.3]))


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=20)
def test_nonneg_choi_implies_condition(seed):
    rng = np.random.default_rng(seed)
    # Kraus operators with nonnegative entries give an entrywise nonnegative Choi matrix
    ch = Channel(rng.uniform(0, 1, (2, 3, 3)))
    assert choi_entrywise_nonneg(ch)
    assert check_postr(ch).holds


def test_search_basis_at_identity():
    res = search_basis(diagonal_map(A_NEG), restarts=2)
    assert res.holds
    assert np.allclose(res.best_U.conj().T @ res.best_U, np.eye(2))


def test_search_basis_recovers_rotated_map(rng):
    base = qubit_canonical([0, 0, 0.3], [0.6, 0.4, 0.5])
    V = random_unitary(2, rng)
    rotated = _conjugated(base, V.conj().T)
    assert check_postr(rotated, V).holds
    res = search_basis(rotated, restarts=8, seed=3)
    assert res.holds


def test_search_basis_reports_recomputable_entry():
    ch = random_channel(2, 2, 2, seed=12)
    res = search_basis(ch, restarts=3, seed=1)
    chk = check_postr(ch, res.best_U)
    assert res.min_entry == chk.min_entry
    assert res.holds == chk.holds


def test_recognize_unnormalized_werner_holevo():
    fp = recognize_form(werner_holevo_unnormalized(3))
    off = ~np.eye(3, dtype=bool)
    assert np.allclose(fp.D, 1 - np.eye(3))
    assert np.allclose(fp.a[off], -1)
    assert np.all(fp.eps[off] == -1)


def test_recognize_qc_map():
    D = np.array([[0.7, 0.2], [0.3, 0.8]])
    fp = recognize_form(qc_map(D))
    assert np.allclose(fp.D, D)
    assert not np.any(fp.a)
    assert fp.is_trace_preserving()


def test_recognize_depolarizing():
    lam = 0.5
    fp = recognize_form(depolarizing(3, lam))
    assert np.allclose(fp.D, lam * np.eye(3) + (1 - lam) / 3)
    off = ~np.eye(3, dtype=bool)
    assert np.allclose(fp.a[off], lam)
    assert np.all(fp.eps[off] == 1)


def test_recognize_rejects_generic_map():
    assert recognize_form(random_channel(2, 2, 2, seed=0)) is None


def test_recognized_maps_satisfy_condition(rng):
    D = rng.dirichlet(np.ones(3), size=3).T
    a = np.zeros((3, 3), complex)
    a[0, 1], a[1, 0] = 0.1j, -0.1j
    eps = np.ones((3, 3))
    eps[0, 2] = eps[2, 0] = -1
    ch = form_map(FormParams(D, a, eps))
    fp = recognize_form(ch)
    assert fp is not None
    assert check_postr(ch).holds


def test_form_params_validation():
    with pytest.raises(ValueError):
        FormParams(-np.eye(2), np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(ValueError):
        FormParams(np.eye(2), np.array([[0, 1], [2, 0]]), np.ones((2, 2)))
    with pytest.raises(ValueError):
        FormParams(np.eye(2), np.zeros((2, 2)), np.array([[1, 0.5], [0.5, 1]]))

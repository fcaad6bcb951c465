from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpnorm.channels import identity_channel, superop_matrix, tensor_channel
from cpnorm.linalg import is_psd, schatten_norm
from cpnorm.norms import (
    OptimizerConfig,
    bell_obstruction,
    bell_witness_ratio,
    maximally_entangled_state,
    mult_ratio,
    norm_2_to_2_exact,
    norm_q_to_p,
    nu_p,
    output_pnorm,
    singular_basis,
    top_singular_operator,
)
from cpnorm.zoo import depolarizing, diagonal_map, extreme_cp, qubit_canonical, random_channel, werner_holevo

from conftest import random_density, random_hermitian, random_pure

FAST = OptimizerConfig(restarts=16)


@pytest.mark.parametrize("p", [1, 2, 3.5, np.inf])
def test_nu_identity(p):
    assert nu_p(identity_channel(3), p, FAST).value == pytest.approx(1, abs=1e-10)


def test_nu_depolarizing():
    res = nu_p(depolarizing(2, 0.5), 2)
    assert res.value == pytest.approx(np.sqrt(0.75**2 + 0.25**2), abs=1e-9)
    assert res.converged


def test_depolarizing_output_is_input_independent(rng):
    ch = depolarizing(2, 0.5)
    vals = [output_pnorm(ch, random_pure(rng, 2), 2) for _ in range(200)]
    assert np.ptp(vals) <= 1e-12


@pytest.mark.parametrize("p", [2, 5])
def test_nu_werner_holevo(p):
    assert nu_p(werner_holevo(3), p, FAST).value == pytest.approx(2 ** (1 / p - 1), abs=1e-9)


def test_werner_holevo_pure_outputs(rng):
    wh = werner_holevo(3)
    for _ in range(20):
        psi = random_pure(rng, 3)
        ev = np.linalg.eigvalsh(wh(np.outer(psi, psi.conj())))
        assert np.allclose(ev, [0, 0.5, 0.5], atol=1e-12)


def test_nu_extreme_map():
    ch = extreme_cp(np.diag([0.6, 0.8]))
    assert nu_p(ch, 2, FAST).value == pytest.approx(0.64, abs=1e-9)


def test_nu_value_matches_argmax():
    ch = random_channel(3, 3, 2, seed=8)
    res = nu_p(ch, 3, FAST)
    assert abs(output_pnorm(ch, res.argmax, 3) - res.value) <= 1e-10
    assert res.value <= 1 + 1e-10


def test_nu_deterministic():
    ch = random_channel(3, 3, 2, seed=8)
    a, b = nu_p(ch, 2.5, FAST), nu_p(ch, 2.5, FAST)
    assert a.value == b.value and np.array_equal(a.argmax, b.argmax)


def test_nu_rejects_bad_p():
    with pytest.raises(ValueError):
        nu_p(identity_channel(2), 0.5)


def test_nu_nonincreasing_in_p():
    ch = random_channel(3, 3, 2, seed=21)
    vals = [nu_p(ch, p, FAST).value for p in (1, 1.5, 2, 3, 5)]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


def test_nu_bounds_mixed_outputs(rng):
    ch = random_channel(2, 2, 3, seed=2)
    nu = nu_p(ch, 2, FAST).value
    for _ in range(100):
        assert schatten_norm(ch(random_density(rng, 2)), 2) <= nu + 1e-10


def test_output_bound_for_self_adjoint_inputs(rng):
    ch = random_channel(3, 3, 2, seed=3)
    nu = nu_p(ch, 3, FAST).value
    for _ in range(100):
        A = random_hermitian(rng, 3)
        assert schatten_norm(ch(A), 3) <= nu * schatten_norm(A, 1) + 1e-10


def test_norm_identity_two_to_two():
    for restrict in ("unrestricted", "self_adjoint"):
        assert norm_q_to_p(identity_channel(2), 2, 2, restrict, FAST).value == pytest.approx(1, abs=1e-9)


def test_restricted_one_to_p_equals_nu():
    for seed in range(5):
        ch = random_channel(2, 2, 2, seed=seed)
        assert abs(norm_q_to_p(ch, 1, 2, "self_adjoint", FAST).value - nu_p(ch, 2, FAST).value) <= 1e-6


def test_qubit_one_to_two_domains_agree():
    ch = random_channel(2, 2, 3, seed=31)
    a = norm_q_to_p(ch, 1, 2, "unrestricted", FAST).value
    b = norm_q_to_p(ch, 1, 2, "self_adjoint", FAST).value
    assert abs(a - b) <= 1e-6


def test_unrestricted_dominates_restricted():
    ch = random_channel(2, 2, 2, seed=4)
    for q, p in ((1.5, 2), (2, 3), (3, 1.5)):
        u = norm_q_to_p(ch, q, p, "unrestricted", FAST).value
        r = norm_q_to_p(ch, q, p, "self_adjoint", FAST).value
        assert u >= r - 1e-8


def test_norm_rejects_unknown_restriction():
    with pytest.raises(ValueError):
        norm_q_to_p(identity_channel(2), 2, 2, "hermitian")


def test_exact_two_to_two():
    assert norm_2_to_2_exact(identity_channel(3)) == pytest.approx(1)
    unital = qubit_canonical([0, 0, 0], [0.5, -0.3, 0.2])
    assert norm_2_to_2_exact(unital) == pytest.approx(1)


def test_exact_matches_optimizer():
    ch = random_channel(2, 3, 2, seed=13)
    opt = norm_q_to_p(ch, 2, 2, "unrestricted", FAST)
    assert abs(opt.value - norm_2_to_2_exact(ch)) <= 1e-8


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=20)
def test_exact_two_to_two_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a = random_channel(int(rng.integers(2, 4)), kraus_count=2, seed=seed)
    b = random_channel(int(rng.integers(2, 4)), kraus_count=3, seed=seed + 1)
    prod = norm_2_to_2_exact(tensor_channel(a, b))
    assert abs(prod - norm_2_to_2_exact(a) * norm_2_to_2_exact(b)) <= 1e-12


@pytest.mark.parametrize("k", [2, 3])
def test_exact_norm_with_identity_ancilla(k):
    ch = random_channel(2, 2, 2, seed=7)
    assert norm_2_to_2_exact(tensor_channel(ch, identity_channel(k))) == pytest.approx(norm_2_to_2_exact(ch), abs=1e-12)


def test_top_singular_operator_self_adjoint():
    ch = random_channel(3, 3, 2, seed=17)
    sigma, A, H = top_singular_operator(ch)
    assert np.allclose(H, H.conj().T)
    val = np.linalg.norm(superop_matrix(ch) @ H.ravel())
    assert abs(val - sigma) <= 1e-9


def test_mult_ratio_identity():
    m = mult_ratio(identity_channel(2), identity_channel(2), 3, FAST)
    assert m.ratio == pytest.approx(1, abs=1e-9)


def test_mult_ratio_diagonal_times_random():
    A = np.array([[1, 0.3], [0.3, 1]])
    m = mult_ratio(diagonal_map(A), random_channel(2, 2, 2, seed=3), 2, FAST)
    assert abs(m.ratio - 1) <= 1e-5


def test_mult_ratio_never_below_one():
    m = mult_ratio(random_channel(2, 2, 2, seed=1), random_channel(2, 2, 3, seed=2), 1.5, OptimizerConfig(restarts=4))
    assert m.ratio >= 1 - 1e-7


def test_werner_holevo_violation_at_five():
    wh = werner_holevo(3)
    m = mult_ratio(wh, wh, 5, FAST)
    beta = maximally_entangled_state(3)
    ev = np.linalg.eigvalsh(tensor_channel(wh, wh)(np.outer(beta, beta.conj())))
    witness = np.sum(np.abs(ev) ** 5) ** 0.2 / (2 ** (1 / 5 - 1)) ** 2
    assert m.ratio >= witness - 1e-9
    assert m.ratio > 1


def test_bell_witness_ratio_value():
    wh = werner_holevo(3)
    nu = 2 ** (1 / 5 - 1)
    r = bell_witness_ratio(wh, wh, 5, nu, nu)
    # outputs on the maximally entangled input: 1/3 once and 1/12 eight times
    expected = (3.0**-5 + 8 * 12.0**-5) ** 0.2 / nu**2
    assert r == pytest.approx(expected, rel=1e-12)


def test_maximally_entangled_state():
    beta = maximally_entangled_state(2, 3)
    assert np.linalg.norm(beta) == pytest.approx(1)
    assert beta[0] == pytest.approx(2**-0.5) and beta[4] == pytest.approx(2**-0.5)


def test_singular_basis_identity():
    sb = singular_basis(identity_channel(2))
    assert np.allclose(sb.singular_values, 1)
    assert sb.self_adjoint


def test_singular_basis_unital_qubit():
    lam = np.array([0.5, -0.2, 0.1])
    sb = singular_basis(qubit_canonical([0, 0, 0], lam))
    assert np.allclose(sb.singular_values, [1, 0.5, 0.2, 0.1])
    for g in sb.basis:
        assert np.allclose(g, g.conj().T)


def test_singular_basis_properties():
    ch = random_channel(3, 2, 2, seed=23)
    sb = singular_basis(ch)
    G = sb.basis.reshape(len(sb.basis), -1)
    assert np.allclose(G.conj() @ G.T, np.eye(9), atol=1e-10)
    imgs = ch(sb.basis).reshape(9, -1)
    gram = imgs.conj() @ imgs.T
    assert np.allclose(gram, np.diag(sb.singular_values**2), atol=1e-9)
    assert sb.singular_values[0] == pytest.approx(norm_2_to_2_exact(ch), abs=1e-12)
    assert sb.self_adjoint
    for g in sb.basis:
        assert np.allclose(g, g.conj().T)


def test_bell_obstruction():
    res = bell_obstruction()
    # computed from the construction: coefficient norms (2, 2, 2, 2) / sqrt(2)
    assert np.allclose(res.N, [[2, 1 - 1j], [1 + 1j, 0]], atol=1e-14)
    assert not res.is_psd
    assert np.allclose(res.eigenvalues, [1 - np.sqrt(3), 1 + np.sqrt(3)])
    assert res.trace_norm == pytest.approx(2 * np.sqrt(3), abs=1e-12)
    assert not is_psd(res.N)[0]


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    assert replace(OptimizerConfig(), value_tol=1e-6).grad_tol == pytest.approx(1e-5)

"""Maximal output p-norms, q->p operator norms and tensor-product multiplicativity.

``nu_p`` maximizes ``||Phi(psi psi^H)||_p`` over pure inputs (the supremum over
density matrices is attained on a pure state by convexity). The optimizers are
multi-start projected gradient ascents; reported values are certified lower
bounds on the true suprema, with restart agreement as the convergence
certificate. The ``2 -> 2`` norm is computed exactly from the superoperator
spectrum.
"""

from dataclasses import dataclass, field

import numpy as np

from ._ascent import ascend, restart_rng
from .channels import Channel, is_cp, superop_matrix, tensor_channel
from .linalg import as_matrix, basis_decompose, is_psd, pauli_basis, schatten_norm

__all__ = [
    "OptimizerConfig",
    "NormResult",
    "MultResult",
    "SingularBasis",
    "BellObstruction",
    "nu_p",
    "norm_q_to_p",
    "norm_2_to_2_exact",
    "top_singular_operator",
    "mult_ratio",
    "maximally_entangled_state",
    "bell_witness_ratio",
    "singular_basis",
    "bell_obstruction",
    "output_pnorm",
]

AGREE_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 2000
    step_tol: float = 1e-12
    value_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")

    @property
    def grad_tol(self):
        # value error of a converged restart is O(grad**2)
        return 1e-2 * np.sqrt(self.value_tol)


@dataclass(frozen=True, eq=False)
class NormResult:
    """Best value over restarts, the input attaining it, and restart diagnostics."""

    value: float
    argmax: np.ndarray
    restarts_agreeing: int
    converged: bool
    restart_values: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class MultResult:
    ratio: float
    witness: np.ndarray
    nu_a: NormResult
    nu_b: NormResult
    nu_ab: NormResult

    @property
    def converged(self):
        return self.nu_a.converged and self.nu_b.converged and self.nu_ab.converged


@dataclass(frozen=True, eq=False)
class SingularBasis:
    basis: np.ndarray
    singular_values: np.ndarray
    self_adjoint: bool


@dataclass(frozen=True, eq=False)
class BellObstruction:
    N: np.ndarray
    is_psd: bool
    trace_norm: float
    eigenvalues: np.ndarray
    gamma: np.ndarray
    coefficients: np.ndarray


# --------------------------------------------------------------------------- #
#                       log-norm values and gradients                          #
# --------------------------------------------------------------------------- #

def _log_pnorm_psd(Y, p):
    """``log ||Y||_p`` for a stack of PSD matrices and its gradient in ``Y``."""
    if p == 2:
        n2 = np.sum(np.abs(Y) ** 2, axis=(1, 2))
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * np.log(n2), Y / n2[:, None, None]
    if p == 1:
        tr = np.einsum("bii->b", Y).real
        eye = np.broadcast_to(np.eye(Y.shape[1]), Y.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(tr), eye / tr[:, None, None]
    lam, U = np.linalg.eigh(Y)
    lam = np.clip(lam, 0, None)
    m = lam[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = lam / m[:, None]
        if np.isinf(p):
            w = np.zeros_like(r)
            w[:, -1] = 1.0 / m
            logv = np.log(m)
        else:
            rp = r**p
            S = rp.sum(axis=1)
            logv = np.log(m) + np.log(S) / p
            w = r ** (p - 1) / (m * S)[:, None]
    w = np.nan_to_num(w)
    H = np.einsum("bij,bj,bkj->bik", U, w, U.conj())
    return logv, H


def _log_schatten(B, p):
    """``log ||B||_p`` for a stack of general matrices and its gradient in ``B``."""
    if p == 2:
        n2 = np.sum(np.abs(B) ** 2, axis=(1, 2))
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * np.log(n2), B / n2[:, None, None]
    U, s, Vh = np.linalg.svd(B)
    m = s[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = s / m[:, None]
        if np.isinf(p):
            w = np.zeros_like(r)
            w[:, 0] = 1.0 / m
            logv = np.log(m)
        else:
            S = np.sum(r**p, axis=1)
            logv = np.log(m) + np.log(S) / p
            w = (np.ones_like(r) if p == 1 else r ** (p - 1)) / (m * S)[:, None]
    w = np.nan_to_num(w)
    return logv, np.einsum("bij,bj,bjk->bik", U, w, Vh)


def _apply_batch(kraus, A):
    return np.einsum("aij,bjk,alk->bil", kraus, A, kraus.conj())


def _adjoint_batch(kraus, H):
    return np.einsum("aji,bjk,akl->bil", kraus.conj(), H, kraus)


# --------------------------------------------------------------------------- #
#                               objectives                                     #
# --------------------------------------------------------------------------- #

def _pure_state_objective(kraus, p):
    Kc = kraus.conj()

    def fun(psi):
        V = np.einsum("aij,bj->bai", kraus, psi)
        Y = np.einsum("bai,bak->bik", V, V.conj())
        n2 = np.sum(np.abs(psi) ** 2, axis=1)
        logv, H = _log_pnorm_psd(Y, p)
        HV = np.einsum("bik,bak->bai", H, V)
        g = 2 * np.einsum("aij,bai->bj", Kc, HV) - 2 * psi / n2[:, None]
        return logv - np.log(n2), g

    return fun


def _matrix_objective(kraus, q, p, hermitian):
    def fun(A):
        logp, Hp = _log_schatten(_apply_batch(kraus, A), p)
        logq, Hq = _log_schatten(A, q)
        g = _adjoint_batch(kraus, Hp) - Hq
        if hermitian:
            g = (g + g.conj().transpose(0, 2, 1)) / 2
        return logp - logq, g

    return fun


def _rank_one_objective(kraus, p):
    def fun(X):
        x, y = X[:, 0], X[:, 1]
        nx2 = np.sum(np.abs(x) ** 2, axis=1)
        ny2 = np.sum(np.abs(y) ** 2, axis=1)
        B = _apply_batch(kraus, np.einsum("bi,bj->bij", x, y.conj()))
        logv, H = _log_schatten(B, p)
        PH = _adjoint_batch(kraus, H)
        gx = np.einsum("bij,bj->bi", PH, y) - x / nx2[:, None]
        gy = np.einsum("bji,bj->bi", PH.conj(), x) - y / ny2[:, None]
        return logv - 0.5 * np.log(nx2) - 0.5 * np.log(ny2), np.stack([gx, gy], axis=1)

    return fun


def _normalize_rows(X):
    n = np.sqrt(np.sum(np.abs(X.reshape(X.shape[0], -1)) ** 2, axis=1))
    return X / n.reshape((-1,) + (1,) * (X.ndim - 1))


def _normalize_pairs(X):
    return X / np.linalg.norm(X, axis=2, keepdims=True)


def _qnorm_normalizer(q):
    def normalize(A):
        s = np.linalg.svd(A, compute_uv=False)
        if np.isinf(q):
            n = s[:, 0]
        else:
            n = np.sum(s**q, axis=1) ** (1.0 / q)
        return A / n[:, None, None]

    return normalize


# --------------------------------------------------------------------------- #
#                            starting points                                   #
# --------------------------------------------------------------------------- #

def _haar_states(seed, start, count, dim, offset=0):
    out = np.empty((count, dim), dtype=complex)
    for i in range(count):
        rng = restart_rng(seed, offset + start + i)
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        out[i] = z / np.linalg.norm(z)
    return out


def _ginibre(seed, start, count, dim, hermitian, offset):
    out = np.empty((count, dim, dim), dtype=complex)
    for i in range(count):
        rng = restart_rng(seed, offset + start + i)
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        out[i] = (z + z.conj().T) / 2 if hermitian else z
    return out


# Offsets keep the restart streams of different problems disjoint.
_STREAM_PURE = 0
_STREAM_RESTRICTED = 1 << 20
_STREAM_MATRIX = 2 << 20
_STREAM_RANK_ONE = 3 << 20


# --------------------------------------------------------------------------- #
#                                  drivers                                     #
# --------------------------------------------------------------------------- #

def _check_p(p, name="p"):
    if not p >= 1:
        raise ValueError(f"{name} must be >= 1, got {p}")


def _summarize(values, argmaxes):
    order = np.argsort(-values, kind="stable")
    values = values[order]
    best = values[0]
    tol = AGREE_TOL * max(1.0, abs(best))
    agreeing = int(np.sum(np.abs(values - best) <= tol))
    converged = len(values) > 1 and abs(values[0] - values[1]) <= tol
    return best, argmaxes[order[0]], agreeing, converged, values


def _multistart(objective, normalize, make_starts, evaluate, cfg, p, extra=None):
    def run(start, count):
        X0 = make_starts(start, count)
        if extra is not None and start == 0:
            X0 = np.concatenate([np.asarray(extra, dtype=complex), X0])
        X, _, _ = ascend(objective, X0, normalize, cfg.max_iters, cfg.step_tol, cfg.grad_tol)
        return X

    X = run(0, cfg.restarts)
    values = np.array([evaluate(x) for x in X])
    best, arg, agreeing, converged, vals = _summarize(values, X)
    if p < 2 and not converged:
        X2 = run(cfg.restarts, cfg.restarts)
        X = np.concatenate([X, X2])
        values = np.concatenate([values, [evaluate(x) for x in X2]])
        best, arg, agreeing, converged, vals = _summarize(values, X)
    return NormResult(float(best), arg, agreeing, converged, vals)


def _fix_phase(psi):
    k = int(np.argmax(np.abs(psi)))
    return psi * (abs(psi[k]) / psi[k])


def output_pnorm(channel, psi, p):
    """``||Phi(psi psi^H)||_p`` for one (normalized) pure state."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return schatten_norm(channel(np.outer(psi, psi.conj())), p)


def _require_cp(channel):
    if not isinstance(channel, Channel):
        raise TypeError("expected a Channel")
    if not is_cp(channel):
        raise ValueError("channel is not completely positive")


def nu_p(channel, p, cfg=OptimizerConfig(), initial=None, _stream=_STREAM_PURE):
    """Maximal output p-norm ``sup_rho ||Phi(rho)||_p`` over density matrices.

    Args:
        channel: a CP map.
        p: norm index, ``p >= 1`` or ``np.inf``.
        cfg: optimizer settings; results are deterministic for fixed settings.
        initial: optional extra starting states (rows) tried alongside the
            random restarts.

    Returns:
        NormResult whose ``argmax`` is the best pure input found.
    """
    _check_p(p)
    _require_cp(channel)
    d = channel.dim_in
    res = _multistart(
        _pure_state_objective(channel.kraus, p),
        _normalize_rows,
        lambda s, c: _haar_states(cfg.seed, s, c, d, _stream),
        lambda psi: output_pnorm(channel, psi, p),
        cfg,
        p,
        extra=initial,
    )
    return NormResult(res.value, _fix_phase(res.argmax), res.restarts_agreeing,
                      res.converged, res.restart_values)


def norm_q_to_p(channel, q, p, restrict="unrestricted", cfg=OptimizerConfig()):
    """``sup_A ||Phi(A)||_p / ||A||_q`` over all matrices or over self-adjoint ones.

    ``restrict`` is ``"unrestricted"`` or ``"self_adjoint"``. For ``q = 1`` the
    trace-norm unit ball is the convex hull of rank-one matrices (``x y^H``,
    or ``+-psi psi^H`` in the self-adjoint case) and the numerator is convex,
    so the search runs over those extreme points. Other ``q`` search the full
    q-norm sphere.
    """
    _check_p(p)
    _check_p(q, "q")
    if restrict not in ("unrestricted", "self_adjoint"):
        raise ValueError(f"unknown restriction {restrict!r}")
    _require_cp(channel)
    d = channel.dim_in
    hermitian = restrict == "self_adjoint"

    def ratio(A):
        return schatten_norm(channel(A), p) / schatten_norm(A, q)

    if q == 1 and hermitian:
        res = nu_p(channel, p, cfg, _stream=_STREAM_RESTRICTED)
        psi = res.argmax
        return NormResult(res.value, np.outer(psi, psi.conj()), res.restarts_agreeing,
                          res.converged, res.restart_values)
    if q == 1:
        def starts(s, c):
            return np.stack([_haar_states(cfg.seed, s, c, d, _STREAM_RANK_ONE),
                             _haar_states(cfg.seed, s, c, d, _STREAM_RANK_ONE + (1 << 19))], axis=1)

        res = _multistart(
            _rank_one_objective(channel.kraus, p),
            _normalize_pairs,
            starts,
            lambda X: ratio(np.outer(X[0], X[1].conj())),
            cfg,
            p,
        )
        x, y = res.argmax
        return NormResult(res.value, np.outer(x, y.conj()), res.restarts_agreeing,
                          res.converged, res.restart_values)
    res = _multistart(
        _matrix_objective(channel.kraus, q, p, hermitian),
        _qnorm_normalizer(q),
        lambda s, c: _ginibre(cfg.seed, s, c, d, hermitian, _STREAM_MATRIX),
        ratio,
        cfg,
        min(p, q),
    )
    return res


def norm_2_to_2_exact(channel):
    """Largest singular value of the superoperator."""
    return float(np.linalg.svd(superop_matrix(channel), compute_uv=False)[0])


def top_singular_operator(channel):
    """Top right singular vector of the superoperator as a matrix, plus a
    self-adjoint representative of the same singular subspace.

    Returns ``(sigma_max, A, H)`` with ``A`` the raw singular vector and ``H``
    a unit-HS-norm Hermitian matrix.
    """
    S = superop_matrix(channel)
    _, s, Vh = np.linalg.svd(S)
    d = channel.dim_in
    A = Vh[0].conj().reshape(d, d)
    parts = [(A + A.conj().T) / 2, (A - A.conj().T) / 2j]
    H = max(parts, key=np.linalg.norm)
    return float(s[0]), A, H / np.linalg.norm(H)


def mult_ratio(phi, omega, p, cfg=OptimizerConfig()):
    """``nu_p(Phi (x) Omega) / (nu_p(Phi) nu_p(Omega))``.

    The product of the two individual maximizers is included among the
    starting points for the joint problem, so the ratio is at least one up to
    rounding.
    """
    nu_a = nu_p(phi, p, cfg)
    nu_b = nu_p(omega, p, cfg)
    product = np.kron(nu_a.argmax, nu_b.argmax)[None]
    nu_ab = nu_p(tensor_channel(phi, omega), p, cfg, initial=product)
    ratio = nu_ab.value / (nu_a.value * nu_b.value)
    return MultResult(float(ratio), nu_ab.argmax, nu_a, nu_b, nu_ab)


def maximally_entangled_state(d1, d2=None):
    """``sum_j |j>|j> / sqrt(m)`` on ``C^d1 (x) C^d2`` with ``m = min(d1, d2)``."""
    d2 = d1 if d2 is None else d2
    m = min(d1, d2)
    beta = np.zeros(d1 * d2, dtype=complex)
    for j in range(m):
        beta[j * d2 + j] = 1
    return beta / np.sqrt(m)


def bell_witness_ratio(phi, omega, p, nu_a, nu_b):
    """``||(Phi (x) Omega)(beta beta^H)||_p / (nu_a nu_b)`` for the maximally
    entangled input ``beta``; a lower bound on the multiplicativity ratio."""
    beta = maximally_entangled_state(phi.dim_in, omega.dim_in)
    return output_pnorm(tensor_channel(phi, omega), beta, p) / (nu_a * nu_b)


def singular_basis(channel, degeneracy_tol=1e-9):
    """Orthonormal operator basis diagonalizing ``Phi^ o Phi``.

    ``(Phi^ o Phi)(G_m) = mu_m**2 G_m`` with ``mu`` sorted descending. Because a
    Hermiticity-preserving map commutes with taking adjoints, every
    eigenspace is spanned by self-adjoint operators; within each (possibly
    degenerate) eigenspace the returned basis is self-adjoint.
    """
    S = superop_matrix(channel)
    d = channel.dim_in
    ev, vec = np.linalg.eigh(S.conj().T @ S)
    ev, vec = ev[::-1], vec[:, ::-1]
    scale = max(1.0, float(abs(ev[0])))
    basis = np.empty((d * d, d, d), dtype=complex)
    start = 0
    n = d * d
    self_adjoint = True
    while start < n:
        stop = start + 1
        while stop < n and abs(ev[stop] - ev[stop - 1]) <= degeneracy_tol * scale:
            stop += 1
        k = stop - start
        mats = vec[:, start:stop].T.reshape(k, d, d)
        herm = np.concatenate([(mats + mats.conj().transpose(0, 2, 1)) / 2,
                               (mats - mats.conj().transpose(0, 2, 1)) / 2j])
        # Hermitian matrices under Tr(A B) form a real inner-product space
        real = np.concatenate([herm.real.reshape(2 * k, -1), herm.imag.reshape(2 * k, -1)], axis=1)
        u, s, vh = np.linalg.svd(real, full_matrices=False)
        if np.sum(s > 1e-8 * s[0]) < k:
            self_adjoint = False
            basis[start:stop] = mats
        else:
            rows = vh[:k]
            block = rows[:, : d * d] + 1j * rows[:, d * d:]
            block = block.reshape(k, d, d)
            basis[start:stop] = (block + block.conj().transpose(0, 2, 1)) / 2
        start = stop
    mu = np.sqrt(np.clip(ev, 0, None))
    return SingularBasis(basis, mu, self_adjoint)


def bell_obstruction():
    """The Pauli-basis Bell-state example showing why a general operator basis
    cannot replace the matrix units.

    With ``G_k = sigma_k / sqrt(2)`` and
    ``Gamma = G0(x)G0 + G1(x)G1 - G2(x)G2 + G3(x)G3``, forms
    ``N = sum_m G_m Tr|W_m|`` from the coefficient operators ``W_m`` of
    ``Gamma`` and reports whether it is PSD together with ``Tr|N|``.
    """
    G = pauli_basis()
    signs = (1, 1, -1, 1)
    gamma = sum(s * np.kron(g, g) for s, g in zip(signs, G))
    W = basis_decompose(gamma, G)
    coeffs = np.array([schatten_norm(w, 1) for w in W])
    N = np.einsum("m,mij->ij", coeffs, G)
    ok, _ = is_psd(N)
    ev = np.linalg.eigvalsh(as_matrix(N))
    return BellObstruction(N, ok, schatten_norm(N, 1), ev, gamma, coeffs)

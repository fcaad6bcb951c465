"""The entrywise-positivity condition on ``Tr Phi(E_ik)^H Phi(E_jl)`` and
related structural tests.

The condition matrix ``X`` has entries ``x[(i,k),(j,l)] = Tr Phi(E_ik)^H Phi(E_jl)``
with row-major pair flattening ``(i, k) -> i*d + k``. It is the matrix of
``Phi^ o Phi`` in the matrix-unit basis, hence Hermitian and PSD. Multiplicativity
of ``nu_2`` follows whenever ``X`` is entrywise real and nonnegative in some
orthonormal basis of ``C^d``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from ._ascent import restart_rng
from .channels import choi_of, superop_matrix

__all__ = [
    "ConditionCheck",
    "BasisSearchResult",
    "FormParams",
    "condition_matrix",
    "transform_condition_matrix",
    "check_postr",
    "choi_entrywise_nonneg",
    "search_basis",
    "recognize_form",
    "random_unitary",
]

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConditionCheck:
    holds: bool
    min_entry: float
    max_imag: float
    X: np.ndarray


@dataclass(frozen=True, eq=False)
class BasisSearchResult:
    """Best unitary found by the heuristic search.

    ``holds=False`` does not certify that no suitable basis exists.
    """

    best_U: np.ndarray
    min_entry: float
    max_imag: float
    holds: bool
    penalty: float


@dataclass(frozen=True, eq=False)
class FormParams:
    """Parameters of a map that acts on diagonals through ``D`` and on each
    off-diagonal entry ``x + i y`` as ``a_jk (x + i eps_jk y)``.

    ``a`` is Hermitian with its diagonal ignored (stored as zero); ``eps`` is a
    symmetric matrix of +-1.
    """

    D: np.ndarray
    a: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        a = np.array(self.a, dtype=complex)
        eps = np.asarray(self.eps, dtype=float)
        d = D.shape[0]
        if D.shape != (d, d) or a.shape != (d, d) or eps.shape != (d, d):
            raise ValueError("D, a and eps must all be d x d")
        if np.any(D < 0):
            raise ValueError("D must be entrywise nonnegative")
        np.fill_diagonal(a, 0)
        if not np.allclose(a, a.conj().T, atol=1e-12):
            raise ValueError("a must be Hermitian")
        off = ~np.eye(d, dtype=bool)
        if not np.all(np.isin(eps[off], (-1, 1))) or not np.array_equal(eps, eps.T):
            raise ValueError("eps must be a symmetric matrix of +-1")
        eps = eps.copy()
        np.fill_diagonal(eps, 1)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "eps", eps)

    @property
    def dim(self):
        return self.D.shape[0]

    def is_trace_preserving(self, tol=1e-12):
        """TP exactly when ``D`` is column stochastic."""
        return bool(np.all(np.abs(self.D.sum(axis=0) - 1) <= tol))

    def action(self, M):
        M = np.asarray(M, dtype=complex)
        out = np.diag(self.D @ np.diag(M))
        sym = (M + M.T) / 2
        skew = (M - M.T) / 2
        off = self.a * (sym + self.eps * skew)
        return out + off - np.diag(np.diag(off))


def _check_unitary(U, d):
    U = np.asarray(U, dtype=complex)
    if U.shape != (d, d):
        raise ValueError(f"unitary must be {d} x {d}, got {U.shape}")
    err = np.max(np.abs(U.conj().T @ U - np.eye(d)))
    if err > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (defect {err:.3e})")
    return U


def condition_matrix(channel, U=None):
    """``X[(i,k),(j,l)] = Tr Phi(F_ik)^H Phi(F_jl)`` with ``F_jk = U E_jk U^H``.

    Computed directly from the images of the rotated matrix units.
    """
    d = channel.dim_in
    U = np.eye(d) if U is None else _check_unitary(U, d)
    F = np.einsum("ij,kl->jlik", U, U.conj()).reshape(d * d, d, d)
    images = channel(F).reshape(d * d, -1)
    return images.conj() @ images.T


def transform_condition_matrix(X, U):
    """Re-express a condition matrix in the basis ``F_jk = U E_jk U^H``.

    With row-major vectorization ``vec(U E U^H) = (U (x) conj(U)) vec(E)``, so
    the rotated matrix is ``W^H X W`` with ``W = U (x) conj(U)``.
    """
    U = np.asarray(U, dtype=complex)
    W = np.kron(U, U.conj())
    return W.conj().T @ X @ W


def _scale(X):
    return max(1.0, float(np.max(np.abs(X))))


def check_postr(channel, U=None, tol=1e-10):
    """Whether every ``Tr Phi(F_ik)^H Phi(F_jl)`` is real and nonnegative.

    ``tol`` is relative to ``max(1, max|x|)`` and bounds both the negative real
    parts and the imaginary parts.
    """
    X = condition_matrix(channel, U)
    s = _scale(X)
    min_entry = float(X.real.min())
    max_imag = float(np.abs(X.imag).max())
    holds = min_entry >= -tol * s and max_imag <= tol * s
    return ConditionCheck(bool(holds), min_entry, max_imag, X)


def choi_entrywise_nonneg(channel, tol=1e-10):
    """Whether the Choi matrix has real nonnegative entries (sufficient for
    the positivity condition, not necessary)."""
    C = choi_of(channel)
    s = _scale(C)
    return bool(C.real.min() >= -tol * s and np.abs(C.imag).max() <= tol * s)


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _skew_hermitian(theta, d):
    H = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    H[iu] = theta[:m] + 1j * theta[m : 2 * m]
    H = H - H.conj().T
    H[np.diag_indices(d)] = 1j * theta[2 * m :]
    return H


def search_basis(channel, restarts=8, max_steps=500, seed=0, tol=1e-9):
    """Heuristic search for a unitary making the condition matrix entrywise
    nonnegative.

    Minimizes ``sum max(0, -Re x')**2 + sum (Im x')**2`` over
    ``U = U0 exp(A)`` with ``A`` skew-Hermitian, from the identity and from
    ``restarts - 1`` Haar-random ``U0``. Failure to find a basis is not a
    certificate that none exists.
    """
    d = channel.dim_in
    X = superop_matrix(channel)
    X = X.conj().T @ X
    s = _scale(X)
    n_par = d * d

    def residuals(theta, U0):
        U = U0 @ expm(_skew_hermitian(theta, d))
        Xr = transform_condition_matrix(X, U) / s
        return np.concatenate([np.minimum(Xr.real, 0).ravel(), Xr.imag.ravel()])

    best = None
    for r in range(restarts):
        U0 = np.eye(d, dtype=complex) if r == 0 else random_unitary(d, restart_rng(seed, r))
        fit = least_squares(residuals, np.zeros(n_par), args=(U0,), method="trf",
                            jac="3-point", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=max_steps)
        pen = float(np.sum(fit.fun**2))
        if best is None or pen < best[0]:
            U = U0 @ expm(_skew_hermitian(fit.x, d))
            # re-unitarize against expm rounding
            u, _, vh = np.linalg.svd(U)
            best = (pen, u @ vh)
        if best[0] == 0.0:
            break
    pen, U = best
    chk = check_postr(channel, U, tol)
    return BasisSearchResult(U, chk.min_entry, chk.max_imag, chk.holds, pen)


def recognize_form(channel, tol=1e-9):
    """Extract ``FormParams`` if the channel acts as a diagonal-stochastic /
    scaled-off-diagonal map; otherwise return ``None``.

    When ``a_jk = 0`` the sign ``eps_jk`` is unidentifiable and set to +1.
    """
    d = channel.dim_in
    if channel.dim_out != d:
        return None
    E = np.eye(d * d, dtype=complex).reshape(d * d, d, d)
    img = channel(E).reshape(d, d, d, d)  # img[j, k] = Phi(E_jk)
    scale = max(1.0, float(np.max(np.abs(img))))
    atol = tol * scale
    D = np.zeros((d, d))
    for l in range(d):
        Y = img[l, l]
        if np.max(np.abs(Y - np.diag(np.diag(Y)))) > atol:
            return None
        diag = np.diag(Y)
        if np.max(np.abs(diag.imag)) > atol or diag.real.min() < -atol:
            return None
        D[:, l] = np.clip(diag.real, 0, None)
    a = np.zeros((d, d), dtype=complex)
    eps = np.ones((d, d))
    for j in range(d):
        for k in range(j + 1, d):
            P, Q = img[j, k], img[k, j]
            fits = []
            for e in (1, -1):
                # eps=+1: Phi(E_jk) = a_jk E_jk ; eps=-1: Phi(E_jk) = a_kj E_kj
                r, c = (j, k) if e == 1 else (k, j)
                a_p = P[r, c]
                a_q = Q[c, r]
                res_p = P.copy()
                res_p[r, c] = 0
                res_q = Q.copy()
                res_q[c, r] = 0
                # Hermitian a: the two coefficients are complex conjugates
                herm = abs(a_q - np.conj(a_p))
                err = max(np.max(np.abs(res_p)), np.max(np.abs(res_q)), herm)
                a_jk = a_p if e == 1 else a_q
                fits.append((err, e, a_jk))
            err, e, a_jk = min(fits, key=lambda f: f[0])
            if err > atol:
                return None
            if abs(a_jk) <= atol:
                a_jk, e = 0.0, 1
            a[j, k], a[k, j] = a_jk, np.conj(a_jk)
            eps[j, k] = eps[k, j] = e
    return FormParams(D, a, eps)

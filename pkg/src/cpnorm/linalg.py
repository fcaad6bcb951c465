"""Dense complex matrix helpers: Schatten norms, tensor products, partial traces
and operator-basis decompositions.

Matrices are plain ``numpy`` arrays. The ``as_*`` validators enforce the
stronger invariants (Hermitian, density matrix, pure state) where a caller
needs them.
"""

import numpy as np

__all__ = [
    "HERMITIAN_TOL",
    "HERMITIAN_REPAIR_TOL",
    "PSD_TOL",
    "as_matrix",
    "as_hermitian",
    "as_density_matrix",
    "as_pure_state",
    "matrix_unit",
    "schatten_norm",
    "abs_matrix",
    "kron",
    "block_decompose",
    "block_compose",
    "basis_decompose",
    "basis_compose",
    "partial_trace",
    "is_psd",
    "jordan_decomposition",
    "hs_inner",
    "pauli_basis",
    "PAULI",
]

HERMITIAN_TOL = 1e-12
HERMITIAN_REPAIR_TOL = 1e-9
PSD_TOL = 1e-10

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def as_matrix(A):
    """Return ``A`` as a finite 2-d complex array."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _require_square(A):
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")


def as_hermitian(A, tol=HERMITIAN_REPAIR_TOL):
    """Symmetrize ``A`` to ``(A + A^H)/2``.

    Returns the symmetrized matrix and the defect ``max|A - A^H|``. Inputs whose
    defect exceeds ``tol`` are rejected rather than repaired.
    """
    A = as_matrix(A)
    _require_square(A)
    defect = float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return (A + A.conj().T) / 2, defect


def as_density_matrix(rho, psd_tol=PSD_TOL, trace_tol=HERMITIAN_TOL):
    """Validate a density matrix (Hermitian, PSD, unit trace) and return it."""
    rho, _ = as_hermitian(rho)
    ok, lam_min = is_psd(rho, psd_tol)
    if not ok:
        raise ValueError(f"density matrix is not PSD (min eigenvalue {lam_min:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    return rho


def as_pure_state(psi, tol=HERMITIAN_TOL):
    """Validate a unit-norm amplitude vector and return it as a complex array."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if not np.all(np.isfinite(psi)):
        raise ValueError("state has non-finite amplitudes")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1) > tol:
        raise ValueError(f"state norm is {nrm!r}, expected 1")
    return psi


def matrix_unit(j, k, d):
    """The ``d x d`` matrix unit ``E_jk`` with a single 1 at row j, column k."""
    if not (0 <= j < d and 0 <= k < d):
        raise IndexError(f"matrix unit ({j}, {k}) out of range for dimension {d}")
    E = np.zeros((d, d), dtype=complex)
    E[j, k] = 1
    return E


def schatten_norm(A, p):
    """Schatten p-norm: the vector p-norm of the singular values of ``A``.

    ``p`` may be ``np.inf`` (operator norm). Values of ``p < 1`` are rejected.
    """
    if not p >= 1:
        raise ValueError(f"Schatten p-norm requires p >= 1, got {p}")
    A = as_matrix(A)
    sv = np.linalg.svd(A, compute_uv=False)
    if np.isinf(p):
        return float(sv.max()) if sv.size else 0.0
    if p == 1:
        return float(sv.sum())
    if p == 2:
        return float(np.sqrt(np.sum(sv**2)))
    smax = sv.max() if sv.size else 0.0
    if smax == 0:
        return 0.0
    # scale first so large p does not overflow
    return float(smax * np.sum((sv / smax) ** p) ** (1.0 / p))


def abs_matrix(A):
    """``|A| = sqrt(A^H A)``, computed from the SVD ``A = U S V^H`` as ``V S V^H``."""
    A = as_matrix(A)
    _require_square(A)
    _, s, vh = np.linalg.svd(A)
    out = (vh.conj().T * s) @ vh
    return (out + out.conj().T) / 2


def kron(A, B):
    """Kronecker product with row-major block layout."""
    return np.kron(as_matrix(A), as_matrix(B))


def _split_dims(n, d):
    if d <= 0 or n % d:
        raise ValueError(f"side {n} is not divisible by {d}")
    return n // d


def block_decompose(gamma, d):
    """Split ``gamma`` on ``C^d (x) C^d'`` into blocks ``M[j, k]`` (each ``d' x d'``)
    so that ``gamma = sum_jk E_jk (x) M[j, k]``."""
    gamma = as_matrix(gamma)
    _require_square(gamma)
    dp = _split_dims(gamma.shape[0], d)
    return gamma.reshape(d, dp, d, dp).transpose(0, 2, 1, 3).copy()


def block_compose(blocks):
    """Inverse of :func:`block_decompose`."""
    blocks = np.asarray(blocks, dtype=complex)
    d, _, dp, _ = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(d * dp, d * dp)


def hs_inner(A, B):
    """Hilbert-Schmidt inner product ``Tr A^H B``."""
    return complex(np.vdot(np.asarray(A), np.asarray(B)))


def _check_orthonormal(basis, tol):
    flat = basis.reshape(basis.shape[0], -1)
    gram = flat.conj() @ flat.T
    err = np.max(np.abs(gram - np.eye(basis.shape[0])))
    if err > tol:
        raise ValueError(f"operator basis is not orthonormal (Gram error {err:.3e})")


def basis_decompose(gamma, basis, tol=1e-10):
    """Coefficient operators ``W_m = Tr_1 (G_m^H (x) I) gamma`` for an orthonormal
    operator basis ``{G_m}`` of the first tensor factor.

    When the basis is complete, ``gamma = sum_m G_m (x) W_m``.
    """
    gamma = as_matrix(gamma)
    basis = np.asarray(basis, dtype=complex)
    _check_orthonormal(basis, tol)
    d = basis.shape[1]
    dp = _split_dims(gamma.shape[0], d)
    g4 = gamma.reshape(d, dp, d, dp)
    return np.einsum("xryc,mxy->mrc", g4, basis.conj())


def basis_compose(basis, coeffs):
    """``sum_m G_m (x) W_m``."""
    basis = np.asarray(basis, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    d, dp = basis.shape[1], coeffs.shape[1]
    out = np.einsum("mxy,mrc->xryc", basis, coeffs)
    return out.reshape(d * dp, d * dp)


def partial_trace(gamma, which, d1, d2):
    """Trace out factor ``which`` (1 or 2) of ``gamma`` on ``C^d1 (x) C^d2``."""
    gamma = as_matrix(gamma)
    if gamma.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {gamma.shape} does not match dims ({d1}, {d2})")
    g4 = gamma.reshape(d1, d2, d1, d2)
    if which == 1:
        return np.einsum("iaib->ab", g4)
    if which == 2:
        return np.einsum("iaja->ij", g4)
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def is_psd(A, tol=PSD_TOL):
    """PSD test on a Hermitian matrix.

    The tolerance is relative to the largest absolute eigenvalue. Returns
    ``(verdict, lambda_min)``.
    """
    A, _ = as_hermitian(A)
    ev = np.linalg.eigvalsh(A)
    lam_min = float(ev[0])
    scale = max(1.0, float(np.max(np.abs(ev))))
    return bool(lam_min >= -tol * scale), lam_min


def jordan_decomposition(A):
    """Split Hermitian ``A`` into PSD parts with ``A = A_plus - A_minus``."""
    A, _ = as_hermitian(A)
    ev, vec = np.linalg.eigh(A)
    plus = (vec * np.clip(ev, 0, None)) @ vec.conj().T
    minus = (vec * np.clip(-ev, 0, None)) @ vec.conj().T
    return plus, minus


def pauli_basis():
    """Orthonormal Pauli operator basis ``G_k = sigma_k / sqrt(2)``, k = 0..3."""
    return np.stack(PAULI) / np.sqrt(2)

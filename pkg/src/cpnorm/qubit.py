"""Bloch-vector machinery for qubit maps.

A 2x2 matrix is written ``A = z0 I + (w + i u).sigma`` and a qubit CP map acts
affinely on that representation:

    Phi(I + z.sigma) = c [(1 + s.z) I + (t + T z).sigma]

with ``c = Tr Phi(I) / 2`` (one for trace-preserving and unital-normalized
maps). The map is TP iff ``s = 0`` (and ``c = 1``) and unital iff ``t = 0``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .channels import Channel, channel_from_linear_map
from .linalg import PAULI, schatten_norm

__all__ = [
    "BlochDecomposition",
    "QubitMapParams",
    "CanonicalForm",
    "StrongInequality",
    "bloch_decompose",
    "bloch_compose",
    "qubit_map_params",
    "qubit_channel",
    "rotation_to_unitary",
    "canonicalize",
    "canonical_channel",
    "eig_AdaggerA_closed",
    "eig_PhiA_closed",
    "eig_PhiA_general",
    "eig_PhiA_general_as_printed",
    "trace_norm_sq_closed",
    "trace_norm_sq_lower_bound",
    "abs_eigenvalue_product",
    "f_mono",
    "g_mono",
    "verify_strong_inequality",
    "traceless_ratio",
]

SIGMA = np.stack(PAULI[1:])


@dataclass(frozen=True, eq=False)
class BlochDecomposition:
    z0: complex
    w: np.ndarray
    u: np.ndarray

    @property
    def z(self):
        return self.w + 1j * self.u

    def matrix(self):
        return bloch_compose(self.z0, self.w, self.u)


@dataclass(frozen=True, eq=False)
class QubitMapParams:
    s: np.ndarray
    t: np.ndarray
    T: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float).reshape(3))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(3))
        object.__setattr__(self, "T", np.asarray(self.T, dtype=float).reshape(3, 3))

    @property
    def is_tp(self):
        return bool(np.linalg.norm(self.s) <= 1e-10 and abs(self.scale - 1) <= 1e-10)

    @property
    def is_unital(self):
        return bool(np.linalg.norm(self.t) <= 1e-10)

    def action(self, A):
        b = bloch_decompose(A)
        z = b.z
        z0 = b.z0
        return self.scale * bloch_compose(z0 + self.s @ z, *_split(z0 * self.t + self.T @ z))


def _split(z):
    return z.real, z.imag


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """``params`` has diagonal ``T``; ``Phi'(rho) = U^H Phi(V rho V^H) U``
    where ``U``, ``V`` implement the proper rotations ``R1``, ``R2``."""

    params: QubitMapParams
    R1: np.ndarray
    R2: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def lambdas(self):
        return np.diag(self.params.T).copy()


@dataclass(frozen=True)
class StrongInequality:
    lhs: float
    rhs: float
    holds: bool
    exploratory: bool = False


def bloch_decompose(A):
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {A.shape}")
    z0 = np.trace(A) / 2
    z = np.einsum("kij,ji->k", SIGMA, A) / 2
    return BlochDecomposition(complex(z0), z.real.copy(), z.imag.copy())


def bloch_compose(z0, w, u):
    z = np.asarray(w, dtype=float) + 1j * np.asarray(u, dtype=float)
    return z0 * np.eye(2) + np.einsum("k,kij->ij", z, SIGMA)


def qubit_map_params(channel):
    """Affine Bloch parameters ``(s, t, T)`` (and normalization ``scale``) of a
    qubit CP map, read off from its action on ``I`` and the Pauli matrices."""
    if channel.dim_in != 2 or channel.dim_out != 2:
        raise ValueError("qubit_map_params needs a 2 -> 2 map")
    images = channel(np.stack(PAULI))
    c = np.trace(images[0]).real / 2
    if c <= 0:
        raise ValueError("map sends I to a traceless operator")
    coef = np.einsum("kij,mji->mk", np.stack(PAULI), images).real / (2 * c)
    t = coef[0, 1:]
    s = coef[1:, 0]
    T = coef[1:, 1:].T
    return QubitMapParams(s, t, T, scale=float(c))


def qubit_channel(params):
    """Channel with the given Bloch parameters; raises
    ``NotCompletelyPositiveError`` if they do not describe a CP map."""
    tp = params.is_tp
    return channel_from_linear_map(params.action, 2, trace_preserving=tp)


def rotation_to_unitary(R):
    """SU(2) element ``U`` with ``U (v.sigma) U^H = (R v).sigma``."""
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    return w * np.eye(2) - 1j * (x * PAULI[1] + y * PAULI[2] + z * PAULI[3])


def canonicalize(params):
    """Rotate to diagonal ``T = diag(lambda)`` with real, possibly negative,
    ``lambda`` and proper rotations on both sides.

    ``T = R1 diag(lambda) R2^T``, ``t' = R1^T t``, ``s' = R2^T s``.
    """
    Ua, sv, Vat = np.linalg.svd(params.T)
    R1, R2 = Ua.copy(), Vat.T.copy()
    lam = sv.copy()
    if np.linalg.det(R1) < 0:
        R1[:, 2] *= -1
        lam[2] *= -1
    if np.linalg.det(R2) < 0:
        R2[:, 2] *= -1
        lam[2] *= -1
    new = QubitMapParams(R2.T @ params.s, R1.T @ params.t, np.diag(lam), params.scale)
    return CanonicalForm(new, R1, R2, rotation_to_unitary(R1), rotation_to_unitary(R2))


def canonical_channel(channel):
    """``U^H Phi(V . V^H) U`` for the rotations of :func:`canonicalize`."""
    form = canonicalize(qubit_map_params(channel))
    kraus = np.einsum("ji,ajk,kl->ail", form.U.conj(), channel.kraus, form.V)
    return Channel(kraus, trace_preserving=channel.trace_preserving), form


def _pm(center, radius_sq):
    r = np.sqrt(np.clip(radius_sq, 0, None))
    return np.stack([center - 2 * r, center + 2 * r], axis=-1)


def eig_AdaggerA_closed(w, u):
    """Eigenvalues (ascending) of ``A^H A`` for ``A = I + (w + i u).sigma``."""
    w, u = np.asarray(w, float), np.asarray(u, float)
    ww, uu, uw = _dot(w, w), _dot(u, u), _dot(u, w)
    return _pm(1 + ww + uu, ww + ww * uu - uw**2)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def eig_PhiA_closed(params, w, u):
    """Eigenvalues (ascending) of ``Phi(A)^H Phi(A)`` for a TP qubit map and
    ``A = I + (w + i u).sigma``. Maps with ``s != 0`` go to
    :func:`eig_PhiA_general`."""
    if not params.is_tp:
        return eig_PhiA_general(params, w, u)
    a = params.t + np.asarray(w, float) @ params.T.T
    b = np.asarray(u, float) @ params.T.T
    aa, bb, ab = _dot(a, a), _dot(b, b), _dot(a, b)
    return _pm(1 + aa + bb, aa * (1 + bb) - ab**2)


def eig_PhiA_general(params, w, u):
    """Eigenvalues (ascending) of ``Phi(A)^H Phi(A)`` for a general qubit CP map.

    ``Phi(A) = c [x0 I + (a + i b).sigma]`` with ``x0 = (1 + s.w) + i s.u``,
    ``a = t + T w``, ``b = T u``. The eigenvalues are
    ``c**2 (S2 + |a|^2 + |b|^2 +- 2 |Re(x0) a + Im(x0) b + b x a|)`` with
    ``S2 = |x0|^2``.
    """
    w, u = np.asarray(w, float), np.asarray(u, float)
    x = 1 + w @ params.s
    y = u @ params.s
    a = params.t + w @ params.T.T
    b = u @ params.T.T
    aa, bb, ab = _dot(a, a), _dot(b, b), _dot(a, b)
    S2 = x**2 + y**2
    rad = x**2 * aa + y**2 * bb + 2 * x * y * ab + aa * bb - ab**2
    return params.scale**2 * _pm(S2 + aa + bb, rad)


def eig_PhiA_general_as_printed(params, w, u):
    """The general-``s`` eigenvalue expression with the radicand
    ``|a|^2 (S2 + |b|^2) - (a.b)^2``.

    This agrees with :func:`eig_PhiA_general` only when ``s.u = 0``; it is kept
    for comparison.
    """
    w, u = np.asarray(w, float), np.asarray(u, float)
    x = 1 + w @ params.s
    y = u @ params.s
    a = params.t + w @ params.T.T
    b = u @ params.T.T
    aa, bb, ab = _dot(a, a), _dot(b, b), _dot(a, b)
    S2 = x**2 + y**2
    return params.scale**2 * _pm(S2 + aa + bb, aa * (S2 + bb) - ab**2)


def trace_norm_sq_closed(w, u):
    """``(Tr|A|)^2`` for ``A = I + (w + i u).sigma``."""
    w, u = np.asarray(w, float), np.asarray(u, float)
    ww, uu, uw = _dot(w, w), _dot(u, u), _dot(u, w)
    return 2 * (1 + ww + uu + np.sqrt((1 - ww + uu) ** 2 + 4 * uw**2))


def trace_norm_sq_lower_bound(w, u):
    """``4 (1 + |u|^2)`` if ``|w|^2 <= 1 + |u|^2`` else ``4 |w|^2``."""
    w, u = np.asarray(w, float), np.asarray(u, float)
    ww, uu = _dot(w, w), _dot(u, u)
    return np.where(ww <= 1 + uu, 4 * (1 + uu), 4 * ww)


def abs_eigenvalue_product(w, u):
    """Both sides of the identity for the product of the ``A^H A`` eigenvalues:
    ``(1+|z|^2)^2 - 4(|w|^2 + |w|^2|u|^2 - (u.w)^2)`` and
    ``(1 - |w|^2 + |u|^2)^2 + 4 (u.w)^2``."""
    w, u = np.asarray(w, float), np.asarray(u, float)
    ww, uu, uw = _dot(w, w), _dot(u, u), _dot(u, w)
    lhs = (1 + ww + uu) ** 2 - 4 * (ww + ww * uu - uw**2)
    rhs = (1 - ww + uu) ** 2 + 4 * uw**2
    return lhs, rhs


def f_mono(x, a, m):
    """``|x + a|^m + |x - a|^m``; increasing in ``x > 0`` and in ``a >= 0``."""
    return np.abs(x + a) ** m + np.abs(x - a) ** m


def g_mono(x, a, m):
    """``f(x)^(2/m) / x^2``; decreasing in ``x > 0``."""
    return f_mono(x, a, m) ** (2.0 / m) / np.asarray(x, float) ** 2


def _pnorm_stack(B, p):
    s = np.linalg.svd(B, compute_uv=False)
    if np.isinf(p):
        return s[..., 0]
    return np.sum(s**p, axis=-1) ** (1.0 / p)


def verify_strong_inequality(channel, A, p, exploratory=False, tol=1e-10):
    """Compare ``||Phi(A)||_p^2 / ||A||_1^2`` with the same ratio at
    ``I + w_hat.sigma`` for a TP qubit map, where ``w_hat`` is the direction of
    the real Bloch part of ``A / z0`` (``(0, 0, 1)`` if that part vanishes).

    ``A`` may be a single matrix or a stack; the result fields are then
    arrays. The inequality is only claimed for ``p >= 2``; smaller ``p``
    requires ``exploratory=True`` and just records the comparison.
    """
    if p < 2 and not exploratory:
        raise ValueError("the strong inequality is only claimed for p >= 2; pass exploratory=True")
    A = np.asarray(A, dtype=complex)
    single = A.ndim == 2
    A = A.reshape(-1, 2, 2)
    z0 = np.einsum("bii->b", A) / 2
    if np.any(np.abs(z0) == 0):
        raise ValueError("A must have nonzero trace; use traceless_ratio for z0 = 0")
    zvec = np.einsum("kij,bji->bk", SIGMA, A) / 2 / z0[:, None]
    w = zvec.real
    wn = np.linalg.norm(w, axis=1)
    w_hat = np.where(wn[:, None] > 0, w / np.where(wn > 0, wn, 1)[:, None], np.array([0.0, 0.0, 1.0]))
    out = channel(A)
    lhs = _pnorm_stack(out, p) ** 2 / _pnorm_stack(A, 1) ** 2
    ref = np.eye(2) + np.einsum("bk,kij->bij", w_hat, SIGMA)
    rhs = _pnorm_stack(channel(ref), p) ** 2 / _pnorm_stack(ref, 1) ** 2
    holds = lhs <= rhs + tol
    if single:
        return StrongInequality(float(lhs[0]), float(rhs[0]), bool(holds[0]), exploratory)
    return StrongInequality(lhs, rhs, holds, exploratory)


def traceless_ratio(channel, z, p):
    """``||Phi(z.sigma)||_p / ||z.sigma||_1`` for a TP qubit map, and the bound
    ``max_k |lambda_k|`` (largest singular value of ``T``)."""
    z = np.asarray(z, dtype=complex)
    A = np.einsum("k,kij->ij", z, SIGMA)
    ratio = schatten_norm(channel(A), p) / schatten_norm(A, 1)
    T = qubit_map_params(channel).T
    return ratio, float(np.linalg.svd(T, compute_uv=False)[0])

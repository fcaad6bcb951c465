"""Completely positive maps in Kraus form, with Choi and superoperator views.

Vectorization is row-major throughout: ``vec(A)[j*d + k] = A[j, k]``, i.e.
``A.ravel()``. Under this convention ``vec(K A L) = (K (x) L^T) vec(A)``, so
the superoperator of ``A -> sum_a K_a A K_a^H`` is ``sum_a K_a (x) conj(K_a)``.

The Choi matrix is the block matrix whose ``(j, k)`` block is ``Phi(E_jk)``,
i.e. ``sum_jk E_jk (x) Phi(E_jk)`` with the input factor first.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import PSD_TOL, as_matrix, is_psd

__all__ = [
    "TP_TOL",
    "Channel",
    "NotCompletelyPositiveError",
    "apply",
    "choi_of",
    "choi_of_linear_map",
    "kraus_from_choi",
    "channel_from_linear_map",
    "superop_matrix",
    "adjoint_channel",
    "tensor_channel",
    "compose",
    "identity_channel",
    "is_cp",
    "is_tp",
    "is_unital",
    "channel_to_dict",
    "channel_from_dict",
]

TP_TOL = 1e-9


class NotCompletelyPositiveError(ValueError):
    """Raised when a linear map fails the Choi positivity test."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True, eq=False)
class Channel:
    """A CP map ``rho -> sum_a K_a rho K_a^H``.

    ``kraus`` has shape ``(n_kraus, dim_out, dim_in)``. When
    ``trace_preserving`` is set, ``sum_a K_a^H K_a = I`` is checked to
    ``TP_TOL`` at construction.
    """

    kraus: np.ndarray
    trace_preserving: bool = False

    def __post_init__(self):
        kraus = np.array(self.kraus, dtype=complex)
        if kraus.ndim == 2:
            kraus = kraus[None]
        if kraus.ndim != 3 or kraus.shape[0] == 0:
            raise ValueError(f"Kraus operators must form a nonempty 3-d stack, got shape {kraus.shape}")
        if not np.all(np.isfinite(kraus)):
            raise ValueError("Kraus operators have non-finite entries")
        kraus.flags.writeable = False
        object.__setattr__(self, "kraus", kraus)
        if self.trace_preserving:
            err = _tp_defect(kraus)
            if err > TP_TOL:
                raise ValueError(f"channel flagged trace preserving but sum K^H K deviates from I by {err:.3e}")

    @property
    def dim_in(self):
        return self.kraus.shape[2]

    @property
    def dim_out(self):
        return self.kraus.shape[1]

    @property
    def n_kraus(self):
        return self.kraus.shape[0]

    def __call__(self, A):
        return apply(self, A)

    def __repr__(self):
        return (
            f"Channel(dim_in={self.dim_in}, dim_out={self.dim_out}, "
            f"n_kraus={self.n_kraus}, trace_preserving={self.trace_preserving})"
        )


def _tp_defect(kraus):
    s = np.einsum("aji,ajk->ik", kraus.conj(), kraus)
    return float(np.max(np.abs(s - np.eye(kraus.shape[2]))))


def apply(channel, A):
    """``Phi(A) = sum_a K_a A K_a^H``. Accepts a single matrix or a stack."""
    A = np.asarray(A, dtype=complex)
    if A.shape[-2:] != (channel.dim_in, channel.dim_in):
        raise ValueError(f"input of shape {A.shape} does not match dim_in={channel.dim_in}")
    K = channel.kraus
    return np.einsum("aij,...jk,alk->...il", K, A, K.conj())


def choi_of(channel):
    """Choi matrix ``sum_jk E_jk (x) Phi(E_jk)`` of side ``dim_in * dim_out``."""
    # v_a[(j, r)] = K_a[r, j]
    v = channel.kraus.transpose(0, 2, 1).reshape(channel.n_kraus, -1)
    return v.T @ v.conj()


def choi_of_linear_map(func, dim_in, dim_out=None):
    """Choi matrix of an arbitrary linear map given as a Python callable."""
    dim_out = dim_in if dim_out is None else dim_out
    C = np.zeros((dim_in, dim_in, dim_out, dim_out), dtype=complex)
    for j in range(dim_in):
        for k in range(dim_in):
            E = np.zeros((dim_in, dim_in), dtype=complex)
            E[j, k] = 1
            C[j, k] = func(E)
    return C.transpose(0, 2, 1, 3).reshape(dim_in * dim_out, dim_in * dim_out)


def kraus_from_choi(choi, dim_in, rank_tol=1e-10, psd_tol=PSD_TOL, trace_preserving=False):
    """Kraus decomposition from the eigendecomposition of a Choi matrix.

    Eigenpairs with ``lambda < rank_tol * lambda_max`` are dropped.

    Raises:
        NotCompletelyPositiveError: if the Choi matrix has an eigenvalue below
            ``-psd_tol * lambda_max``.
    """
    choi = as_matrix(choi)
    n = choi.shape[0]
    if n % dim_in:
        raise ValueError(f"Choi side {n} is not divisible by dim_in={dim_in}")
    dim_out = n // dim_in
    ok, lam_min = is_psd(choi, psd_tol)
    if not ok:
        raise NotCompletelyPositiveError(
            f"Choi matrix is not PSD (min eigenvalue {lam_min:.3e})", lam_min
        )
    ev, vec = np.linalg.eigh((choi + choi.conj().T) / 2)
    lam_max = max(float(ev[-1]), 0.0)
    keep = ev >= rank_tol * lam_max if lam_max > 0 else ev > 0
    if not np.any(keep):
        # zero map: keep a single zero Kraus operator
        return Channel(np.zeros((1, dim_out, dim_in)), trace_preserving=False)
    v = vec[:, keep] * np.sqrt(ev[keep])
    kraus = v.T.reshape(-1, dim_in, dim_out).transpose(0, 2, 1)
    return Channel(kraus[::-1], trace_preserving=trace_preserving)


def channel_from_linear_map(func, dim_in, dim_out=None, rank_tol=1e-10, psd_tol=PSD_TOL,
                            trace_preserving=None):
    """Build a :class:`Channel` from a linear callable, verifying complete positivity.

    ``trace_preserving=None`` sets the flag when the result is TP within ``TP_TOL``.
    """
    choi = choi_of_linear_map(func, dim_in, dim_out)
    ch = kraus_from_choi(choi, dim_in, rank_tol=rank_tol, psd_tol=psd_tol)
    tp = is_tp(ch) if trace_preserving is None else trace_preserving
    if tp:
        ch = Channel(ch.kraus, trace_preserving=True)
    return ch


def superop_matrix(channel):
    """Superoperator ``S`` with ``S @ A.ravel() == Phi(A).ravel()``."""
    K = channel.kraus
    n_out, n_in = channel.dim_out**2, channel.dim_in**2
    return np.einsum("aij,akl->ikjl", K, K.conj()).reshape(n_out, n_in)


def adjoint_channel(channel):
    """Hilbert-Schmidt adjoint ``B -> sum_a K_a^H B K_a``.

    The adjoint of a TP map is unital, so the TP flag is not carried over.
    """
    return Channel(channel.kraus.conj().transpose(0, 2, 1))


def tensor_channel(phi, omega):
    """``Phi (x) Omega`` with Kraus set ``{K_a (x) L_b}``."""
    K, L = phi.kraus, omega.kraus
    kraus = np.einsum("aij,bkl->abikjl", K, L).reshape(
        K.shape[0] * L.shape[0], K.shape[1] * L.shape[1], K.shape[2] * L.shape[2]
    )
    return Channel(kraus, trace_preserving=phi.trace_preserving and omega.trace_preserving)


def compose(outer, inner):
    """``outer o inner``."""
    if outer.dim_in != inner.dim_out:
        raise ValueError("dimension mismatch in composition")
    kraus = np.einsum("aij,bjk->abik", outer.kraus, inner.kraus)
    kraus = kraus.reshape(-1, outer.dim_out, inner.dim_in)
    return Channel(kraus, trace_preserving=outer.trace_preserving and inner.trace_preserving)


def identity_channel(d):
    return Channel(np.eye(d)[None], trace_preserving=True)


def is_cp(channel, tol=PSD_TOL):
    """Choi-matrix positivity test."""
    return is_psd(choi_of(channel), tol)[0]


def is_tp(channel, tol=TP_TOL):
    return _tp_defect(channel.kraus) <= tol


def is_unital(channel, tol=TP_TOL):
    K = channel.kraus
    if channel.dim_in != channel.dim_out:
        return False
    s = np.einsum("aij,akj->ik", K, K.conj())
    return float(np.max(np.abs(s - np.eye(channel.dim_out)))) <= tol


def channel_to_dict(channel):
    """JSON-ready dict: ``kraus`` is a list of matrices of ``[re, im]`` pairs."""
    return {
        "dim_in": int(channel.dim_in),
        "dim_out": int(channel.dim_out),
        "trace_preserving": bool(channel.trace_preserving),
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in K]
            for K in channel.kraus
        ],
    }


def channel_from_dict(data):
    """Inverse of :func:`channel_to_dict`, with shape validation.

    A ``choi`` entry (matrix of ``[re, im]`` pairs) may replace ``kraus``; it
    is decomposed with :func:`kraus_from_choi` and so must be PSD.
    """
    if "choi" in data:
        return _channel_from_choi_dict(data)
    try:
        dim_in, dim_out = int(data["dim_in"]), int(data["dim_out"])
        raw = np.asarray(data["kraus"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel description: {exc}") from exc
    if raw.ndim != 4 or raw.shape[1:] != (dim_out, dim_in, 2):
        raise ValueError(f"Kraus array has shape {raw.shape}, expected (n, {dim_out}, {dim_in}, 2)")
    kraus = raw[..., 0] + 1j * raw[..., 1]
    return Channel(kraus, trace_preserving=bool(data.get("trace_preserving", False)))


def _channel_from_choi_dict(data):
    try:
        dim_in = int(data["dim_in"])
        raw = np.asarray(data["choi"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel description: {exc}") from exc
    if raw.ndim != 3 or raw.shape[-1] != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"Choi array has shape {raw.shape}, expected (n, n, 2)")
    choi = raw[..., 0] + 1j * raw[..., 1]
    ch = kraus_from_choi(choi, dim_in)
    tp = data.get("trace_preserving")
    return Channel(ch.kraus, trace_preserving=is_tp(ch) if tp is None else bool(tp))

"""Constructors for the map families used throughout the package, and a small
string / dict spec format for naming them (``werner-holevo:3``,
``depolarizing:2:0.5``, ``qubit-canonical:t=0,0,0.3:lambda=0.5,0.5,0.4``)."""

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    Channel,
    channel_from_linear_map,
    identity_channel,
    is_tp,
)
from .conditions import FormParams
from .linalg import is_psd
from .qubit import QubitMapParams, qubit_channel

__all__ = [
    "ZooSpec",
    "FAMILIES",
    "diagonal_map",
    "qc_map",
    "werner_holevo",
    "werner_holevo_unnormalized",
    "form_map",
    "depolarizing",
    "extreme_cp",
    "random_channel",
    "convex_mixture",
    "qubit_canonical",
    "build",
    "parse_zoo_spec",
]


def diagonal_map(A):
    """Map with ``Phi(E_jk) = a_jk E_jk`` for a PSD matrix ``A``.

    Kraus operators are diagonal: with ``A = V diag(lam) V^H`` each eigenpair
    gives ``diag(sqrt(lam_r) V[:, r])``.
    """
    A = np.asarray(A, dtype=complex)
    ok, lam_min = is_psd(A)
    if not ok:
        raise ValueError(f"diagonal map needs a PSD matrix (min eigenvalue {lam_min:.3e})")
    lam, V = np.linalg.eigh((A + A.conj().T) / 2)
    keep = lam > 1e-12 * max(1.0, lam[-1])
    if not np.any(keep):
        raise ValueError("diagonal map needs a nonzero matrix")
    coeffs = (V[:, keep] * np.sqrt(lam[keep])).T
    kraus = np.stack([np.diag(c) for c in coeffs])
    tp = bool(np.allclose(np.diag(A).real, 1, atol=1e-12) and np.allclose(np.diag(A).imag, 0, atol=1e-12))
    return Channel(kraus, trace_preserving=tp and is_tp(Channel(kraus)))


def qc_map(D, trace_preserving=True):
    """Diagonal projection followed by the stochastic action of ``D``.

    Kraus set ``{sqrt(d_jl) E_jl}``.
    """
    D = np.asarray(D, dtype=float)
    d = D.shape[0]
    if D.shape != (d, d) or np.any(D < 0):
        raise ValueError("D must be a square entrywise-nonnegative matrix")
    if trace_preserving and np.max(np.abs(D.sum(axis=0) - 1)) > 1e-12:
        raise ValueError("D must be column stochastic for a trace-preserving QC map")
    kraus = []
    for j in range(d):
        for l in range(d):
            if D[j, l] > 0:
                K = np.zeros((d, d))
                K[j, l] = np.sqrt(D[j, l])
                kraus.append(K)
    if not kraus:
        raise ValueError("D must be nonzero")
    return Channel(np.array(kraus), trace_preserving=trace_preserving)


def werner_holevo(d):
    """``M -> ((Tr M) I - M^T) / (d - 1)`` with the antisymmetric Kraus set
    ``(E_jk - E_kj) / sqrt(d - 1)``, ``j < k``."""
    if d < 2:
        raise ValueError("Werner-Holevo map needs d >= 2")
    kraus = []
    for j in range(d):
        for k in range(j + 1, d):
            K = np.zeros((d, d))
            K[j, k], K[k, j] = 1, -1
            kraus.append(K / np.sqrt(d - 1))
    return Channel(np.array(kraus), trace_preserving=True)


def werner_holevo_unnormalized(d):
    """``M -> (Tr M) I - M^T``; CP but not trace preserving for d > 2."""
    ch = werner_holevo(d)
    return Channel(ch.kraus * np.sqrt(d - 1), trace_preserving=(d == 2))


def form_map(params):
    """Channel acting as ``params`` describes.

    Raises:
        NotCompletelyPositiveError: if the parameters do not give a CP map;
            ``min_eigenvalue`` carries the most negative Choi eigenvalue.
    """
    tp = params.is_trace_preserving()
    return channel_from_linear_map(params.action, params.dim, trace_preserving=tp)


def depolarizing(d, lam):
    """``rho -> lam rho + (1 - lam) Tr(rho) I / d``; CP for
    ``-1/(d**2 - 1) <= lam <= 1``."""
    lo = -1.0 / (d * d - 1)
    if not (lo - 1e-12 <= lam <= 1 + 1e-12):
        raise ValueError(f"depolarizing parameter {lam} outside the CP range [{lo:.6g}, 1]")

    def action(A):
        return lam * A + (1 - lam) * np.trace(A) * np.eye(d) / d

    return channel_from_linear_map(action, d, trace_preserving=True)


def extreme_cp(A):
    """Single-Kraus map ``rho -> A^H rho A``."""
    A = np.asarray(A, dtype=complex)
    if not np.any(A):
        raise ValueError("extreme map needs a nonzero operator")
    K = A.conj().T
    ch = Channel(K[None])
    return Channel(ch.kraus, trace_preserving=is_tp(ch))


def random_channel(d_in, d_out=None, kraus_count=2, seed=0):
    """Random CPT map: complex Gaussian Kraus operators right-normalized by
    ``(sum K^H K)^(-1/2)``."""
    d_out = d_in if d_out is None else d_out
    if min(d_in, d_out, kraus_count) < 1:
        raise ValueError("dimensions and Kraus count must be positive")
    if kraus_count * d_out < d_in:
        raise ValueError(f"{kraus_count} Kraus operators of size {d_out}x{d_in} cannot be trace preserving")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((kraus_count, d_out, d_in)) + 1j * rng.standard_normal((kraus_count, d_out, d_in))
    S = np.einsum("aji,ajk->ik", G.conj(), G)
    lam, V = np.linalg.eigh(S)
    inv_sqrt = (V / np.sqrt(lam)) @ V.conj().T
    return Channel(G @ inv_sqrt, trace_preserving=True)


def convex_mixture(channels, weights):
    """``sum_i w_i Phi_i`` for nonnegative weights."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or len(weights) != len(channels):
        raise ValueError("weights must be nonnegative, one per channel")
    kraus = np.concatenate([np.sqrt(w) * ch.kraus for w, ch in zip(weights, channels) if w > 0])
    tp = all(ch.trace_preserving for ch in channels) and abs(weights.sum() - 1) <= 1e-12
    return Channel(kraus, trace_preserving=tp)


def qubit_canonical(t, lam):
    """Qubit map ``I + w.sigma -> I + sum_k (t_k + lam_k w_k) sigma_k``.

    Raises ``NotCompletelyPositiveError`` if the parameters are not CP.
    """
    return qubit_channel(QubitMapParams(np.zeros(3), np.asarray(t, float), np.diag(np.asarray(lam, float))))


# --------------------------------------------------------------------------- #
#                                 specs                                        #
# --------------------------------------------------------------------------- #

FAMILIES = (
    "identity",
    "diagonal",
    "qc",
    "werner_holevo",
    "form",
    "depolarizing",
    "extreme",
    "qubit_canonical",
    "random",
)


@dataclass(frozen=True)
class ZooSpec:
    """A family name plus its parameters, e.g.
    ``ZooSpec("depolarizing", {"d": 2, "lambda": 0.5})``."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        fam = self.family.replace("-", "_")
        if fam not in FAMILIES:
            raise ValueError(f"unknown map family {self.family!r}")
        object.__setattr__(self, "family", fam)

    def to_dict(self):
        return {"family": self.family, "params": _jsonable(self.params)}

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], dict(data.get("params", {})))

    def build(self):
        return build(self)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        arr = np.asarray(obj)
        if np.iscomplexobj(arr):
            # complex entries as [re, im] pairs
            return np.stack([arr.real, arr.imag], axis=-1).tolist()
        return arr.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _matrix(value, dtype=complex):
    arr = np.asarray(value)
    if arr.ndim == 3 and arr.shape[-1] == 2 and not np.iscomplexobj(arr):
        arr = arr[..., 0] + 1j * arr[..., 1]
    if dtype is float:
        if np.iscomplexobj(arr) and np.any(arr.imag):
            raise ValueError("expected a real matrix")
        return np.asarray(arr.real if np.iscomplexobj(arr) else arr, dtype=float)
    return np.asarray(arr, dtype=complex)


def build(spec):
    """Construct the channel named by a :class:`ZooSpec`."""
    f, p = spec.family, spec.params
    if f == "identity":
        return identity_channel(int(p.get("d", 2)))
    if f == "diagonal":
        return diagonal_map(_matrix(p["A"]))
    if f == "qc":
        return qc_map(_matrix(p["D"], float))
    if f == "werner_holevo":
        return werner_holevo(int(p.get("d", 3)))
    if f == "form":
        return form_map(FormParams(_matrix(p["D"], float), _matrix(p["a"]), _matrix(p["eps"], float)))
    if f == "depolarizing":
        return depolarizing(int(p.get("d", 2)), float(p["lambda"]))
    if f == "extreme":
        return extreme_cp(_matrix(p["A"]))
    if f == "qubit_canonical":
        return qubit_canonical(p.get("t", (0, 0, 0)), p.get("lambda", (1, 1, 1)))
    if f == "random":
        d_in = int(p.get("d_in", 2))
        return random_channel(d_in, int(p.get("d_out", d_in)), int(p.get("kraus_count", 2)), int(p.get("seed", 0)))
    raise AssertionError(f)


def _parse_vector(text):
    return [float(x) for x in text.split(",")]


def _parse_matrix(text):
    """Rows separated by ``;``, entries by ``,``; entries may be complex (``1+2j``)."""
    rows = [[complex(x.replace(" ", "")) for x in row.split(",")] for row in text.split(";")]
    arr = np.array(rows)
    return arr.real if not np.any(arr.imag) else arr


def parse_zoo_spec(text):
    """Parse a compact spec string into a :class:`ZooSpec`.

    Grammar is ``family[:positional...][:key=value...]``::

        identity:2
        werner-holevo:3
        depolarizing:2:0.5
        diagonal:A=2,-1;-1,2
        qc:D=0.9,0.2;0.1,0.8
        extreme:A=1,0;0,0.5
        qubit-canonical:t=0,0,0.3:lambda=0.5,0.5,0.4
        random:3            (d_in, then optional d_out, kraus_count, seed)
        form:D=...:a=...:eps=...
    """
    parts = text.strip().split(":")
    family = parts[0].strip().replace("-", "_")
    if family not in FAMILIES:
        raise ValueError(f"unknown map family {parts[0]!r}")
    positional = [x for x in parts[1:] if "=" not in x]
    keyed = dict(x.split("=", 1) for x in parts[1:] if "=" in x)
    params = {}
    try:
        if family in ("identity", "werner_holevo"):
            if positional:
                params["d"] = int(positional[0])
        elif family == "depolarizing":
            params["d"] = int(positional[0]) if positional else int(keyed.get("d", 2))
            params["lambda"] = float(positional[1]) if len(positional) > 1 else float(keyed["lambda"])
        elif family == "random":
            names = ("d_in", "d_out", "kraus_count", "seed")
            for name, val in zip(names, positional):
                params[name] = int(val)
            for name in names:
                if name in keyed:
                    params[name] = int(keyed[name])
        elif family in ("diagonal", "extreme"):
            params["A"] = _parse_matrix(keyed["A"])
        elif family == "qc":
            params["D"] = _parse_matrix(keyed["D"])
        elif family == "form":
            params["D"] = _parse_matrix(keyed["D"])
            params["a"] = _parse_matrix(keyed["a"])
            params["eps"] = _parse_matrix(keyed["eps"])
        elif family == "qubit_canonical":
            params["t"] = _parse_vector(keyed.get("t", "0,0,0"))
            params["lambda"] = _parse_vector(keyed.get("lambda", "1,1,1"))
    except (KeyError, IndexError, ValueError) as exc:
        raise ValueError(f"malformed zoo spec {text!r}: {exc}") from exc
    return ZooSpec(family, params)

"""Multiplicativity experiments: p-sweeps over a pair of maps and a seeded
batch of pairs whose first factor satisfies the entrywise-positivity
condition."""

import csv
import io
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import brentq

from ._ascent import restart_rng
from .channels import NotCompletelyPositiveError
from .conditions import check_postr
from .norms import OptimizerConfig, bell_witness_ratio, mult_ratio, nu_p
from .zoo import (
    convex_mixture,
    diagonal_map,
    qc_map,
    qubit_canonical,
    random_channel,
    werner_holevo,
)

__all__ = [
    "SWEEP_FIELDS",
    "BATCH_FIELDS",
    "SweepRow",
    "BatchRow",
    "format_float",
    "sweep",
    "bell_crossing_bracket",
    "bell_crossing",
    "condition_family_pairs",
    "run_condition_batch",
    "rows_to_csv",
]

SWEEP_FIELDS = ("p", "nu_A", "nu_B", "nu_AB", "ratio", "bell_ratio", "converged")
BATCH_FIELDS = ("index", "family", "d_phi", "d_omega", "nu_A", "nu_B", "nu_AB", "ratio", "converged")
PAIR_FAMILIES = ("diagonal", "qc", "werner_holevo", "qubit_t3", "form_mixture")


@dataclass(frozen=True)
class SweepRow:
    p: float
    nu_A: float
    nu_B: float
    nu_AB: float
    ratio: float
    bell_ratio: float
    converged: bool


@dataclass(frozen=True)
class BatchRow:
    index: int
    family: str
    d_phi: int
    d_omega: int
    nu_A: float
    nu_B: float
    nu_AB: float
    ratio: float
    converged: bool


def format_float(x):
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def rows_to_csv(rows, fields):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        d = asdict(row) if not isinstance(row, dict) else row
        w.writerow([_cell(d[f]) for f in fields])
    return buf.getvalue()


def sweep(phi, omega, p_grid, cfg=OptimizerConfig(), joint=True):
    """One :class:`SweepRow` per ``p``.

    ``bell_ratio`` is the maximally-entangled-input lower bound on the
    multiplicativity ratio. With ``joint=False`` the expensive optimization
    over the tensor product is skipped and ``nu_AB``/``ratio`` are NaN.
    """
    rows = []
    for p in p_grid:
        p = float(p)
        if joint:
            m = mult_ratio(phi, omega, p, cfg)
            na, nb = m.nu_a, m.nu_b
            nu_ab, ratio, conv = m.nu_ab.value, m.ratio, m.converged
        else:
            na, nb = nu_p(phi, p, cfg), nu_p(omega, p, cfg)
            nu_ab, ratio = float("nan"), float("nan")
            conv = na.converged and nb.converged
        bell = bell_witness_ratio(phi, omega, p, na.value, nb.value)
        rows.append(SweepRow(p, na.value, nb.value, nu_ab, ratio, float(bell), bool(conv)))
    return rows


def bell_crossing_bracket(rows):
    """Consecutive grid points ``(p_lo, p_hi)`` where ``bell_ratio - 1``
    changes from ``<= 0`` to ``> 0``, or ``None``."""
    for a, b in zip(rows, rows[1:]):
        if a.bell_ratio <= 1 < b.bell_ratio:
            return a.p, b.p
    return None


def bell_crossing(phi, omega, p_lo, p_hi, cfg=OptimizerConfig(), xtol=1e-6):
    """Root of ``bell_ratio(p) = 1`` inside a bracketing interval."""

    def excess(p):
        return bell_witness_ratio(phi, omega, p, nu_p(phi, p, cfg).value, nu_p(omega, p, cfg).value) - 1

    return brentq(excess, p_lo, p_hi, xtol=xtol)


def _random_correlation(d, rng):
    v = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    v /= np.linalg.norm(v, axis=0)
    return v.conj().T @ v


def _random_stochastic(d, rng):
    return rng.dirichlet(np.ones(d), size=d).T


def _random_qubit_t3(rng):
    while True:
        lam = rng.uniform(-1, 1, 3)
        # canonical ordering |lam1| >= |lam2|; otherwise x[(0,1),(1,0)] < 0
        if abs(lam[0]) < abs(lam[1]):
            lam[[0, 1]] = lam[[1, 0]]
        t3 = rng.uniform(-0.5, 0.5)
        try:
            return qubit_canonical([0.0, 0.0, t3], lam)
        except NotCompletelyPositiveError:
            continue


def _make_phi(family, rng):
    if family == "diagonal":
        return diagonal_map(_random_correlation(int(rng.integers(2, 4)), rng))
    if family == "qc":
        return qc_map(_random_stochastic(int(rng.integers(2, 4)), rng))
    if family == "werner_holevo":
        return werner_holevo(int(rng.integers(2, 4)))
    if family == "qubit_t3":
        return _random_qubit_t3(rng)
    if family == "form_mixture":
        w = rng.uniform(0.1, 0.9)
        return convex_mixture([qc_map(_random_stochastic(3, rng)), werner_holevo(3)], [w, 1 - w])
    raise ValueError(f"unknown family {family!r}")


def condition_family_pairs(count=30, seed=0):
    """``count`` seeded pairs ``(family, Phi, Omega)``.

    ``Phi`` cycles through diagonal, QC, Werner-Holevo, qubit maps with
    ``t1 = t2 = 0`` and mixtures of QC with Werner-Holevo maps, and is checked
    to satisfy the positivity condition at ``U = I``. ``Omega`` is a random
    CPT map on ``C^2`` or ``C^3``.
    """
    pairs = []
    for i in range(count):
        rng = restart_rng(seed, i)
        family = PAIR_FAMILIES[i % len(PAIR_FAMILIES)]
        phi = _make_phi(family, rng)
        if not check_postr(phi).holds:
            raise AssertionError(f"pair {i}: {family} map fails the positivity condition")
        d_omega = int(rng.integers(2, 4))
        omega = random_channel(d_omega, d_omega, int(rng.integers(1, 4)), seed=int(rng.integers(2**31)))
        pairs.append((family, phi, omega))
    return pairs


def run_condition_batch(count=30, seed=0, p=2.0, restarts=200):
    """``mult_ratio`` at ``p`` for each pair of :func:`condition_family_pairs`."""
    cfg = replace(OptimizerConfig(), restarts=restarts, seed=seed)
    rows = []
    for i, (family, phi, omega) in enumerate(condition_family_pairs(count, seed)):
        m = mult_ratio(phi, omega, p, cfg)
        rows.append(BatchRow(i, family, phi.dim_in, omega.dim_in, m.nu_a.value, m.nu_b.value,
                             m.nu_ab.value, m.ratio, m.converged))
    return rows

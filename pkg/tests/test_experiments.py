import numpy as np
import pytest

from cpnorm.channels import identity_channel
from cpnorm.conditions import check_postr
from cpnorm.experiments import (
    BATCH_FIELDS,
    SWEEP_FIELDS,
    bell_crossing,
    bell_crossing_bracket,
    condition_family_pairs,
    format_float,
    rows_to_csv,
    run_condition_batch,
    sweep,
)
from cpnorm.norms import OptimizerConfig
from cpnorm.zoo import diagonal_map, werner_holevo

FAST = OptimizerConfig(restarts=8)


def test_format_float_round_trips():
    for x in (0.1, 1 / 3, 2.0**-40, 1e300):
        assert float(format_float(x)) == x


def test_sweep_identity_pair():
    rows = sweep(identity_channel(2), identity_channel(2), [1, 2, 3], FAST)
    assert [r.p for r in rows] == [1, 2, 3]
    assert all(abs(r.ratio - 1) <= 1e-9 and abs(r.bell_ratio - 1) <= 1e-9 for r in rows)


def test_sweep_diagonal_pair():
    A = np.array([[1, 0.4], [0.4, 1]])
    B = np.array([[1, -0.2j], [0.2j, 1]])
    rows = sweep(diagonal_map(A), diagonal_map(B), [1, 2, 3], FAST)
    assert all(abs(r.ratio - 1) <= 1e-5 for r in rows)


def test_werner_holevo_bell_crossing():
    wh = werner_holevo(3)
    grid = np.round(np.arange(4.0, 5.2001, 0.1), 10)
    rows = sweep(wh, wh, grid, FAST, joint=False)
    lo, hi = bell_crossing_bracket(rows)
    assert 4.7 <= lo < hi <= 4.9
    root = bell_crossing(wh, wh, lo, hi, FAST)
    assert root == pytest.approx(4.7823, abs=1e-3)


def test_bracket_none_without_crossing():
    rows = sweep(identity_channel(2), identity_channel(2), [1, 2], FAST, joint=False)
    assert bell_crossing_bracket(rows) is None


def test_csv_layout():
    rows = sweep(identity_channel(2), identity_channel(2), [2], FAST, joint=False)
    text = rows_to_csv(rows, SWEEP_FIELDS)
    header, line = text.splitlines()
    assert header == "p,nu_A,nu_B,nu_AB,ratio,bell_ratio,converged"
    assert line.split(",")[3] == "nan" and line.endswith("true")


def test_family_pairs_satisfy_condition():
    pairs = condition_family_pairs(30, seed=0)
    assert len(pairs) == 30
    assert {f for f, _, _ in pairs} == {"diagonal", "qc", "werner_holevo", "qubit_t3", "form_mixture"}
    for _, phi, omega in pairs:
        assert check_postr(phi).holds
        assert phi.dim_in <= 3 and omega.dim_in <= 3


def test_batch_is_deterministic():
    a = rows_to_csv(run_condition_batch(3, seed=4, restarts=4), BATCH_FIELDS)
    b = rows_to_csv(run_condition_batch(3, seed=4, restarts=4), BATCH_FIELDS)
    assert a == b
    assert a.splitlines()[0] == ",".join(BATCH_FIELDS)

"""Qubit maps in Bloch form.

A qubit map sends I + w.sigma to (1 + s.w) I + (t + T w).sigma. Rotations
on both sides diagonalize T. The eigenvalues of Phi(A)^H Phi(A) then have a
closed form in the Bloch vectors of A = z0 I + (w + i u).sigma.

The pointwise bound ||Phi(A)||_p / ||A||_p <= ||Phi(I + w_hat.sigma)||_p / 2
with w_hat = Re(z)/|Re(z)| holds for unital maps. The last part of this
script shows it failing for amplitude damping.
"""

import numpy as np

from cpnorm import (
    Channel,
    bloch_compose,
    canonical_channel,
    eig_PhiA_general,
    qubit_map_params,
    random_channel,
    verify_strong_inequality,
)

ch = random_channel(2, 2, 3, seed=4)
params = qubit_map_params(ch)
print("t =", np.round(params.t, 6))
print("T =\n", np.round(params.T, 6))

canon, form = canonical_channel(ch)
print("canonical lambdas:", np.round(form.lambdas, 6))

rng = np.random.default_rng(0)
w, u = rng.standard_normal(3), rng.standard_normal(3)
A = bloch_compose(1, w, u)
B = ch(A)
print("closed form eigenvalues:", eig_PhiA_general(params, w, u))
print("dense eigenvalues:      ", np.linalg.eigvalsh(B.conj().T @ B))

gamma = 0.5
damping = Channel(np.array([[[1, 0], [0, np.sqrt(1 - gamma)]], [[0, np.sqrt(gamma)], [0, 0]]]),
                  trace_preserving=True)
A = np.diag([0.5, 1.5])
res = verify_strong_inequality(damping, A, 2)
print(f"amplitude damping, A = diag(0.5, 1.5): lhs {res.lhs:.5f} rhs {res.rhs:.5f} holds={res.holds}")

depol = Channel(np.sqrt([0.7, 0.1, 0.1, 0.1])[:, None, None] * np.array(
    [np.eye(2), [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]]), trace_preserving=True)
As = rng.standard_normal((1000, 2, 2)) + 1j * rng.standard_normal((1000, 2, 2))
print("unital (depolarizing) map, 1000 random A:",
      bool(np.all(verify_strong_inequality(depol, As, 3).holds)))

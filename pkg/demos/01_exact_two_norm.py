"""The 2 -> 2 norm of a CP map is exact and multiplicative.

The norm sup ||Phi(A)||_2 / ||A||_2 is the top singular value of the
superoperator matrix, and singular values of a Kronecker product multiply.
The top singular vector can be taken self-adjoint, so restricting to
Hermitian inputs gives the same value.
"""

import numpy as np

from cpnorm import (
    OptimizerConfig,
    norm_2_to_2_exact,
    norm_q_to_p,
    random_channel,
    tensor_channel,
    top_singular_operator,
    werner_holevo,
)

phi = random_channel(3, 3, 2, seed=11)
omega = werner_holevo(3)

a, b = norm_2_to_2_exact(phi), norm_2_to_2_exact(omega)
ab = norm_2_to_2_exact(tensor_channel(phi, omega))
print(f"||Phi||_2->2 = {a:.12f}")
print(f"||Omega||_2->2 = {b:.12f}")
print(f"||Phi (x) Omega||_2->2 = {ab:.12f}  (product {a * b:.12f})")

sigma, _, H = top_singular_operator(phi)
print(f"top singular vector is Hermitian: {np.allclose(H, H.conj().T)}")

opt = norm_q_to_p(phi, 2, 2, "self_adjoint", OptimizerConfig(restarts=32))
print(f"optimizer over Hermitian inputs: {opt.value:.12f} (exact {sigma:.12f})")

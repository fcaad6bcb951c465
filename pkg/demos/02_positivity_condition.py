"""Entrywise positivity of Tr Phi(E_ik)^H Phi(E_jl) and nu_2 multiplicativity.

When every entry of the condition matrix is real and nonnegative, nu_2 is
multiplicative on Phi (x) Omega for any CP map Omega. This script checks the
condition for a few map families and compares nu_2 of the product with the
product of the nu_2 values.
"""

import numpy as np

from cpnorm import (
    OptimizerConfig,
    check_postr,
    diagonal_map,
    mult_ratio,
    qc_map,
    random_channel,
    search_basis,
    werner_holevo,
)

cfg = OptimizerConfig(restarts=64)
omega = random_channel(2, 2, 2, seed=3)
maps = {
    "diagonal": diagonal_map(np.array([[1, 0.4], [0.4, 1]])),
    "quantum-classical": qc_map(np.array([[0.9, 0.3], [0.1, 0.7]])),
    "Werner-Holevo d=3": werner_holevo(3),
}
for name, phi in maps.items():
    chk = check_postr(phi)
    m = mult_ratio(phi, omega, 2, cfg)
    print(f"{name:20s} condition holds={chk.holds}  min entry {chk.min_entry:+.3f}  "
          f"nu_2 ratio {m.ratio:.12f}")

# A generic map usually fails at U = I; a basis search may or may not help.
generic = random_channel(2, 2, 2, seed=8)
print("random qubit map at U=I:", check_postr(generic).holds)
res = search_basis(generic, restarts=8, seed=0)
print(f"after basis search: holds={res.holds}  min entry {res.min_entry:+.2e}  "
      f"imag {res.max_imag:.1e}")

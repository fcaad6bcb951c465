"""Why a bipartite bound built from Tr_2 blocks fails to be a state.

For a Bell state Gamma on C^2 (x) C^2 with blocks M_jk, the 2 x 2 matrix of
coefficients Tr Omega(M_jk)^H Omega(M_kk) / ||Omega(M_kk)||_2 is formed for the
identity channel. It has a negative eigenvalue, so it is not positive
semidefinite, though its trace norm is still 2 sqrt 3.
"""

import numpy as np

from cpnorm import bell_obstruction

res = bell_obstruction()
print("N =\n", np.round(res.N, 12))
print("eigenvalues:", np.round(res.eigenvalues, 12), "(expected 1 -+ sqrt 3)")
print("positive semidefinite:", res.is_psd)
print(f"trace norm {res.trace_norm:.15f} vs 2 sqrt 3 = {2 * np.sqrt(3):.15f}")

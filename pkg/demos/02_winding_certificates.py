# %% [markdown]
# Winding pairings and certificates
# =================================
#
# Pair the pullback with an explicit 2-cycle. On Z^2 the torus cycle
# ``[a|b] - [b|a]`` pairs to 1 once the defects are small enough for the
# logarithm to be defined, and a genuine representation pairs to 0.

# %%
import json

import numpy as np

from asymrep import AsymptoticRep, certify_nonstable, load_group_data, recheck_certificate, winding_pair
from asymrep.matrix_core import random_unitary

z2 = load_group_data("z2")
print("cycle:", z2.cycle)
for n in (4, 6, 7, 8, 64):
    res = winding_pair(AsymptoticRep(n, z2.alpha, z2.beta), z2.cycle)
    print(f"n={n:<3d} valid={res.valid!s:<5} value={res.rounded}  max defect {res.max_defect:.4f}")

# %% [markdown]
# A commuting pair conjugated by a random unitary is a genuine representation.

# %%
rng = np.random.default_rng(1)
Q = random_unitary(8, rng)
A = (Q * np.exp(2j * np.pi * rng.random(8))) @ Q.conj().T
B = (Q * np.exp(2j * np.pi * rng.random(8))) @ Q.conj().T


def genuine(w):
    i, j = w.exponent_sums(2)
    return np.linalg.matrix_power(A, i) @ np.linalg.matrix_power(B, j)


print("genuine pairing:", winding_pair(genuine, z2.cycle).rounded)

# %% [markdown]
# Certificates inline every input, so they can be recomputed from the JSON
# alone. Thompson's group F gets its cycle by pushing the torus cycle forward
# along a splitting.

# %%
F = load_group_data("thompson_f")
cert = certify_nonstable(F.group, F.alpha, F.beta, F.cycle, [8, 16, 32])
print(cert.conclusion())
ok, _ = recheck_certificate(json.loads(cert.dumps()))
print("recheck:", ok)

# %%
S = load_group_data("surface_genus2")
print("genus 2 cycle has", len(S.cycle), "cells; verdict",
      certify_nonstable(S.group, S.alpha, S.beta, S.cycle, [16]).verdict)

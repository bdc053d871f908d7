# %% [markdown]
# Voiculescu pullbacks and their defects
# ======================================
#
# The shift ``u_n`` and the clock ``v_n`` fail to commute by a root of unity.
# Pulling them back along two integer homomorphisms gives a map on any group
# whose multiplicative defect is an exact scalar.

# %%
import math

import numpy as np

from asymrep import AsymptoticRep, load_group_data, make_u, make_v, twist_defect
from asymrep.voiculescu import defect_bound, defect_norm

n = 6
u, v = make_u(n), make_v(n)
print(np.round(u.real).astype(int))
print(np.round(np.angle(np.diagonal(v)) / (2 * np.pi) * n).astype(int) % n)
print("v u == w u v:", np.allclose(v @ u, np.exp(2j * np.pi / n) * u @ v))

# %% [markdown]
# On Z^2 with alpha = (1, 0) and beta = (0, 1) the map is ``a^i b^j -> u^i v^j``.
# The defect at ``(g, h)`` only depends on ``m = beta(g) alpha(h)``.

# %%
z2 = load_group_data("z2")
R = AsymptoticRep(8, z2.alpha, z2.beta)
D = twist_defect(R, "b^2", "a^3")
print("scalar defect:", np.round(D[0, 0], 12), " expected:", np.round(np.exp(-2j * np.pi * 6 / 8), 12))
print("off-diagonal mass:", np.abs(D - np.diag(np.diagonal(D))).max())

# %% [markdown]
# Schatten norms of the defect scale like ``n^(1/p - 1)``: they vanish for
# ``p > 1`` and tend to ``2 pi |m|`` for the trace norm.

# %%
ns = 2 ** np.arange(4, 13)
a, b = z2.group.parse("a"), z2.group.parse("b")
for p in (1, 2, 4, math.inf):
    d = np.array([defect_norm(AsymptoticRep(int(n), z2.alpha, z2.beta), b, a, p) for n in ns])
    slope = np.polyfit(np.log(ns), np.log(d), 1)[0]
    print(f"p={p!s:>4}: defect at n=4096 {d[-1]:.6g}, log-log slope {slope:+.4f}")

# %%
print("bound is tight:", [round(defect_norm(AsymptoticRep(int(n), z2.alpha, z2.beta), b, a, math.inf)
                               / defect_bound(int(n), 1, math.inf), 6) for n in ns[::3]])

# %% [markdown]
# Looking for a nearby genuine representation
# ===========================================
#
# The certificate says no genuine representation gets within 1/24 of the
# pullback on ``{a, b, ab}``. A local search over pairs of unitaries probes
# how far the nearest one actually is.

# %%
import numpy as np

from asymrep import AsymptoticRep, load_group_data
from asymrep.group_model import check_hom
from asymrep.perturb import (
    SearchProblem,
    TableTarget,
    best_report,
    make_problem,
    oracle_min_distance_scalar,
    run_searches,
)

z2 = load_group_data("z2")
P = make_problem(z2, AsymptoticRep(16, z2.alpha, z2.beta), budget=20_000)
reports = run_searches(P, range(4), starts=["warm", "random", "random", "random"])
for r in reports:
    print(f"seed {r.seed} ({r.start:6s}) distance {r.best_distance_inf:.6f}  relator {r.relator_defect:.1e}")
print("closest exact representation found:", best_report(reports).best_distance_inf, ">= 1/24 =", 1 / 24)

# %% [markdown]
# With ``beta = 0`` the pullback is already a representation and the search
# stays put.

# %%
R0 = AsymptoticRep(16, z2.alpha, check_hom(z2.group, [0, 0]))
print("control:", run_searches(make_problem(z2, R0), [0, 1])[1].best_distance_inf)

# %% [markdown]
# In dimension one every representation is a pair of phases, so a grid is an
# exact oracle. The target below is not multiplicative on ``ab``.

# %%
T = TableTarget(z2.group, {"a": 1, "b": -1, "a b": 1})
P1 = SearchProblem(z2.group, T, ["a", "b", "a b"])
for res in (0.1, 0.01, 0.001):
    print(f"grid {res:g}: {oracle_min_distance_scalar(P1, res):.6f}")
print("search:", best_report(run_searches(P1, range(3))).best_distance_inf)

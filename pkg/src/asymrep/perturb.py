"""Numerical search for a genuine representation close to a given unitary-valued map.

The search runs in two phases.

1. *Penalty phase.* One unitary per generator, extended multiplicatively to
   words. Minimise a smooth surrogate of the support distance (a soft maximum
   of squared Frobenius distances, with the temperature lowered in stages)
   plus ``lam`` times the squared Frobenius relator defects. Steps follow the
   Riemannian conjugate gradient on the product of unitary groups, retracted
   through the matrix exponential, with Armijo backtracking.
2. *Polish phase* (abelian groups only). Jointly diagonalise the candidate to
   get an exact commuting family ``Q diag(exp(i theta_g)) Q^*`` and continue
   the descent over ``(Q, theta)``, which stays an exact representation.

Everything reported (``best_distance_inf``, ``relator_defect``) is measured
again in operator norm; the surrogate only steers the descent.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from .errors import InvalidParameterError
from .group_model import GroupData
from .matrix_core import expm_skew, nearest_unitary, operator_norm, random_unitary, unitarity_error

TEMPERATURES = (1.0, 1e-1, 1e-2, 1e-3)
ARMIJO = 1e-4
GRAD_TOL = 1e-11
STALL_WINDOW = 50
STALL_RTOL = 1e-10
REORTHO_EVERY = 100
POLISH_CAP = 5000
CONVERGED_RELATOR_TOL = 1e-8


class TableTarget:
    """Target map given by an explicit table ``word -> matrix``."""

    def __init__(self, group, table):
        self.group = group
        self.table = {}
        for w, M in table.items():
            w = group.normalize(group.parse(w) if isinstance(w, str) else w)
            self.table[w] = np.atleast_2d(np.asarray(M, dtype=np.complex128))

    def __call__(self, w):
        w = self.group.normalize(self.group.parse(w) if isinstance(w, str) else w)
        try:
            return self.table[w]
        except KeyError:
            raise KeyError(f"target has no value at {self.group.format(w)}") from None


@dataclass
class SearchProblem:
    group: GroupData
    target: object
    support: list
    lam: float = 10.0
    budget: int = 10_000

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidParameterError("penalty weight must be positive")
        if self.budget < 1:
            raise InvalidParameterError("budget must be at least 1")
        G = self.group
        self.support = [G.normalize(G.parse(w) if isinstance(w, str) else w) for w in self.support]
        self.targets = [np.asarray(self.target(w), dtype=np.complex128) for w in self.support]
        self.n = self.targets[0].shape[0]

    def warm_start(self):
        return [np.array(self.target(self.group.gen(i)), dtype=np.complex128) for i in range(self.group.ngens)]


def make_problem(dataset, target, cycle=None, support=None, lam=10.0, budget=10_000):
    """Search problem on ``dataset.group``; the support defaults to ``cycle``'s support."""
    if support is None:
        cycle = cycle if cycle is not None else dataset.cycle
        support = cycle.support()
    return SearchProblem(dataset.group, target, list(support), lam, budget)


# -- evaluation ----------------------------------------------------------


def evaluate_word(mats, w):
    n = mats[0].shape[0]
    P = np.eye(n, dtype=np.complex128)
    for g, e in w.letters:
        M = mats[g] if e > 0 else mats[g].conj().T
        P = P @ np.linalg.matrix_power(M, abs(e))
    return P


def support_distance(mats, P):
    return max(operator_norm(evaluate_word(mats, w) - T) for w, T in zip(P.support, P.targets))


def relator_defect(mats, group):
    if not group.relators:
        return 0.0
    n = mats[0].shape[0]
    eye = np.eye(n)
    return max(operator_norm(evaluate_word(mats, r) - eye) for r in group.relators)


def objective(candidate, P):
    """``max_w ||pi(w) - target(w)||_inf + lam * max_r ||pi(r) - I||_inf``."""
    mats = [np.asarray(U, dtype=np.complex128) for U in candidate]
    if mats[0].shape[0] != P.n:
        raise InvalidParameterError("candidate dimension does not match the target")
    return support_distance(mats, P) + P.lam * relator_defect(mats, P.group)


def _sq_dist_and_grad(mats, w, T):
    """``||pi(w) - T||_F^2`` and its Euclidean gradient with respect to each generator."""
    seq = w.signed_letters()
    n = mats[0].shape[0]
    letters = [mats[g] if s > 0 else mats[g].conj().T for g, s in seq]
    prefix = [np.eye(n, dtype=np.complex128)]
    for L in letters:
        prefix.append(prefix[-1] @ L)
    suffix = [np.eye(n, dtype=np.complex128)]
    for L in reversed(letters):
        suffix.append(L @ suffix[-1])
    suffix.reverse()
    R = prefix[-1] - T
    grads = {}
    for i, (g, s) in enumerate(seq):
        A, B = prefix[i], suffix[i + 1]
        contrib = 2.0 * (A.conj().T @ R @ B.conj().T if s > 0 else B @ R.conj().T @ A)
        grads[g] = grads.get(g, 0) + contrib
    return float(np.vdot(R, R).real), grads


def _softmax(values, tau):
    v = np.asarray(values) / tau
    m = v.max()
    e = np.exp(v - m)
    return tau * (m + math.log(e.sum())), e / e.sum()


def _skew(X):
    return 0.5 * (X - X.conj().T)


class _Exp:
    """``t -> exp(t D)`` for skew-Hermitian ``D``, diagonalised once."""

    def __init__(self, D):
        H = -1j * D
        w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
        self.w, self.V = w, V

    def __call__(self, t):
        return (self.V * np.exp(1j * t * self.w)) @ self.V.conj().T


def _inner(g, d):
    return sum(float(np.vdot(a, b).real) for a, b in zip(g, d))


# -- penalty phase -------------------------------------------------------


def _penalty_value_grad(mats, P, tau):
    dists, dgrads = [], []
    for w, T in zip(P.support, P.targets):
        d, gr = _sq_dist_and_grad(mats, w, T)
        dists.append(d)
        dgrads.append(gr)
    value, weights = _softmax(dists, tau)
    k = len(mats)
    G = [np.zeros_like(mats[0]) for _ in range(k)]
    for wt, gr in zip(weights, dgrads):
        for g, M in gr.items():
            G[g] += wt * M
    eye = np.eye(P.n)
    for r in P.group.relators:
        d, gr = _sq_dist_and_grad(mats, r, eye)
        value += P.lam * d
        for g, M in gr.items():
            G[g] += P.lam * M
    return value, G


def _penalty_value(mats, P, tau):
    dists = [float(np.linalg.norm(evaluate_word(mats, w) - T) ** 2) for w, T in zip(P.support, P.targets)]
    value = _softmax(dists, tau)[0]
    eye = np.eye(P.n)
    for r in P.group.relators:
        value += P.lam * float(np.linalg.norm(evaluate_word(mats, r) - eye) ** 2)
    return value


def _descend(x, value_grad, value_at, retract, budget, history, stage, monitor=None):
    """Nonlinear conjugate gradients (Polak-Ribiere+) with Armijo backtracking.

    ``value_grad(x) -> (f, g)`` with ``g`` a list of arrays (tangent vectors,
    left-trivialised for unitary factors); ``retract(x, d)`` returns a curve
    ``t -> point``. Falls back to steepest descent whenever the conjugate
    direction is not a descent direction, so ``f`` never increases.
    Returns ``(x, iterations, reason)``.
    """
    f, g = value_grad(x)
    history.append((stage, f))
    gg = _inner(g, g)
    d = [-a for a in g]
    t = 1.0
    recent = [f]
    it = 0
    while it < budget:
        if gg < GRAD_TOL ** 2:
            return x, it, "stationary"
        slope = _inner(g, d)
        if slope >= -1e-3 * math.sqrt(gg * _inner(d, d)):
            d = [-a for a in g]
            slope = -gg
        curve = retract(x, d)
        t = min(2.0 * t, 1e3)
        while True:
            y = curve(t)
            fy = value_at(y)
            if fy <= f + ARMIJO * t * slope:
                break
            t *= 0.5
            if t < 1e-18:
                return x, it, "stationary"
        x = y
        it += 1
        if monitor is not None:
            monitor(x)
        f, g_new = value_grad(x)
        gg_new = _inner(g_new, g_new)
        beta = max(0.0, (gg_new - _inner(g_new, g)) / gg)
        d = [-a + beta * b for a, b in zip(g_new, d)]
        g, gg = g_new, gg_new
        history.append((stage, f))
        recent.append(f)
        if len(recent) > STALL_WINDOW:
            old = recent.pop(0)
            if old - f <= STALL_RTOL * max(1.0, abs(old)):
                return x, it, "stalled"
    return x, it, "budget"


def _kick(mats, rng, size=1e-2):
    """Small random unitary perturbation, used to leave an exact critical point."""
    out = []
    for U in mats:
        n = U.shape[0]
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out.append(U @ expm_skew(size * _skew(X)))
    return out


def _unitarity_bound(U):
    """Frobenius norm of ``U^* U - I``; an upper bound for the operator norm, one product cheap."""
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))


def _penalty_phase(mats, P, budget, history, stages, rng, monitor=None):
    used = 0
    reason = "budget"
    state = {"count": 0}
    for i, tau in enumerate(TEMPERATURES):
        if used >= budget:
            reason = "budget"
            break

        def value_grad(xs, tau=tau):
            f, G = _penalty_value_grad(xs, P, tau)
            return f, [_skew(U.conj().T @ Gk) for U, Gk in zip(xs, G)]

        def retract(xs, d):
            exps = [_Exp(D) for D in d]

            def curve(t):
                out = [U @ E(t) for U, E in zip(xs, exps)]
                state["count"] += 1
                if state["count"] % REORTHO_EVERY == 0:
                    out = [nearest_unitary(U) for U in out]
                return out

            return curve

        def value_at(xs, tau=tau):
            return _penalty_value(xs, P, tau)

        label = f"penalty tau={tau:g}"
        mats, it, reason = _descend(mats, value_grad, value_at, retract, budget - used, history, label, monitor)
        if i == 0 and it == 0 and reason == "stationary" and objective(mats, P) > 1e-12:
            # the start is an exact critical point (e.g. a saddle) but not a minimum
            mats = _kick(mats, rng)
            stages.append({"stage": label, "iterations": 0, "stop": "kicked"})
            label += " after kick"
            mats, it, reason = _descend(mats, value_grad, value_at, retract, budget - used, history, label, monitor)
        used += it
        stages.append({"stage": label, "iterations": it, "stop": reason})
    return mats, used, reason


# -- polish phase (exact commuting families) -----------------------------


def joint_diagonalize(mats, rng):
    """Unitary ``Q`` approximately diagonalising every matrix in a nearly commuting family.

    Taken from the Schur basis of a random complex combination, which is an
    exact common eigenbasis when the family commutes and the combination has
    simple spectrum.
    """
    c = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    M = sum(ci * U for ci, U in zip(c, mats))
    _, Q = scipy.linalg.schur(M, output="complex")
    return Q


def _exact_from(Q, thetas, w):
    phi = np.zeros(Q.shape[0])
    for g, e in w.letters:
        phi = phi + e * thetas[g]
    return (Q * np.exp(1j * phi)) @ Q.conj().T


def _polish_dists(Q, thetas, P):
    out = []
    for w, T in zip(P.support, P.targets):
        phi = np.zeros(P.n)
        for g, e in w.letters:
            phi = phi + e * thetas[g]
        D = np.exp(1j * phi)
        M = Q.conj().T @ T @ Q
        d = P.n + float(np.vdot(T, T).real) - 2.0 * float(np.sum(np.conj(D) * np.diagonal(M)).real)
        out.append((max(d, 0.0), w, D, M, T))
    return out


def _polish_phase(mats, P, budget, history, stages, rng, monitor=None):
    Q = joint_diagonalize(mats, rng)
    thetas = [np.angle(np.diagonal(Q.conj().T @ U @ Q)) for U in mats]
    x = (Q, thetas)
    used = 0
    reason = "budget"
    state = {"count": 0}
    for tau in TEMPERATURES:
        if used >= budget:
            break

        def value_grad(x, tau=tau):
            Q, thetas = x
            terms = _polish_dists(Q, thetas, P)
            f, weights = _softmax([t[0] for t in terms], tau)
            GQ = np.zeros_like(Q)
            gth = [np.zeros(P.n) for _ in thetas]
            for wt, (_, w, D, M, T) in zip(weights, terms):
                dphi = -2.0 * np.imag(np.conj(D) * np.diagonal(M))
                for g, e in w.letters:
                    gth[g] += wt * e * dphi
                GQ += wt * (-2.0) * (T @ Q * np.conj(D) + T.conj().T @ Q * D)
            return f, [_skew(Q.conj().T @ GQ)] + gth

        def value_at(x, tau=tau):
            return _softmax([t[0] for t in _polish_dists(x[0], x[1], P)], tau)[0]

        def retract(x, d):
            E = _Exp(d[0])

            def curve(t):
                Q = x[0] @ E(t)
                state["count"] += 1
                if state["count"] % REORTHO_EVERY == 0:
                    Q = nearest_unitary(Q)
                return Q, [th + t * dth for th, dth in zip(x[1], d[1:])]

            return curve

        x, it, reason = _descend(
            x, value_grad, value_at, retract, budget - used, history, f"polish tau={tau:g}",
            None if monitor is None else (lambda x: monitor([x[0]])),
        )
        used += it
        stages.append({"stage": f"polish tau={tau:g}", "iterations": it, "stop": reason})
    Q, thetas = x
    exact = [_exact_from(Q, thetas, P.group.gen(i)) for i in range(len(thetas))]
    return exact, used, reason


# -- driver --------------------------------------------------------------


@dataclass
class PerturbationReport:
    best_distance_inf: float
    relator_defect: float
    iterations: int
    converged: bool
    seed: int
    start: str
    objective: float
    max_unitarity_error: float
    trajectory: list = field(default_factory=list)
    history: list = field(default_factory=list, repr=False)
    candidate: list = field(default_factory=list, repr=False)

    def to_json(self):
        return {
            "seed": self.seed,
            "start": self.start,
            "best_distance_inf": self.best_distance_inf,
            "relator_defect": self.relator_defect,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "max_unitarity_error": self.max_unitarity_error,
            "trajectory": self.trajectory,
        }


def search(P, seed=0, start=None, polish=None, keep_history=False):
    """Local search for a representation close to ``P.target`` on ``P.support``.

    ``start`` is ``"warm"`` (the target's own generator values) or
    ``"random"`` (Haar unitaries); by default seed 0 starts warm and other
    seeds start at random. ``polish`` defaults to on for abelian groups.
    Deterministic given ``seed``. Exhausting the budget is not an error: the
    report simply has ``converged=False``.
    """
    rng = np.random.default_rng(seed)
    if start is None:
        start = "warm" if seed == 0 else "random"
    if start == "warm":
        mats = [nearest_unitary(M) for M in P.warm_start()]
    elif start == "random":
        mats = [random_unitary(P.n, rng) for _ in range(P.group.ngens)]
    else:
        raise InvalidParameterError(f"unknown start {start!r}")
    if polish is None:
        polish = P.group.normal_form == "abelian"

    history, stages = [], []
    track = {"unitarity": max(unitarity_error(U) for U in mats)}

    def monitor(xs):
        track["unitarity"] = max(track["unitarity"], max(_unitarity_bound(U) for U in xs))

    def measure(xs, label):
        track["unitarity"] = max(track["unitarity"], max(unitarity_error(U) for U in xs))
        d, r = support_distance(xs, P), relator_defect(xs, P.group)
        return {"after": label, "distance_inf": d, "relator_defect": r, "objective": d + P.lam * r}

    mats, used, reason = _penalty_phase(mats, P, P.budget, history, stages, rng, monitor)
    best = measure(mats, "penalty")
    best_mats = mats
    trajectory = list(stages)
    trajectory.append(best)
    final_reason = reason
    if polish:
        stages.clear()
        # the polish cap is separate from the penalty budget
        exact, used_p, final_reason = _polish_phase(mats, P, min(POLISH_CAP, P.budget), history, stages, rng, monitor)
        used += used_p
        trajectory.extend(stages)
        m = measure(exact, "polish")
        trajectory.append(m)
        # prefer exact representations: they are what the comparison is about
        if m["relator_defect"] <= CONVERGED_RELATOR_TOL or m["objective"] <= best["objective"]:
            best, best_mats = m, exact
    converged = best["relator_defect"] <= CONVERGED_RELATOR_TOL and final_reason != "budget"
    return PerturbationReport(
        best_distance_inf=best["distance_inf"],
        relator_defect=best["relator_defect"],
        iterations=used,
        converged=converged,
        seed=seed,
        start=start,
        objective=best["objective"],
        max_unitarity_error=track["unitarity"],
        trajectory=trajectory,
        history=history if keep_history else [],
        candidate=best_mats,
    )


def _search_job(args):
    P, seed, start = args
    return search(P, seed, start=start)


def run_searches(P, seeds, jobs=1, starts=None):
    """Independent restarts; results come back in ``seeds`` order regardless of ``jobs``."""
    seeds = list(seeds)
    starts = [None] * len(seeds) if starts is None else list(starts)
    args = [(P, s, st) for s, st in zip(seeds, starts)]
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_search_job, args))
    return [_search_job(a) for a in args]


def best_report(reports):
    """Lowest objective, ties broken by seed."""
    return min(reports, key=lambda r: (r.objective, r.seed))


def bound_violations(reports, threshold=1.0 / 24.0):
    """Reports that reach an exact representation closer than ``threshold``; must be empty
    on an instance carrying a valid non-stability certificate."""
    return [
        r for r in reports if r.relator_defect <= CONVERGED_RELATOR_TOL and r.best_distance_inf < threshold
    ]


# -- brute-force oracle --------------------------------------------------


def _grid_points(resolution):
    """Power-of-two grid size, so halving the resolution refines the grid."""
    return 2 ** max(1, math.ceil(math.log2(2 * math.pi / resolution)))


def oracle_min_distance_scalar(P, resolution=1e-3, q_grid=(9, 16), chunk=256):
    """Grid minimum of the support distance over exact representations in dimension 1 or 2.

    ``n = 1``: every 1-dimensional representation is a tuple of phases (at most
    two generators), filtered by the relators. ``n = 2``: commuting pairs
    ``Q diag(.) Q^*`` for an abelian two-generator group, with ``Q`` on a
    coarse ``q_grid`` of the Bloch sphere and eigenphases on the grid.
    """
    G = P.group
    k = G.ngens
    if k > 2:
        raise InvalidParameterError("grid oracle supports at most two generators")
    exps = [w.exponent_sums(k) for w in P.support]
    if P.n == 1:
        return _oracle_n1(P, exps, resolution, chunk)
    if P.n == 2:
        if G.normal_form != "abelian" or k != 2:
            raise InvalidParameterError("n=2 oracle needs an abelian two-generator group")
        return _oracle_n2(P, exps, resolution, q_grid)
    raise InvalidParameterError("grid oracle supports n <= 2 only")


def _oracle_n1(P, exps, resolution, chunk):
    N = _grid_points(resolution)
    k = P.group.ngens
    theta = 2 * np.pi * np.arange(N) / N
    targets = [complex(T[0, 0]) for T in P.targets]
    rel_exps = [r.exponent_sums(k) for r in P.group.relators]
    best = math.inf
    if k == 1:
        blocks = [(theta[:, None], None)]
    else:
        blocks = [(theta[i:i + chunk, None], theta[None, :]) for i in range(0, N, chunk)]
    for ta, tb in blocks:
        worst = None
        for (ea, *rest), t in zip(exps, targets):
            eb = rest[0] if rest else 0
            phi = ea * ta + (eb * tb if tb is not None else 0.0)
            d2 = 1.0 + abs(t) ** 2 - 2.0 * (t.real * np.cos(phi) + t.imag * np.sin(phi))
            worst = d2 if worst is None else np.maximum(worst, d2)
        for ra, *rest in rel_exps:
            rb = rest[0] if rest else 0
            phi = ra * ta + (rb * tb if tb is not None else 0.0)
            bad = np.abs(np.exp(1j * phi) - 1.0) > 1e-9
            worst = np.where(bad, np.inf, worst)
        best = min(best, float(worst.min()))
    return math.sqrt(max(best, 0.0))


def _oracle_n2(P, exps, resolution, q_grid):
    M = _grid_points(resolution)
    th = 2 * np.pi * np.arange(M) / M
    a1, a2, b1, b2 = np.meshgrid(th, th, th, th, indexing="ij", sparse=True)
    n_t, n_psi = q_grid
    best = math.inf
    for t in np.linspace(0.0, np.pi / 2, n_t):
        c, s = math.cos(t), math.sin(t)
        for psi in 2 * np.pi * np.arange(n_psi) / n_psi:
            ep = complex(math.cos(psi), math.sin(psi))
            worst = None
            for (ea, eb), T in zip(exps, P.targets):
                d1 = np.exp(1j * (ea * a1 + eb * b1))
                d2 = np.exp(1j * (ea * a2 + eb * b2))
                p = c * c * d1 + s * s * d2 - T[0, 0]
                q = c * s * np.conj(ep) * (d1 - d2) - T[0, 1]
                r = c * s * ep * (d1 - d2) - T[1, 0]
                u = s * s * d1 + c * c * d2 - T[1, 1]
                fro2 = np.abs(p) ** 2 + np.abs(q) ** 2 + np.abs(r) ** 2 + np.abs(u) ** 2
                det2 = np.abs(p * u - q * r) ** 2
                smax2 = 0.5 * (fro2 + np.sqrt(np.maximum(fro2 ** 2 - 4.0 * det2, 0.0)))
                worst = smax2 if worst is None else np.maximum(worst, smax2)
            best = min(best, float(np.min(worst)))
            if c * s == 0.0:
                break  # psi is irrelevant on the poles
    return math.sqrt(max(best, 0.0))

"""Winding pairing between a unitary-valued map and a 2-chain, and
non-stability certificates built on it.

For a 2-chain ``c = sum x_j [a_j|b_j]`` and a map ``rho`` into unitaries whose
multiplicative defects are within distance 1 of the identity,

    <rho, c> = 1/(2 pi i) * sum_j x_j Tr log(rho(a_j b_j) rho(b_j)^-1 rho(a_j)^-1).

On a cycle this is an integer; it vanishes for any map that is within 1/24 of
a genuine representation on the set ``{a_j, b_j, a_j b_j}``. The pullback
``rho_n`` of the Voiculescu pair has scalar defects and pairs to
``<sigma, c> * k_n / n`` with ``sigma(g, h) = -beta(g) alpha(h)``, so a nonzero
Kronecker pairing certifies that ``rho_n`` stays at least 1/24 away from every
genuine representation.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import math

import numpy as np

from .bar_complex import Chain, cup_cocycle, kronecker_pair
from .errors import CannotVerifyError, IntegrityError
from .matrix_core import operator_norm, trace_log_unitary
from .voiculescu import AsymptoticRep

THRESHOLD = 1.0 / 24.0
RADIUS_MARGIN = 1e-9
QUANT_TOL = 1e-6
INTEGRITY_GAP = 0.1


@dataclass
class PairingResult:
    """Outcome of :func:`winding_pair`.

    ``raw`` and ``rounded`` are ``None`` when the radius condition fails.
    """

    raw: complex = None
    rounded: int = None
    valid: bool = False
    max_defect: float = 0.0
    diagnostic: str = ""

    def to_json(self, n=None):
        out = {
            "raw_re": None if self.raw is None else float(self.raw.real),
            "raw_im": None if self.raw is None else float(self.raw.imag),
            "rounded": self.rounded,
            "valid": self.valid,
            "max_defect": float(self.max_defect),
        }
        if n is not None:
            out = {"n": n, **out}
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def _cell_defects(rho, G, a, b, fast):
    """Return ``(D, E)`` with ``D = rho(ab) rho(b)^-1 rho(a)^-1`` and ``E = rho(ab) rho(a)^-1 rho(b)^-1``."""
    ab = G.multiply(a, b)
    if fast and isinstance(rho, AsymptoticRep):
        A, B, AB = rho.monomial(a), rho.monomial(b), rho.monomial(ab)
        D = (AB @ B.inverse() @ A.inverse()).dense()
        E = (AB @ A.inverse() @ B.inverse()).dense()
        return D, E
    A, B, AB = rho(a), rho(b), rho(ab)
    Ai, Bi = A.conj().T, B.conj().T
    return AB @ Bi @ Ai, AB @ Ai @ Bi


def winding_pair(rho, c, fast=True):
    """Winding pairing ``<rho, c>``.

    ``rho`` maps group words to unitary matrices (an :class:`AsymptoticRep`
    or any callable). Every cell must satisfy ``||defect - I||_inf <= 1 - 1e-9``
    for both orders of the inverted factors; otherwise the result is flagged
    invalid and no value is reported.

    On a verified cycle the raw value must lie within 1e-6 of an integer.
    A gap in ``(1e-6, 0.1]`` marks the result invalid; a larger gap raises
    :class:`IntegrityError`, since it can only come from a bug or a broken
    cycle certificate.
    """
    if c.degree != 2:
        raise ValueError("winding pairing needs a 2-chain")
    G = c.group
    max_defect = 0.0
    logs = []
    for x, (a, b) in c:
        D, E = _cell_defects(rho, G, a, b, fast)
        eye = np.eye(D.shape[0])
        r = max(operator_norm(D - eye), operator_norm(E - eye))
        max_defect = max(max_defect, r)
        logs.append((x, D))
    if max_defect > 1.0 - RADIUS_MARGIN:
        return PairingResult(
            valid=False,
            max_defect=max_defect,
            diagnostic=f"radius condition violated: max ||defect - I|| = {max_defect:.6g} >= 1",
        )
    total = sum(x * trace_log_unitary(D) for x, D in logs)
    raw = complex(total / (2j * math.pi))
    rounded = int(round(raw.real))
    gap = abs(raw - rounded)
    result = PairingResult(raw=raw, rounded=rounded, valid=True, max_defect=max_defect)
    if c.verified:
        if gap > INTEGRITY_GAP:
            raise IntegrityError(f"pairing {raw} on a verified cycle is {gap:.3g} away from an integer")
        if gap > QUANT_TOL:
            result.valid = False
            result.diagnostic = f"quantisation gap {gap:.3g} exceeds {QUANT_TOL}"
    return result


def expected_pairing(sigma, c, k_n, n):
    """Exact rational ``<sigma, c> * k_n / n``."""
    return Fraction(kronecker_pair(sigma, c) * k_n, n)


def obstruction_cocycle(alpha, beta):
    """``sigma(g, h) = -beta(g) alpha(h)``, the representative matching ``rho_n``'s defects."""
    return cup_cocycle(beta, alpha, sign=-1)


@dataclass
class Certificate:
    group: object
    alpha: object
    beta: object
    cycle: Chain
    n_values: list
    results: list
    sigma_kronecker: int
    verdict: bool
    diagnostics: list = field(default_factory=list)
    threshold: float = THRESHOLD

    def support(self):
        return [self.group.format(w) for w in self.cycle.support()]

    def conclusion(self):
        S = "{" + ", ".join(self.support()) + "}"
        if not self.verdict:
            return "no conclusion: " + ("; ".join(self.diagnostics) or "pairing check failed")
        return (
            f"If a genuine unitary representation pi of {self.group.name} were within {self.threshold:.6g} "
            f"of rho_n in operator norm at every element of S = {S}, then <rho_n, c> would vanish. "
            f"For every listed n the pairing equals {self.sigma_kronecker} != 0, so rho_n is at operator-norm "
            f"distance at least 1/24 from every genuine n-dimensional unitary representation somewhere on S."
        )

    def to_json(self):
        return {
            "group": self.group.name,
            "group_data": self.group.to_json(),
            "alpha": list(self.alpha.images),
            "beta": list(self.beta.images),
            "cycle": self.cycle.to_json(),
            "support": self.support(),
            "sigma": "sigma(g,h) = -beta(g)*alpha(h)",
            "sigma_kronecker": self.sigma_kronecker,
            "threshold": self.threshold,
            "n_values": list(self.n_values),
            "results": [r.to_json(n) for n, r in zip(self.n_values, self.results)],
            "verdict": self.verdict,
            "diagnostics": list(self.diagnostics),
            "conclusion": self.conclusion(),
        }

    def dumps(self):
        return canonical_json(self.to_json())


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def certify_nonstable(group, alpha, beta, c, n_values):
    """Run the winding pairing of ``rho_n`` against ``c`` for each ``n`` and issue a certificate.

    The verdict is true iff ``<sigma, c>`` is nonzero and every pairing is
    valid and equal to it.
    """
    if not c.verified:
        raise CannotVerifyError("certificates need a verified cycle")
    if alpha.group != group or beta.group != group or c.group != group:
        raise ValueError("alpha, beta and the cycle must live on the given group")
    sigma = obstruction_cocycle(alpha, beta)
    k = kronecker_pair(sigma, c)
    n_values = sorted(set(int(n) for n in n_values))
    results, diagnostics = [], []
    if k == 0:
        diagnostics.append("Kronecker pairing <sigma, c> is zero; the cycle detects no obstruction")
    for n in n_values:
        res = winding_pair(AsymptoticRep(n, alpha, beta), c)
        results.append(res)
        if not res.valid:
            diagnostics.append(f"n={n}: {res.diagnostic} (n too small for the radius condition)")
        elif res.rounded != expected_pairing(sigma, c, n, n):
            diagnostics.append(f"n={n}: pairing {res.rounded} != expected {k}")
    verdict = k != 0 and bool(results) and all(r.valid and r.rounded == k for r in results)
    return Certificate(group, alpha, beta, c, n_values, results, k, verdict, diagnostics)


def recheck_certificate(cert):
    """Recompute a certificate from its own inlined inputs and compare.

    ``cert`` is the JSON dict produced by :meth:`Certificate.to_json`.
    Returns ``(ok, fresh_certificate)``.
    """
    from .datafiles import group_from_json, parse_cycle
    from .group_model import check_hom

    G = group_from_json(cert["group_data"])
    alpha = check_hom(G, cert["alpha"])
    beta = check_hom(G, cert["beta"])
    c = parse_cycle(G, cert["cycle"])
    fresh = certify_nonstable(G, alpha, beta, c, cert["n_values"])
    mine = fresh.to_json()
    ok = mine["verdict"] == cert["verdict"] and mine["sigma_kronecker"] == cert["sigma_kronecker"]
    for a, b in zip(mine["results"], cert["results"]):
        ok = ok and a["valid"] == b["valid"] and a["rounded"] == b["rounded"]
        if a["raw_re"] is not None and b["raw_re"] is not None:
            ok = ok and abs(a["raw_re"] - b["raw_re"]) <= 1e-9
    return ok, fresh

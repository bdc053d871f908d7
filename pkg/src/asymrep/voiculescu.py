"""The Voiculescu unitaries and their pullback along a pair of integer homomorphisms.

``u_n`` is the cyclic downward shift, ``v_n = diag(w, w^2, ..., w^n)`` with
``w = exp(2 pi i / n)``, and for a group element ``g``

    rho_n(g) = u_n^alpha(g) v_n^beta(g).

Powers are never formed by repeated multiplication: a power of ``u_n`` is a
shift of indices modulo ``n`` and a power of ``v_n`` is a phase table whose
exponents are reduced modulo ``n`` before exponentiating, so every entry is an
exact ``n``-th root of unity up to a single rounding.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import IntegrityError
from .group_model import GroupData, IntHom, evaluate_hom
from .matrix_core import parse_p, schatten_norm

DENSE_CHECK_MAX_N = 256
DENSE_CHECK_TOL = 1e-10


def root_of_unity(k, n):
    """``exp(2 pi i k / n)`` with ``k`` reduced modulo ``n`` first."""
    return np.exp(2j * np.pi * (np.mod(k, n) / n))


@dataclass(frozen=True)
class Monomial:
    """Monomial matrix: column ``j`` has the single entry ``phases[j]`` at row ``rows[j]``."""

    rows: np.ndarray
    phases: np.ndarray

    @property
    def n(self):
        return len(self.rows)

    def __matmul__(self, other):
        return Monomial(self.rows[other.rows], self.phases[other.rows] * other.phases)

    def inverse(self):
        rows = np.empty_like(self.rows)
        rows[self.rows] = np.arange(self.n)
        phases = np.empty_like(self.phases)
        phases[self.rows] = np.conj(self.phases)
        return Monomial(rows, phases)

    def dense(self):
        M = np.zeros((self.n, self.n), dtype=np.complex128)
        M[self.rows, np.arange(self.n)] = self.phases
        return M


def monomial_power(n, a, b):
    """``u_n^a v_n^b`` as a :class:`Monomial`.

    Column ``j`` (0-based) carries ``exp(2 pi i (j+1) b / n)`` at row ``(j + a) mod n``.
    """
    j = np.arange(n)
    return Monomial((j + a) % n, root_of_unity((j + 1) * b, n))


def make_u(n):
    """The ``n x n`` cyclic shift with ones at ``(j+1 mod n, j)``."""
    if n < 1:
        raise ValueError("n must be positive")
    return monomial_power(n, 1, 0).dense()


def make_v(n):
    """``diag(exp(2 pi i j / n))`` for ``j = 1..n``; the last entry is exactly 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return monomial_power(n, 0, 1).dense()


@dataclass(frozen=True)
class AsymptoticRep:
    """``rho_n(g) = u_n^alpha(g) v_n^beta(g)`` on the group shared by ``alpha`` and ``beta``."""

    n: int
    alpha: IntHom
    beta: IntHom

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.alpha.group != self.beta.group:
            raise ValueError("alpha and beta must be defined on the same group")

    @property
    def group(self) -> GroupData:
        return self.alpha.group

    def exponents(self, w):
        if isinstance(w, str):
            w = self.group.parse(w)
        return evaluate_hom(self.alpha, w), evaluate_hom(self.beta, w)

    def monomial(self, w):
        a, b = self.exponents(w)
        return monomial_power(self.n, a, b)

    def __call__(self, w):
        return self.monomial(w).dense()

    def twist_exponent(self, g, h):
        """``m = beta(g) alpha(h)``; the multiplicative defect at ``(g, h)`` is ``exp(-2 pi i m / n)``."""
        return self.exponents(g)[1] * self.exponents(h)[0]


def rho(R, w):
    """Dense ``rho_n(w)`` built by the monomial fast path."""
    return R(w)


def twist_defect(R, g, h):
    """``rho(gh) rho(h)^-1 rho(g)^-1`` computed exactly in monomial form, returned dense."""
    G = R.group
    gh = G.multiply(G.parse(g) if isinstance(g, str) else g, G.parse(h) if isinstance(h, str) else h)
    D = R.monomial(gh) @ R.monomial(h).inverse() @ R.monomial(g).inverse()
    return D.dense()


def twist_scalar(R, g, h):
    return complex(root_of_unity(-R.twist_exponent(g, h), R.n))


def defect_norm_closed_form(n, m, p):
    """``n^(1/p) * |exp(-2 pi i m / n) - 1|`` written as ``2 |sin(pi m / n)|``."""
    p = parse_p(p)
    op = 2.0 * abs(math.sin(math.pi * (m % n) / n))
    return op if math.isinf(p) else op * n ** (1.0 / p)


def defect_bound(n, m, p):
    """Upper bound ``2 pi |m| / n * n^(1/p)`` on the Schatten p-norm of the defect."""
    p = parse_p(p)
    op = 2.0 * math.pi * abs(m) / n
    return op if math.isinf(p) else op * n ** (1.0 / p)


def defect_norm(R, g, h, p, dense_check=None):
    """``||rho(gh) - rho(g) rho(h)||_p``.

    Returned from the closed form; for ``n <= 256`` (or when ``dense_check``
    is forced on) the dense product is also evaluated and the two must agree
    to 1e-10, otherwise :class:`IntegrityError` is raised.
    """
    p = parse_p(p)
    m = R.twist_exponent(g, h)
    value = defect_norm_closed_form(R.n, m, p)
    if dense_check is None:
        dense_check = R.n <= DENSE_CHECK_MAX_N
    if dense_check:
        G = R.group
        g = G.parse(g) if isinstance(g, str) else g
        h = G.parse(h) if isinstance(h, str) else h
        diff = R(G.multiply(g, h)) - R(g) @ R(h)
        dense = schatten_norm(diff, p)
        if abs(dense - value) > DENSE_CHECK_TOL * max(1.0, value):
            raise IntegrityError(f"defect closed form {value!r} disagrees with dense value {dense!r}")
    return value

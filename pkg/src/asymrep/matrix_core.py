"""Dense complex matrix helpers: Schatten norms, unitarity checks and the
principal logarithm of a unitary matrix.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
"""

import math

import numpy as np
import scipy.linalg

from .errors import BranchCutError, InvalidParameterError

#: Phases closer than this to +/-pi are treated as lying on the branch cut.
BRANCH_CUT_TOL = 1e-12


def as_matrix(M):
    """Return ``M`` as a square complex array, raising on bad shape."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidParameterError(f"expected a non-empty square matrix, got shape {A.shape}")
    return A


def default_unitarity_tol(dim):
    return 1e-10 * dim


def unitarity_error(U):
    """``||U^* U - I||_inf``."""
    U = as_matrix(U)
    return operator_norm(U.conj().T @ U - np.eye(U.shape[0]))


def is_unitary(U, tol=None):
    U = as_matrix(U)
    if tol is None:
        tol = default_unitarity_tol(U.shape[0])
    return unitarity_error(U) <= tol


def as_unitary(U, tol=None):
    """Validate that ``U`` is unitary within ``tol`` and return it as an array."""
    U = as_matrix(U)
    if tol is None:
        tol = default_unitarity_tol(U.shape[0])
    err = unitarity_error(U)
    if err > tol:
        raise InvalidParameterError(f"matrix is not unitary: ||U*U - I|| = {err:.3e} > {tol:.3e}")
    return U


def parse_p(p):
    """Normalise a Schatten exponent; accepts numbers and the string ``"inf"``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidParameterError(f"Schatten exponent must satisfy p >= 1, got {p}")
    return p


def singular_values(M):
    """Singular values of ``M`` in descending order.

    Computed as square roots of the eigenvalues of the Hermitian matrix
    ``M^* M``; tiny negative eigenvalues from rounding are clipped to zero.
    """
    M = as_matrix(M)
    if _is_diagonal(M):
        return np.sort(np.abs(np.diagonal(M)))[::-1]
    gram = M.conj().T @ M
    gram = 0.5 * (gram + gram.conj().T)
    ev = np.linalg.eigvalsh(gram)
    return np.sqrt(np.clip(ev, 0.0, None))[::-1]


def operator_norm(M):
    return float(singular_values(M)[0])


def schatten_norm(M, p, unitary=False):
    """Unnormalised Schatten p-norm ``(sum s_i^p)^(1/p)``; ``p=inf`` gives the operator norm.

    With ``unitary=True`` the input is only checked for unitarity and all
    singular values are taken to be exactly one.
    """
    p = parse_p(p)
    M = as_matrix(M)
    n = M.shape[0]
    if unitary:
        as_unitary(M)
        return 1.0 if math.isinf(p) else n ** (1.0 / p)
    s = singular_values(M)
    if math.isinf(p):
        return float(s[0])
    if p == 1:
        return float(s.sum())
    if p == 2:
        # Frobenius norm directly; avoids squaring then rooting the spectrum
        return float(np.linalg.norm(M, "fro"))
    smax = s[0]
    if smax == 0.0:
        return 0.0
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


def trace(M):
    return complex(np.trace(as_matrix(M)))


def _is_diagonal(A):
    return not np.any(A - np.diag(np.diagonal(A)))


def _principal_phases(eigvals):
    phases = np.angle(eigvals)
    bad = np.abs(np.abs(phases) - math.pi) < BRANCH_CUT_TOL
    if np.any(bad):
        raise BranchCutError("eigenvalue at -1: principal logarithm is undefined on the branch cut")
    return phases


def unitary_eigen(U):
    """Eigenvalues and an orthonormal eigenbasis of a unitary matrix.

    Uses the complex Schur form, which is diagonal for normal matrices, so
    the basis stays orthonormal even for repeated eigenvalues.
    """
    U = as_matrix(U)
    if _is_diagonal(U):
        return np.diagonal(U).copy(), np.eye(U.shape[0], dtype=np.complex128)
    T, Z = scipy.linalg.schur(U, output="complex")
    return np.diagonal(T).copy(), Z


def principal_log_unitary(U, tol=None):
    """Skew-Hermitian ``L`` with ``expm(L) = U`` and eigenvalue phases in (-pi, pi).

    Raises :class:`BranchCutError` if any eigenvalue sits at -1.
    """
    U = as_unitary(U, tol)
    lam, Z = unitary_eigen(U)
    phases = _principal_phases(lam)
    L = (Z * (1j * phases)) @ Z.conj().T
    return 0.5 * (L - L.conj().T)


def trace_log_unitary(U, tol=None):
    """``Tr(log U)`` on the principal branch, computed from the spectrum only."""
    U = as_unitary(U, tol)
    if _is_diagonal(U):
        lam = np.diagonal(U)
    else:
        lam = np.linalg.eigvals(U)
    return complex(1j * _principal_phases(lam).sum())


def expm_skew(Omega):
    """``exp(Omega)`` for skew-Hermitian ``Omega`` via a Hermitian eigensolve.

    The result is unitary to working precision, unlike a Pade approximant.
    """
    H = -1j * np.asarray(Omega, dtype=np.complex128)
    H = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)) @ V.conj().T


def nearest_unitary(M):
    """Polar factor of ``M``; used to wash out accumulated rounding."""
    W, _, Vh = np.linalg.svd(as_matrix(M))
    return W @ Vh


def random_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))

"""Minimal dense complex linear algebra used by the rate formulas.

Only what the sum-rate expressions need: Hermitian validation, quadratic
forms, rank-one accumulation, and the dominant eigenpair of a Hermitian
positive-semidefinite matrix. Matrices here are tiny (relay antenna counts
of a few), so the solvers favour determinism over asymptotic speed.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ValidationError

HERMITIAN_RTOL = 1e-12
DEFAULT_EIG_TOL = 1e-12

_POWER_ITER_MAX = 10_000


def is_hermitian(A: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    """True if A equals its conjugate transpose within rtol relative to the
    largest entry magnitude."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    return float(np.max(np.abs(A - A.conj().T))) <= rtol * scale


def _check_hermitian(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.view(float))):
        raise ValidationError("matrix has non-finite entries")
    if not is_hermitian(A):
        raise ValidationError("matrix is not Hermitian within tolerance")
    return A


def quadratic_form(x: np.ndarray, A: np.ndarray) -> float:
    """Evaluate x^H A x for Hermitian A and return it as a real number.

    The imaginary part must be negligible (below 1e-10 relative to the
    result); anything larger indicates a non-Hermitian A or corrupted input.
    """
    x = np.asarray(x, dtype=complex)
    A = np.asarray(A, dtype=complex)
    if x.ndim != 1 or A.ndim != 2 or A.shape != (x.size, x.size):
        raise ValidationError(
            f"dimension mismatch: x has shape {x.shape}, A has shape {A.shape}"
        )
    val = complex(x.conj() @ A @ x)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise ValidationError(
            f"quadratic form has a structural imaginary part ({val.imag:.3e})"
        )
    return val.real


def rank_one(u: np.ndarray, scale: float) -> np.ndarray:
    """Return scale * u u^H, Hermitian by construction. scale must be >= 0."""
    if scale < 0:
        raise ValidationError(f"rank_one scale must be nonnegative, got {scale}")
    u = np.asarray(u, dtype=complex)
    if u.ndim != 1:
        raise ValidationError(f"expected a vector, got shape {u.shape}")
    return scale * np.outer(u, u.conj())


def dominant_eigenpair(
    A: np.ndarray, tol: float = DEFAULT_EIG_TOL
) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector of a Hermitian PSD matrix.

    Power iteration from the normalized all-ones vector (deterministic, so
    Monte Carlo runs are reproducible), with the Rayleigh quotient as the
    eigenvalue estimate. Falls back to a full cyclic Jacobi sweep when the
    iteration stalls or when the converged value sits below the eigenvalue
    mean (which can only happen if the seed is orthogonal to the dominant
    eigenspace). The returned pair always satisfies
    ``||A v - lam v|| <= tol * max(1, ||A||_F)``.
    """
    if tol <= 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    A = _check_hermitian(A)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    norm_f = float(np.linalg.norm(A))
    res_tol = tol * max(1.0, norm_f)
    mean_eig = float(np.trace(A).real) / n

    v = np.ones(n, dtype=complex) / np.sqrt(n)
    if norm_f == 0.0:
        return 0.0, v

    lam = 0.0
    converged = False
    for _ in range(_POWER_ITER_MAX):
        w = A @ v
        lam = float((v.conj() @ w).real)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= res_tol:
            converged = True
            break
        wn = float(np.linalg.norm(w))
        if wn == 0.0:
            break  # seed lies in the kernel; let the Jacobi fallback decide
        v = w / wn

    # lam below the eigenvalue mean cannot be the maximum.
    if not converged or lam < mean_eig - res_tol:
        lam, v = _jacobi_dominant(A)
        residual = float(np.linalg.norm(A @ v - lam * v))
        if residual > res_tol:
            raise NumericalError(
                f"eigenpair residual {residual:.3e} above tolerance {res_tol:.3e}",
                residual=residual,
            )

    if lam < -res_tol:
        raise ValidationError(
            f"matrix is not positive semidefinite (lambda_max = {lam:.3e})"
        )
    return max(lam, 0.0), v


def _jacobi_dominant(A: np.ndarray, max_sweeps: int = 60) -> tuple[float, np.ndarray]:
    """Full eigen-decomposition by cyclic complex Jacobi rotations; returns
    the largest eigenvalue with its eigenvector."""
    B = A.copy()
    n = B.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(B))))
    for _ in range(max_sweeps):
        off = max(
            (abs(B[p, q]) for p in range(n - 1) for q in range(p + 1, n)),
            default=0.0,
        )
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                m = abs(B[p, q])
                if m <= 1e-18 * scale:
                    continue
                # Unitary rotation J with J[p,p]=J[q,q]=c, J[p,q]=-s*phase,
                # J[q,p]=s*conj(phase) zeroes B[p,q] for t solving
                # t^2 + 2*tau*t - 1 = 0.
                phase = B[p, q] / m
                tau = (B[p, p].real - B[q, q].real) / (2.0 * m)
                t = 1.0 if tau == 0.0 else np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                bp = c * B[:, p] + s * np.conj(phase) * B[:, q]
                bq = -s * phase * B[:, p] + c * B[:, q]
                B[:, p], B[:, q] = bp, bq
                bp = c * B[p, :] + s * phase * B[q, :]
                bq = -s * np.conj(phase) * B[p, :] + c * B[q, :]
                B[p, :], B[q, :] = bp, bq
                vp = c * V[:, p] + s * np.conj(phase) * V[:, q]
                vq = -s * phase * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = vp, vq
    eigs = np.real(np.diag(B))
    i = int(np.argmax(eigs))
    v = V[:, i]
    return float(eigs[i]), v / np.linalg.norm(v)

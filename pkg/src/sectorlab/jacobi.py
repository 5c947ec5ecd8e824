"""Cyclic Jacobi diagonalization for complex Hermitian matrices.

Each rotation zeroes one off-diagonal pair with a complex Givens rotation;
sweeps repeat until the off-diagonal Frobenius norm falls below
tol_factor * ||H||_F. Eigenvalues come back ascending with orthonormal
eigenvector columns, each phase-fixed so its largest-magnitude component is
real and positive (determinism for regression tests; kernels built from the
vectors are phase-invariant anyway).
"""

from __future__ import annotations

import numpy as np

from .errors import JacobiConvergenceError, MalformedWordError


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eigensystem(
    matrix: np.ndarray, tol_factor: float = 1e-13, max_sweeps: int = 60
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise MalformedWordError("matrix must be square")
    herm_defect = np.max(np.abs(a - a.conj().T)) if n else 0.0
    scale = float(np.linalg.norm(a))
    if herm_defect > 1e-12 * max(scale, 1.0):
        raise MalformedWordError(f"matrix is not Hermitian (defect {herm_defect:.3e})")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.diagonal().copy(), v

    target = tol_factor * max(scale, np.finfo(float).tiny)
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps >= max_sweeps:
            raise JacobiConvergenceError(
                f"off-norm {_off_norm(a):.3e} above target {target:.3e} after {max_sweeps} sweeps"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                u = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2 * r)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # columns: [p, q] <- [c*p - s*conj(u)*q, s*u*p + c*q]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(u) * col_q
                a[:, q] = s * u * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * u * row_q
                a[q, :] = s * np.conj(u) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(u) * vq
                v[:, q] = s * u * vp + c * vq

    values = a.real.diagonal().copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    v = v[:, order]
    for j in range(n):
        i = int(np.argmax(np.abs(v[:, j])))
        phase = v[i, j] / abs(v[i, j])
        v[:, j] = v[:, j] / phase
    return values, v

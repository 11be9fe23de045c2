# -*- coding: utf-8 -*-
"""Dense complex-Hermitian linear algebra used by every security analysis.

The eigensolver is a cyclic Jacobi sweep with complex rotations; it is slow
next to LAPACK but every matrix handled here is at most a few tens of rows.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60
JACOBI_REL_TOL = 1e-14
JACOBI_SKIP_TOL = 1e-18
JACOBI_TAU_CAP = 1e150


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Validate a square matrix as Hermitian and return its symmetrized copy.

    :param a: array-like, square
    :param tol: largest tolerated |a_ij - conj(a_ji)|
    :return: complex ndarray
    :raises ValueError: not square, empty or not Hermitian
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"a Hermitian matrix must be square with dim >= 1, got shape {m.shape}")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: max |A - A^H| = {asym:.3e} > {tol:.1e}")
    return (m + m.conj().T) / 2


def _off_max(a: np.ndarray) -> float:
    """Largest off-diagonal magnitude."""
    if a.shape[0] < 2:
        return 0.0
    return float(np.max(np.abs(a - np.diag(np.diag(a)))))


def _rotation(app: float, aqq: float, g: float) -> Tuple[float, float]:
    tau = (aqq - app) / (2.0 * g)
    if abs(tau) > JACOBI_TAU_CAP:
        # tau² would overflow; t → 1/(2 tau)
        t = 1.0 / (2.0 * tau)
    else:
        t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def hermitian_eigh(a) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Args:
        a: Hermitian matrix (array-like).

    Returns:
        (eigenvalues ascending, unitary matrix whose columns are eigenvectors)
        such that ``a = V @ diag(w) @ V^H``.

    Raises:
        ValueError: non-Hermitian input.
        RuntimeError: the sweeps did not converge.
    """
    m = as_hermitian(a)
    n = m.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
    target = JACOBI_REL_TOL * scale
    negligible = JACOBI_SKIP_TOL * scale

    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_max(m) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                g = abs(apq)
                if g <= negligible:
                    m[p, q] = m[q, p] = 0.0
                    continue
                c, s = _rotation(m[p, p].real, m[q, q].real, g)
                dq = np.conj(apq / g)
                u = np.array([[c, s], [-s * dq, c * dq]], dtype=complex)
                idx = [p, q]
                m[:, idx] = m[:, idx] @ u
                m[idx, :] = u.conj().T @ m[idx, :]
                m[p, q] = m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                v[:, idx] = v[:, idx] @ u
    else:
        off = _off_max(m)
        if off > target:
            raise RuntimeError(f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                               f"(max off-diagonal {off:.3e}, scale {scale:.3e})")

    w = np.real(np.diag(m))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def trace_norm(a) -> float:
    """Schatten 1-norm: sum of the absolute eigenvalues."""
    w, _ = hermitian_eigh(a)
    return float(np.sum(np.abs(w)))


def binary_entropy(x: float) -> float:
    """
    H2(x) = -x log2 x - (1-x) log2(1-x), with H2(0) = H2(1) = 0.

    :raises ValueError: x outside [0, 1]
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    return float(-(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / np.log(2.0))


def partial_trace(x, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """
    Partial trace over a tensor-product space.

    :param x: square matrix on dims[0] ⊗ dims[1] ⊗ ...
    :param dims: subsystem dimensions
    :param keep: indices of the subsystems that survive, in ascending order
    """
    x = np.asarray(x)
    dims = list(dims)
    keep = sorted(keep)
    n = len(dims)
    total = int(np.prod(dims))
    if x.shape != (total, total):
        raise ValueError(f"matrix shape {x.shape} does not match subsystem dims {dims}")
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid subsystems to keep: {keep}")
    t = x.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace the highest index first so remaining axis numbers stay valid
    for i in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def hermitian_basis(d: int) -> List[np.ndarray]:
    """A basis of the real vector space of d×d Hermitian matrices (d² elements)."""
    out = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        out.append(e)
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = 1.0
            out.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[j, k] = -1j
            f[k, j] = 1j
            out.append(f)
    return out


def min_eigenvalue(a) -> float:
    w, _ = hermitian_eigh(a)
    return float(w[0])


def ket(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return v


def projector(vec) -> np.ndarray:
    v = ket(vec)
    return np.outer(v, v.conj())

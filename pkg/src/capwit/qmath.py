"""Small-dimension complex matrix algebra and entropy functions.

Everything here operates on plain numpy arrays (complex matrices, real
probability vectors) of dimension at most 16.  All entropies are in bits.

Probability vectors arising from measured data may carry small negative
entries; the plogp term is continued to those via its real part,
hreg(x) = -x * log2|x|.  Entries below ``NEG_FLOOR`` are treated as data
corruption rather than statistical noise and rejected.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, DomainError, ValidationError

# most negative probability/eigenvalue still attributed to finite statistics
NEG_FLOOR = -0.05

_JACOBI_OFF_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest |m[i,j] - conj(m[j,i])| over all entries."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian: max asymmetry {defect:.3e}")
    return m


def jacobi_eigh(m: np.ndarray, tol: float = _JACOBI_OFF_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted in
    descending order and eigenvectors as the matching columns.  Sweeps
    continue until the off-diagonal Frobenius norm drops below ``tol``.
    """
    a = require_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.reshape(1).copy(), v

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                # unitary 2x2 rotation zeroing the (p, q) entry: reduce the
                # block to a real symmetric one via the phase of a[p,q]
                phase = apq / abs(apq)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * abs(apq))
                # smaller root of t^2 - 2*tau*t - 1 = 0 (rotation angle <= 45 deg)
                if tau >= 0.0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + s * np.conj(phase) * col_q
                a[:, q] = -s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + s * phase * row_q
                a[q, :] = -s * np.conj(phase) * row_p + c * row_q

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p + s * np.conj(phase) * vec_q
                v[:, q] = -s * phase * vec_p + c * vec_q
    else:
        raise ValidationError("Jacobi eigensolver failed to converge")

    eigvals = np.diag(a).real.copy()
    order = np.argsort(eigvals)[::-1]
    return eigvals[order], v[:, order]


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    vals, _ = jacobi_eigh(m)
    return vals


def hermitian_eigensystem(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns."""
    return jacobi_eigh(m)


def hreg(x) -> np.ndarray | float:
    """Regularized plogp term: -x*log2|x| with hreg(0) = 0.

    For small negative x this equals the real part of -x*log2(x), which is
    how mildly negative measured probabilities enter the entropies.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    nz = x != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[nz] = -x[nz] * np.log2(np.abs(x[nz]))
    if out.ndim == 0:
        return float(out)
    return out


def check_prob_vector(p: np.ndarray, sum_tol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValidationError(f"probability vector must be 1-d, got shape {p.shape}")
    if np.min(p) < NEG_FLOOR:
        raise DataError(
            f"probability entry {np.min(p):.6f} below the {NEG_FLOOR} floor"
        )
    total = float(np.sum(p))
    if abs(total - 1.0) > sum_tol:
        raise ValidationError(f"probabilities sum to {total!r}, expected 1")
    return p


def shannon_entropy(p: np.ndarray) -> float:
    """Shannon entropy in bits, with the real-part continuation for
    slightly negative entries."""
    p = check_prob_vector(p)
    return float(np.sum(hreg(p)))


def binary_entropy(x: float) -> float:
    """H2(x) = hreg(x) + hreg(1-x); symmetric under x <-> 1-x."""
    x = float(x)
    if not (NEG_FLOOR <= x <= 1.0 - NEG_FLOOR):
        raise DomainError(f"binary_entropy argument {x!r} outside [-0.05, 1.05]")
    return float(hreg(x) + hreg(1.0 - x))


def von_neumann_entropy(m: np.ndarray, trace_tol: float = 1e-6) -> float:
    """S(m) = sum of hreg over the eigenvalues, for unit-trace Hermitian m."""
    m = require_hermitian(m)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"trace is {tr!r}, expected 1 within {trace_tol}")
    vals = hermitian_eigenvalues(m)
    if float(np.min(vals)) < NEG_FLOOR:
        raise DataError(
            f"eigenvalue {np.min(vals):.6f} below the {NEG_FLOOR} floor"
        )
    return float(np.sum(hreg(vals)))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ValidationError("kron expects two matrices")
    return np.kron(a, b)


def partial_trace(m: np.ndarray, keep, dims) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` gives the dimension of each subsystem in tensor order; their
    product must equal the matrix dimension.  ``keep`` is an iterable of
    subsystem indices retained in their original order.
    """
    m = np.asarray(m, dtype=complex)
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(int(k) for k in keep))
    n = len(dims)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValidationError(
            f"subsystem dims {dims} do not multiply to matrix dim {m.shape[0]}"
        )
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"keep indices {keep} outside range(0, {n})")

    tensor = m.reshape(dims + dims)
    # contract row/column axes of each traced subsystem, highest index first
    # so the row-side axis numbers of untraced subsystems stay valid
    for k in reversed(range(n)):
        if k in keep:
            continue
        tensor = np.trace(tensor, axis1=k, axis2=k + tensor.ndim // 2)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)

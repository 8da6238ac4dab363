"""Pauli operators, axis eigenstates and Bell states used throughout the package.

Conventions: qubit basis |0>, |1>; Bell order (phi+, phi-, psi+, psi-) with
|phi+-> = (|00> +- |11>)/sqrt2 and |psi+-> = (|01> +- |10>)/sqrt2.
"""

from __future__ import annotations

import numpy as np

AXES = ("X", "Y", "Z")

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}

# transpose in the computational basis: X^T = X, Z^T = Z, Y^T = -Y
PAULI_T = {"I": I2, "X": SX, "Y": -SY, "Z": SZ}

# +1/-1 eigenvectors per measurement axis (D/A, L/R, H/V encoding)
_D = np.array([1, 1], dtype=complex) / np.sqrt(2)
_A = np.array([1, -1], dtype=complex) / np.sqrt(2)
_L = np.array([1, 1j], dtype=complex) / np.sqrt(2)
_R = np.array([1, -1j], dtype=complex) / np.sqrt(2)
_H = np.array([1, 0], dtype=complex)
_V = np.array([0, 1], dtype=complex)

EIGENSTATES = {
    "X": {+1: _D, -1: _A},
    "Y": {+1: _L, -1: _R},
    "Z": {+1: _H, -1: _V},
}

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)

# columns are the Bell states in the computational basis
BELL_MATRIX = np.column_stack([PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS])

# (1 x sigma)|phi+> is a Bell state up to phase; the projector is phase-free
BELL_OF_PAULI = {"I": "phi+", "X": "psi+", "Y": "psi-", "Z": "phi-"}


def pauli_string_matrix(s: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis for a string like "IX" or "XX"."""
    m = PAULI[s[0]]
    for ch in s[1:]:
        m = np.kron(m, PAULI[ch])
    return m


def eigenprojector(axis: str, sign: int) -> np.ndarray:
    vec = EIGENSTATES[axis][sign]
    return np.outer(vec, vec.conj())

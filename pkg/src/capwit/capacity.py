"""Exact quantum-capacity formulas and coherent-information machinery.

For the correlated-flip family the quantum capacity has the closed form

    Q(p, mu) = 2 - p*H2[(1-p)(1-mu)] - (1-p)*H2[p(1-mu)] - H2(p),

which coincides with the single-letter coherent information at the
maximally mixed input.  The marginal single-qubit channel is a dephasing
channel (up to a local unitary) with capacity 1 - H2(p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelParams, KrausChannel, PauliChannel, as_kraus
from .errors import DomainError, ValidationError
from .qmath import binary_entropy, hermitian_eigensystem, shannon_entropy, von_neumann_entropy

_PURIFY_CUTOFF = 1e-14


@dataclass(frozen=True)
class CapacityReport:
    """Capacities in qubits per use: joint exact value, per-arm values and
    their sum (the benchmark for using the arms independently).

    ``q_exact`` is None when no channel model is available (data-only runs).
    """

    q1: float
    q2: float
    q_lim: float
    q_exact: float | None = None


def exact_capacity(params: ChannelParams) -> float:
    """Closed-form quantum capacity of the correlated-flip channel."""
    p = float(params.p)
    mu = float(params.mu)
    return (
        2.0
        - p * binary_entropy((1.0 - p) * (1.0 - mu))
        - (1.0 - p) * binary_entropy(p * (1.0 - mu))
        - binary_entropy(p)
    )


def dephasing_capacity(p: float) -> float:
    """Capacity 1 - H2(p) of the single-arm flip (dephasing-equivalent) channel."""
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"flip probability p={p!r} outside [0, 1]")
    return 1.0 - binary_entropy(p)


def theory_report(params: ChannelParams) -> CapacityReport:
    q1 = dephasing_capacity(float(params.p))
    return CapacityReport(q1=q1, q2=q1, q_lim=2.0 * q1, q_exact=exact_capacity(params))


def _purification(rho: np.ndarray) -> np.ndarray:
    """Purify via the eigendecomposition, dropping near-zero branches.

    Returns a vector on (reference x system) with reference dimension equal
    to the retained rank.
    """
    vals, vecs = hermitian_eigensystem(rho)
    kept = [(lam, vecs[:, i]) for i, lam in enumerate(vals) if lam > _PURIFY_CUTOFF]
    d = rho.shape[0]
    r = len(kept)
    psi = np.zeros(r * d, dtype=complex)
    for i, (lam, u) in enumerate(kept):
        e = np.zeros(r, dtype=complex)
        e[i] = 1.0
        psi += np.sqrt(lam) * np.kron(e, u)
    return psi


def coherent_information(ch: KrausChannel, rho: np.ndarray) -> float:
    """I_c = S[E(rho)] - S_e, with the entropy exchange evaluated on the
    channel acting on half of a purification of rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise ValidationError(f"state shape {rho.shape} != ({ch.dim_in}, {ch.dim_in})")

    out = np.zeros((ch.dim_out, ch.dim_out), dtype=complex)
    for k in ch.kraus_ops:
        out += k @ rho @ k.conj().T

    psi = _purification(rho)
    r = psi.size // ch.dim_in
    joint = np.zeros((r * ch.dim_out, r * ch.dim_out), dtype=complex)
    eye_r = np.eye(r, dtype=complex)
    for k in ch.kraus_ops:
        branch = np.kron(eye_r, k) @ psi
        joint += np.outer(branch, branch.conj())

    return von_neumann_entropy(out) - von_neumann_entropy(joint)


def pauli_coherent_information(ch: PauliChannel) -> float:
    """Coherent information of a Pauli channel at the maximally mixed input:
    n - H(string probabilities)."""
    probs = np.array(list(ch.probs.values()), dtype=float)
    return float(ch.n_qubits) - shannon_entropy(probs)


def pauli_coherent_information_reference(ch: PauliChannel) -> float:
    """Same quantity through the generic Kraus/purification route (slow path,
    kept as an independent cross-check)."""
    d = ch.dim
    return coherent_information(as_kraus(ch), np.eye(d, dtype=complex) / d)

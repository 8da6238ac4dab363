"""Pauli-string channels and the correlated two-qubit bit-flip family.

The central model is a two-qubit channel that applies sigma_X on each qubit
with probability p, with a correlation strength mu interpolating between
independent flips (mu=0) and perfectly joint flips (mu=1):

    weights A_II = 1 - p - A,  A_IX = A_XI = A,  A_XX = p - A,
    with A = p(1-p)(1-mu).

The same weights arise as fractional overlap times of two-level voltage
schedules driving the two channel arms, which is how the channel is realised
physically; the schedule compiler here keeps that arithmetic exact over the
rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import DataError, DomainError, ValidationError
from .paulis import AXES, PAULI, PHI_PLUS, I2, pauli_string_matrix
from . import qmath

_PROB_SUM_TOL = 1e-12

V0 = "V0"
VX = "VX"
_LEVELS = (V0, VX)
_LEVEL_TO_PAULI = {V0: "I", VX: "X"}


@dataclass(frozen=True)
class ChannelParams:
    """Flip probability p and correlation strength mu, both in [0, 1].

    Values may be floats or exact rationals; rational inputs keep the
    schedule compiler exact.
    """

    p: Real
    mu: Real

    def __post_init__(self):
        if not (0 <= self.p <= 1):
            raise DomainError(f"flip probability p={self.p!r} outside [0, 1]")
        if not (0 <= self.mu <= 1):
            raise DomainError(f"correlation strength mu={self.mu!r} outside [0, 1]")


def correlated_coefficients(p, mu) -> dict:
    """Weights of the correlated-flip channel in the arithmetic of the inputs."""
    a = p * (1 - p) * (1 - mu)
    return {"II": 1 - p - a, "IX": a, "XI": a, "XX": p - a}


@dataclass
class PauliChannel:
    """Probability distribution over n-qubit Pauli strings."""

    n_qubits: int
    probs: dict

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValidationError(f"n_qubits must be 1 or 2, got {self.n_qubits}")
        clean = {}
        for key, value in self.probs.items():
            if len(key) != self.n_qubits or any(c not in "IXYZ" for c in key):
                raise ValidationError(f"bad Pauli string {key!r} for n={self.n_qubits}")
            value = float(value)
            if value < 0:
                raise ValidationError(f"negative probability {value!r} for {key!r}")
            clean[key] = value
        total = sum(clean.values())
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
        self.probs = clean

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def prob(self, s: str) -> float:
        return self.probs.get(s, 0.0)


@dataclass
class KrausChannel:
    """Generic channel in Kraus form; completeness is checked on construction."""

    kraus_ops: tuple
    dim_in: int
    dim_out: int

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        acc = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for k in ops:
            if k.shape != (self.dim_out, self.dim_in):
                raise ValidationError(
                    f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})"
                )
            acc += k.conj().T @ k
        if np.max(np.abs(acc - np.eye(self.dim_in))) > 1e-10:
            raise ValidationError("Kraus operators do not satisfy sum K^dag K = 1")
        self.kraus_ops = ops


def correlated_channel(params: ChannelParams) -> PauliChannel:
    """Two-qubit correlated-flip channel for the given (p, mu)."""
    coeffs = correlated_coefficients(params.p, params.mu)
    return PauliChannel(2, {k: float(v) for k, v in coeffs.items()})


def as_kraus(ch: PauliChannel) -> KrausChannel:
    ops = tuple(
        np.sqrt(q) * pauli_string_matrix(s) for s, q in sorted(ch.probs.items()) if q > 0
    )
    return KrausChannel(ops, ch.dim, ch.dim)


def _apply_matrix(ch: PauliChannel, m: np.ndarray) -> np.ndarray:
    """Channel action on an arbitrary matrix (no state validation)."""
    out = np.zeros_like(m, dtype=complex)
    for s, q in ch.probs.items():
        if q == 0.0:
            continue
        pm = pauli_string_matrix(s)
        out += q * (pm @ m @ pm)
    return out


def apply(ch: PauliChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the channel to a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise ValidationError(f"state shape {rho.shape} != ({ch.dim}, {ch.dim})")
    qmath.require_hermitian(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-6:
        raise ValidationError(f"state trace is {tr!r}, expected 1")
    return _apply_matrix(ch, rho)


def choi(ch: PauliChannel) -> np.ndarray:
    """Choi state of the channel, tensor order (R1, S1[, R2, S2]).

    Each Pauli string contributes its probability on the product of Bell
    vectors (1 x sigma)|phi+> per pair, so the result is diagonal in the
    product Bell basis.
    """
    pair_vecs = {c: np.kron(I2, PAULI[c]) @ PHI_PLUS for c in "IXYZ"}
    dim = ch.dim ** 2
    out = np.zeros((dim, dim), dtype=complex)
    for s, q in ch.probs.items():
        vec = pair_vecs[s[0]]
        for c in s[1:]:
            vec = np.kron(vec, pair_vecs[c])
        out += q * np.outer(vec, vec.conj())
    return out


def marginal(ch: PauliChannel, which: int) -> PauliChannel:
    """Single-qubit channel seen by one arm (1 or 2) of a two-qubit channel."""
    if ch.n_qubits != 2:
        raise ValidationError("marginal requires a two-qubit channel")
    if which not in (1, 2):
        raise ValidationError(f"which must be 1 or 2, got {which!r}")
    probs: dict = {}
    for s, q in ch.probs.items():
        letter = s[which - 1]
        probs[letter] = probs.get(letter, 0.0) + q
    return PauliChannel(1, probs)


def theory_correlators(params: ChannelParams) -> np.ndarray:
    """Ideal 3x3 same-axis correlator matrix in the printed (no-transpose)
    sign convention: entry (i, j) = (-1)^{#Y} * Tr[(s_i x s_j) E(s_i x s_j)]/4.
    """
    p = float(params.p)
    v = float(params.p * (1 - params.p) * (1 - params.mu))
    xy = -1.0 + 2.0 * p
    yy = 1.0 - 4.0 * v
    return np.array(
        [
            [1.0, xy, -xy],
            [xy, yy, -yy],
            [-xy, -yy, yy],
        ]
    )


# ---------------------------------------------------------------------------
# voltage schedules
# ---------------------------------------------------------------------------

@dataclass
class Schedule:
    """Timed two-level voltage sequence for one channel arm.

    Durations are coerced to exact rationals (floats convert exactly), so
    overlap bookkeeping between two arms never accumulates rounding error.
    """

    segments: tuple = field(default=())

    def __post_init__(self):
        clean = []
        for duration, level in self.segments:
            duration = Fraction(duration)
            if duration <= 0:
                raise ValidationError(f"segment duration {duration} must be positive")
            if level not in _LEVELS:
                raise ValidationError(f"unknown voltage level {level!r}")
            clean.append((duration, level))
        if not clean:
            raise ValidationError("schedule needs at least one segment")
        self.segments = tuple(clean)

    @property
    def total(self) -> Fraction:
        return sum((d for d, _ in self.segments), Fraction(0))

    def level_time(self, level: str) -> Fraction:
        return sum((d for d, lv in self.segments if lv == level), Fraction(0))


def _breakpoints(s: Schedule) -> list:
    out = [Fraction(0)]
    for d, _ in s.segments:
        out.append(out[-1] + d)
    return out


def _level_at(s: Schedule, t: Fraction) -> str:
    acc = Fraction(0)
    for d, lv in s.segments:
        acc += d
        if t < acc:
            return lv
    return s.segments[-1][1]


def schedule_overlaps(s1: Schedule, s2: Schedule) -> dict:
    """Fractional time each (arm1, arm2) level pair is active, exact."""
    if s1.total != s2.total:
        raise ValidationError(
            f"schedule totals differ: {s1.total} vs {s2.total}"
        )
    times = sorted(set(_breakpoints(s1)) | set(_breakpoints(s2)))
    total = s1.total
    acc = {"II": Fraction(0), "IX": Fraction(0), "XI": Fraction(0), "XX": Fraction(0)}
    for lo, hi in zip(times[:-1], times[1:]):
        if hi == lo:
            continue
        key = _LEVEL_TO_PAULI[_level_at(s1, lo)] + _LEVEL_TO_PAULI[_level_at(s2, lo)]
        acc[key] += (hi - lo) / total
    return acc


def schedule_to_channel(s1: Schedule, s2: Schedule) -> PauliChannel:
    """Compile two arm schedules into the resulting two-qubit flip channel."""
    overlaps = schedule_overlaps(s1, s2)
    return PauliChannel(2, {k: float(v) for k, v in overlaps.items()})


def channel_to_schedules(params: ChannelParams, tc) -> tuple:
    """Voltage schedules realising the channel over counting time tc.

    Arm 1 makes a single V0 -> VX switch at (1-p)*tc.  Arm 2 anticipates
    that switch by the joint-off time A*tc and switches back to V0 for the
    same duration at the end, which sets the overlap weights while keeping
    the per-arm VX time equal to p*tc.
    """
    tc = Fraction(tc)
    if tc <= 0:
        raise DomainError(f"counting time {tc} must be positive")
    p = Fraction(params.p)
    mu = Fraction(params.mu)
    a = p * (1 - p) * (1 - mu)

    t0 = (1 - p) * tc
    w = a * tc

    def build(segs) -> Schedule:
        return Schedule(tuple((d, lv) for d, lv in segs if d > 0))

    arm1 = build([(t0, V0), (tc - t0, VX)])
    arm2 = build([(t0 - w, V0), (p * tc, VX), (w, V0)])
    return arm1, arm2


# ---------------------------------------------------------------------------
# correlator fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares estimate of the flip-channel weights.

    ``mu`` is None when p(1-p) vanishes (the correlation strength is then
    undefined); it may also fall slightly outside [0, 1] on noisy data, in
    which case ``params`` clamps it for downstream model use.
    """

    p: float
    mu: float | None
    residual: float
    a_ix: float
    a_xx: float

    @property
    def params(self) -> ChannelParams:
        mu = 0.0 if self.mu is None else min(1.0, max(0.0, self.mu))
        return ChannelParams(min(1.0, max(0.0, self.p)), mu)


def _fit_rows():
    """Affine model rows (const, coeff_v, coeff_w) for each correlator entry
    in axis order XX, XY, XZ, YX, YY, YZ, ZX, ZY, ZZ."""
    xy = (-1.0, 2.0, 2.0)
    xz = (1.0, -2.0, -2.0)
    yy = (1.0, -4.0, 0.0)
    yz = (-1.0, 4.0, 0.0)
    return [
        (1.0, 0.0, 0.0), xy, xz,
        xy, yy, yz,
        xz, yz, yy,
    ]


def fit_channel(values: np.ndarray, sigmas: np.ndarray | None = None) -> FitResult:
    """Fit (p, mu) to a measured 3x3 correlator matrix (printed convention).

    Minimizes the sigma-weighted squared deviation from the ideal-channel
    matrix over the weight simplex {A_IX >= 0, A_XX >= 0, A_II >= 0}.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (3, 3):
        raise ValidationError(f"correlator matrix shape {values.shape} != (3, 3)")
    if np.max(np.abs(values)) > 1.05:
        raise DataError("correlator magnitude exceeds 1.05")
    if sigmas is None:
        sigmas = np.ones((3, 3))
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.shape != (3, 3) or np.any(sigmas <= 0):
        raise ValidationError("sigmas must be a 3x3 matrix of positive entries")

    rows = _fit_rows()
    m = values.reshape(-1)
    wts = 1.0 / sigmas.reshape(-1)
    design = np.array([[r[1], r[2]] for r in rows]) * wts[:, None]
    target = (m - np.array([r[0] for r in rows])) * wts

    def chi2(x):
        resid = design @ x - target
        return float(resid @ resid)

    # unconstrained weighted least squares, then project onto the feasible
    # triangle v >= 0, w >= 0, 2v + w <= 1 by minimizing along its edges
    sol, *_ = np.linalg.lstsq(design, target, rcond=None)
    v, w = float(sol[0]), float(sol[1])

    def feasible(v, w):
        return v >= 0.0 and w >= 0.0 and 2.0 * v + w <= 1.0

    if not feasible(v, w):
        candidates = []
        edges = [
            (np.array([0.0, 0.0]), np.array([0.0, 1.0])),      # v = 0
            (np.array([0.0, 0.0]), np.array([1.0, 0.0])),      # w = 0, v in [0, 1/2] via t
            (np.array([0.0, 1.0]), np.array([1.0, -2.0])),     # 2v + w = 1
        ]
        spans = [1.0, 0.5, 0.5]
        for (x0, direction), span in zip(edges, spans):
            d = design @ direction
            r0 = design @ x0 - target
            denom = float(d @ d)
            t = 0.0 if denom == 0.0 else float(-(r0 @ d) / denom)
            t = min(span, max(0.0, t))
            candidates.append(x0 + t * direction)
        v, w = min(candidates, key=lambda x: chi2(x))
        v, w = float(v), float(w)

    p = v + w
    denom = p * (1.0 - p)
    mu = None if denom < 1e-9 else 1.0 - v / denom
    return FitResult(p=p, mu=mu, residual=chi2(np.array([v, w])), a_ix=v, a_xx=w)


# ---------------------------------------------------------------------------
# channel-spec JSON interface
# ---------------------------------------------------------------------------

def channel_from_spec(spec: dict) -> PauliChannel:
    """Build a channel from its JSON description.

    Accepted forms:
      {"type": "correlated_flip", "p": 0.5, "mu": 1.0}
      {"type": "pauli", "n": 2, "probs": {"II": 0.75, "XX": 0.25}}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValidationError("channel spec must be an object with a 'type' field")
    kind = spec["type"]
    if kind == "correlated_flip":
        try:
            params = ChannelParams(float(spec["p"]), float(spec["mu"]))
        except KeyError as exc:
            raise ValidationError(f"correlated_flip spec missing {exc}") from exc
        return correlated_channel(params)
    if kind == "pauli":
        try:
            return PauliChannel(int(spec["n"]), dict(spec["probs"]))
        except KeyError as exc:
            raise ValidationError(f"pauli spec missing {exc}") from exc
    raise ValidationError(f"unknown channel spec type {kind!r}")


def channel_to_spec(ch: PauliChannel) -> dict:
    return {"type": "pauli", "n": ch.n_qubits, "probs": dict(sorted(ch.probs.items()))}

"""Detectable lower bound on the quantum capacity from separable-scheme data.

The witness is

    Q_det = S[E(I/d)] - min_B H(p_B),

where p_B is the diagonal of the *accessible* Choi operator in a product
basis B, and the minimum runs over three families of Bell-state
superpositions per pair, each parametrized by two angles.  The accessible
Choi operator is assembled from the same-axis prepare/measure correlators
only; perturbing any coefficient outside that measured set provably leaves
every p_B unchanged, which is why three settings per pair suffice.

Internal sign convention: all coefficients are stored with the reference
side transposed, i.e. the pair correlator for axis i equals
Tr[sigma_i E(sigma_i)]/d.  Data recorded without the transposition flips the
sign of every coefficient with a Y on a reference slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .capacity import CapacityReport, exact_capacity
from .channels import ChannelParams, PauliChannel, _apply_matrix, correlated_channel, marginal
from .errors import ConfigError, DataError, ValidationError
from .paulis import AXES, BELL_MATRIX, PAULI, PAULI_T
from .qmath import NEG_FLOOR, check_prob_vector, hreg, von_neumann_entropy

FAMILIES = ("B1", "B2", "B3")

# at theta = 0 every family reduces to the Bell basis, so minima frequently
# tie; ties resolve to B2 first, then by angles closest to zero
_FAMILY_PREFERENCE = {"B2": 0, "B1": 1, "B3": 2}

# measured per-pair components "rs": sigma_r^T on the reference slot times
# sigma_s on the output slot; same-axis prepare/measure settings give exactly
# the identity, the three pair correlators and the one-sided moments
TOKENS = ("II", "XX", "YY", "ZZ", "XI", "YI", "ZI", "IX", "IY", "IZ")
_TOKEN_INDEX = {t: i for i, t in enumerate(TOKENS)}


def token_operator(token: str) -> np.ndarray:
    """4x4 operator sigma_r^T (x) sigma_s for a two-letter token "rs"."""
    if len(token) != 2 or any(c not in "IXYZ" for c in token):
        raise ValidationError(f"bad component token {token!r}")
    return np.kron(PAULI_T[token[0]], PAULI[token[1]])


_TOKEN_OPS = np.stack([token_operator(t) for t in TOKENS])
_TOKEN_OPS_BELL = np.einsum(
    "ij,ajk,kl->ail", BELL_MATRIX.conj().T, _TOKEN_OPS, BELL_MATRIX
)


def _split_key(key: str, n_pairs: int) -> tuple:
    parts = tuple(key.split(","))
    if len(parts) != n_pairs:
        raise ValidationError(f"key {key!r} does not have {n_pairs} pair components")
    return parts


def transpose_sign(key: str) -> int:
    """Sign relating transposed and untransposed conventions for one key:
    (-1) per Y on a reference slot."""
    flips = sum(1 for part in key.split(",") for c in part[:1] if c == "Y")
    return -1 if flips % 2 else 1


@dataclass
class AccessibleChoi:
    """Measured part of the Choi operator, in the transpose convention.

    Coefficient keys join one component token per pair with a comma, e.g.
    "XX,II" for the pair-1 X correlator of a two-pair object.  The
    all-identity coefficient is implicit (fixed to 1).  ``sigmas`` carries
    one standard error per measured key (zero for exact data); keys absent
    from ``coefficients`` are unmeasured and treated as zero.
    """

    n_pairs: int
    coefficients: dict
    sigmas: dict = field(default_factory=dict)
    assumptions: tuple = ()

    def __post_init__(self):
        if self.n_pairs not in (1, 2):
            raise ValidationError(f"n_pairs must be 1 or 2, got {self.n_pairs}")
        identity = ",".join(["II"] * self.n_pairs)
        clean = {}
        for key, value in self.coefficients.items():
            for part in _split_key(key, self.n_pairs):
                if part not in _TOKEN_INDEX:
                    raise ValidationError(f"component {part!r} is not a measured token")
            value = float(value)
            if key == identity:
                if abs(value - 1.0) > 1e-9:
                    raise ValidationError(f"all-identity coefficient is {value!r}, not 1")
                continue
            if abs(value) > 1.05:
                raise DataError(f"coefficient {key}={value!r} outside [-1.05, 1.05]")
            clean[key] = value
        self.coefficients = clean
        self.sigmas = {k: float(v) for k, v in self.sigmas.items() if k != identity}
        self.assumptions = tuple(self.assumptions)

    def coefficient(self, key: str) -> float:
        return self.coefficients.get(key, 0.0)


def accessible_choi_from_channel(ch: PauliChannel) -> AccessibleChoi:
    """Exact accessible coefficients of a Pauli channel.

    Each key "r1s1[,r2s2]" evaluates to Tr[R E(S)]/d with R, S the Pauli
    strings of reference and output letters.
    """
    n = ch.n_qubits
    d = ch.dim
    coeffs = {}
    for combo in product(TOKENS, repeat=n):
        key = ",".join(combo)
        if all(t == "II" for t in combo):
            continue
        ref = np.array([[1.0]], dtype=complex)
        out = np.array([[1.0]], dtype=complex)
        for t in combo:
            ref = np.kron(ref, PAULI[t[0]])
            out = np.kron(out, PAULI[t[1]])
        value = np.trace(ref @ _apply_matrix(ch, out)) / d
        if abs(value.imag) > 1e-12:
            raise ValidationError(f"coefficient {key} has imaginary part {value.imag}")
        coeffs[key] = float(value.real)
    sigmas = {k: 0.0 for k in coeffs}
    return AccessibleChoi(n_pairs=n, coefficients=coeffs, sigmas=sigmas)


def marginal_view(choi: AccessibleChoi, pair: int) -> AccessibleChoi:
    """Single-pair accessible object for one pair of a two-pair one."""
    if choi.n_pairs != 2:
        raise ValidationError("marginal_view requires a two-pair object")
    if pair not in (1, 2):
        raise ValidationError(f"pair must be 1 or 2, got {pair!r}")
    coeffs = {}
    sigmas = {}
    for key, value in choi.coefficients.items():
        first, second = _split_key(key, 2)
        own, other = (first, second) if pair == 1 else (second, first)
        if other == "II" and own != "II":
            coeffs[own] = value
            if key in choi.sigmas:
                sigmas[own] = choi.sigmas[key]
    return AccessibleChoi(1, coeffs, sigmas, choi.assumptions)


def bell_probabilities(choi: AccessibleChoi, pair: int = 1) -> np.ndarray:
    """Bell-basis probabilities (phi+, phi-, psi+, psi-) of one pair."""
    view = choi if choi.n_pairs == 1 else marginal_view(choi, pair)
    cx, cy, cz = (view.coefficient(ax + ax) for ax in AXES)
    q = np.array(
        [
            1.0 + cx + cy + cz,
            1.0 - cx - cy + cz,
            1.0 + cx - cy - cz,
            1.0 - cx + cy - cz,
        ]
    ) / 4.0
    return check_prob_vector(q)


def accessible_operator(choi: AccessibleChoi, extra: dict | None = None) -> np.ndarray:
    """Assemble the accessible Choi operator as an explicit matrix.

    ``extra`` may add coefficients for arbitrary (also unmeasured) component
    tokens; it exists so tests can probe which products influence the
    witness.
    """
    d = 4 ** choi.n_pairs
    out = np.eye(d, dtype=complex)
    items = dict(choi.coefficients)
    if extra:
        items = {**items, **extra}
    for key, value in items.items():
        parts = key.split(",")
        if len(parts) != choi.n_pairs:
            raise ValidationError(f"key {key!r} does not have {choi.n_pairs} components")
        op = np.array([[1.0]], dtype=complex)
        for part in parts:
            op = np.kron(op, token_operator(part))
        out += float(value) * op
    return out / d


def output_state(choi: AccessibleChoi) -> np.ndarray:
    """Channel output at the maximally mixed input, reconstructed from the
    output-side coefficients (absent ones count as zero)."""
    if choi.n_pairs == 1:
        out = np.eye(2, dtype=complex)
        for ax in AXES:
            out += choi.coefficient("I" + ax) * PAULI[ax]
        return out / 2.0
    out = np.eye(4, dtype=complex)
    for ax in AXES:
        out += choi.coefficient(f"I{ax},II") * np.kron(PAULI[ax], np.eye(2))
        out += choi.coefficient(f"II,I{ax}") * np.kron(np.eye(2), PAULI[ax])
    for ax1 in AXES:
        for ax2 in AXES:
            out += choi.coefficient(f"I{ax1},I{ax2}") * np.kron(PAULI[ax1], PAULI[ax2])
    return out / 4.0


def output_entropy(choi: AccessibleChoi) -> float:
    return von_neumann_entropy(output_state(choi))


# ---------------------------------------------------------------------------
# basis families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairBasis:
    """One pair's basis choice: family plus the two mixing angles, with
    amplitudes (a, b) = (cos, sin) theta_b and (c, d) = (cos, sin) theta_d."""

    family: str
    theta_b: float = 0.0
    theta_d: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown basis family {self.family!r}")


@dataclass(frozen=True)
class BasisSpec:
    """Product basis: one PairBasis per channel pair."""

    pairs: tuple

    def __post_init__(self):
        if len(self.pairs) not in (1, 2) or not all(
            isinstance(p, PairBasis) for p in self.pairs
        ):
            raise ValidationError("BasisSpec needs one or two PairBasis entries")


def _bell_columns(fams: np.ndarray, tb: np.ndarray, td: np.ndarray) -> np.ndarray:
    """Basis vectors in Bell coordinates for arrays of pair configurations.

    Returns shape (n, 4, 4); [k, :, m] is the m-th basis vector of
    configuration k in the (phi+, phi-, psi+, psi-) coordinates.
    """
    n = len(fams)
    a, b = np.cos(tb), np.sin(tb)
    c, d = np.cos(td), np.sin(td)
    v = np.zeros((n, 4, 4), dtype=complex)

    m = fams == 0  # B1: {phi+, phi-} and {psi+, psi-} blocks
    v[m, 0, 0], v[m, 1, 0] = a[m], b[m]
    v[m, 0, 1], v[m, 1, 1] = -b[m], a[m]
    v[m, 2, 2], v[m, 3, 2] = c[m], d[m]
    v[m, 2, 3], v[m, 3, 3] = -d[m], c[m]

    m = fams == 1  # B2: {phi+, psi+} and {phi-, psi-} blocks
    v[m, 0, 0], v[m, 2, 0] = a[m], b[m]
    v[m, 0, 1], v[m, 2, 1] = -b[m], a[m]
    v[m, 1, 2], v[m, 3, 2] = c[m], d[m]
    v[m, 1, 3], v[m, 3, 3] = -d[m], c[m]

    m = fams == 2  # B3: {phi+, psi-} and {phi-, psi+} blocks with i phases
    v[m, 0, 0], v[m, 3, 0] = a[m], 1j * b[m]
    v[m, 0, 1], v[m, 3, 1] = 1j * b[m], a[m]
    v[m, 1, 2], v[m, 2, 2] = c[m], 1j * d[m]
    v[m, 1, 3], v[m, 2, 3] = 1j * d[m], c[m]
    return v


def basis_vectors(spec: BasisSpec, pair_index: int = 0) -> np.ndarray:
    """The four basis vectors of one pair, as columns in the computational
    two-qubit basis."""
    pb = spec.pairs[pair_index]
    fam = np.array([FAMILIES.index(pb.family)])
    coeffs = _bell_columns(fam, np.array([pb.theta_b]), np.array([pb.theta_d]))[0]
    return BELL_MATRIX @ coeffs


def _pair_features(fams: np.ndarray, tb: np.ndarray, td: np.ndarray) -> np.ndarray:
    """Expectations <v|T_a|v> of every measured component for each basis
    vector; shape (n, 10, 4)."""
    v = _bell_columns(fams, tb, td)
    w = np.matmul(_TOKEN_OPS_BELL[None, :, :, :], v[:, None, :, :])
    return (v.conj()[:, None, :, :] * w).sum(axis=2).real


def _pair_features_one(fam: int, tb: float, td: float) -> np.ndarray:
    """Single-configuration features, shape (10, 4); cheap enough for use
    inside the simplex refinement loop."""
    v = _bell_columns(np.array([fam]), np.array([tb]), np.array([td]))[0]
    w = np.matmul(_TOKEN_OPS_BELL, v)
    return (v.conj()[None, :, :] * w).sum(axis=1).real


def _coefficient_vector(choi: AccessibleChoi) -> np.ndarray:
    c = np.zeros(len(TOKENS))
    c[0] = 1.0
    for key, value in choi.coefficients.items():
        c[_TOKEN_INDEX[key]] = value
    return c


def _coefficient_matrix(choi: AccessibleChoi) -> np.ndarray:
    c = np.zeros((len(TOKENS), len(TOKENS)))
    c[0, 0] = 1.0
    for key, value in choi.coefficients.items():
        first, second = _split_key(key, 2)
        c[_TOKEN_INDEX[first], _TOKEN_INDEX[second]] = value
    return c


def probability_vector(choi: AccessibleChoi, basis: BasisSpec) -> np.ndarray:
    """Diagonal of the accessible operator in the given product basis.

    For two pairs the 16 entries are ordered with the pair-1 basis index
    major.  Entries below the -0.05 floor raise DataError.
    """
    if len(basis.pairs) != choi.n_pairs:
        raise ValidationError(
            f"basis has {len(basis.pairs)} pairs, data has {choi.n_pairs}"
        )
    feats = []
    for pb in basis.pairs:
        fam = np.array([FAMILIES.index(pb.family)])
        feats.append(
            _pair_features(fam, np.array([pb.theta_b]), np.array([pb.theta_d]))[0]
        )
    if choi.n_pairs == 1:
        p = _coefficient_vector(choi) @ feats[0] / 4.0
    else:
        c = _coefficient_matrix(choi)
        p = (feats[0].T @ c @ feats[1]).reshape(-1) / 16.0
    return check_prob_vector(p)


# ---------------------------------------------------------------------------
# witness optimization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    """Grid-then-refine settings for the entropy minimization."""

    grid_points: int = 21
    refine: bool = True
    refine_starts: int = 5
    refine_maxiter: int = 400
    fatol: float = 1e-12
    xatol: float = 1e-7
    tie_tol: float = 1e-9
    chunk: int = 64

    def __post_init__(self):
        if self.grid_points < 3:
            raise ConfigError("grid_points must be at least 3")
        if self.refine_starts < 1:
            raise ConfigError("refine_starts must be at least 1")


@dataclass
class WitnessResult:
    """Witness value with its optimizing basis and diagnostics.

    ``q_det`` is the reported (clamped-at-zero) value; the raw value is kept
    alongside since the clamp is a presentation rule.
    """

    q_det: float
    q_det_raw: float
    clamped: bool
    best_basis: BasisSpec
    prob_vector: np.ndarray
    entropy_min: float
    output_entropy: float
    sigma_q: float | None = None
    assumptions: tuple = ()


def _entropy_rows(p: np.ndarray, axis) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p != 0.0, p * np.log2(np.abs(p)), 0.0)
    return -terms.sum(axis=axis)


def _check_floor(p_min: float):
    if p_min < NEG_FLOOR:
        raise DataError(
            f"basis probability {p_min:.6f} below the {NEG_FLOOR} floor; "
            "data is inconsistent beyond statistical noise"
        )


def _grid_thetas(n: int) -> np.ndarray:
    return np.linspace(-np.pi / 2, np.pi / 2, n)


def _pair_grid(n: int) -> tuple:
    """All (family, theta_b, theta_d) grid configurations for one pair."""
    thetas = _grid_thetas(n)
    tb, td = np.meshgrid(thetas, thetas, indexing="ij")
    tb, td = tb.ravel(), td.ravel()
    fams = np.repeat(np.arange(3), tb.size)
    return fams, np.tile(tb, 3), np.tile(td, 3)


def _pref_key(fams, thetas) -> tuple:
    return (
        tuple(_FAMILY_PREFERENCE[FAMILIES[f]] for f in fams)
        + tuple(abs(t) for t in thetas)
        + tuple(thetas)
    )


def _pick(candidates: list, tie_tol: float) -> tuple:
    """Lowest-entropy candidate; near-ties resolve by the preference key."""
    best_h = min(h for h, _, _ in candidates)
    tied = [c for c in candidates if c[0] <= best_h + tie_tol]
    return min(tied, key=lambda c: (c[1]))


def _single_pair_entropy(cvec: np.ndarray, fams, tb, td) -> tuple:
    p = np.einsum("a,cam->cm", cvec, _pair_features(fams, tb, td)) / 4.0
    return _entropy_rows(p, axis=1), float(p.min())


def _single_pair_entropy_point(cvec: np.ndarray, fam: int, thetas) -> float:
    p = cvec @ _pair_features_one(fam, thetas[0], thetas[1]) / 4.0
    _check_floor(float(p.min()))
    return float(_entropy_rows(p, axis=0))


def _two_pair_entropy_point(cmat: np.ndarray, fams: tuple, thetas) -> float:
    f1 = _pair_features_one(fams[0], thetas[0], thetas[1])
    f2 = _pair_features_one(fams[1], thetas[2], thetas[3])
    p = (f1.T @ cmat @ f2) / 16.0
    _check_floor(float(p.min()))
    return float(_entropy_rows(p.reshape(-1), axis=0))


def _refine(objective, x0: np.ndarray, config: SearchConfig) -> tuple:
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": config.refine_maxiter,
            "fatol": config.fatol,
            "xatol": config.xatol,
        },
    )
    return float(res.fun), np.asarray(res.x, dtype=float)


def _search_single(choi: AccessibleChoi, config: SearchConfig) -> tuple:
    cvec = _coefficient_vector(choi)
    fams, tb, td = _pair_grid(config.grid_points)
    h, p_min = _single_pair_entropy(cvec, fams, tb, td)
    _check_floor(p_min)

    order = np.argsort(h, kind="stable")[: max(config.refine_starts, 1)]
    candidates = []
    h_min = float(h.min())
    for idx in np.flatnonzero(h <= h_min + config.tie_tol):
        th = (float(tb[idx]), float(td[idx]))
        candidates.append((float(h[idx]), _pref_key((fams[idx],), th), ((int(fams[idx]),), th)))

    if config.refine:
        for idx in order:
            fam = int(fams[idx])

            def objective(x, fam=fam):
                return _single_pair_entropy_point(cvec, fam, x)

            h_ref, x_ref = _refine(objective, np.array([tb[idx], td[idx]]), config)
            th = (float(x_ref[0]), float(x_ref[1]))
            candidates.append((h_ref, _pref_key((fam,), th), ((fam,), th)))

    h_best, _, (fam_best, th_best) = _pick(candidates, config.tie_tol)
    basis = BasisSpec((PairBasis(FAMILIES[fam_best[0]], th_best[0], th_best[1]),))
    return h_best, basis


def _search_double(choi: AccessibleChoi, config: SearchConfig) -> tuple:
    cmat = _coefficient_matrix(choi)
    fams, tb, td = _pair_grid(config.grid_points)
    feats = _pair_features(fams, tb, td)
    g = np.einsum("cam,ab->cbm", feats, cmat)

    n = feats.shape[0]
    h = np.empty((n, n))
    p_min = np.inf
    for lo in range(0, n, config.chunk):
        hi = min(lo + config.chunk, n)
        p = np.einsum("cbm,dbn->cdmn", g[lo:hi], feats, optimize=True) / 16.0
        p_min = min(p_min, float(p.min()))
        h[lo:hi] = _entropy_rows(p.reshape(hi - lo, n, 16), axis=2)
    _check_floor(p_min)

    flat = h.ravel()
    h_min = float(flat.min())

    def unpack(idx: int) -> tuple:
        i, j = divmod(int(idx), n)
        return (int(fams[i]), int(fams[j])), (
            float(tb[i]), float(td[i]), float(tb[j]), float(td[j])
        )

    candidates = []
    for idx in np.flatnonzero(flat <= h_min + config.tie_tol):
        fam_pair, th = unpack(idx)
        candidates.append((float(flat[idx]), _pref_key(fam_pair, th), (fam_pair, th)))

    if config.refine:
        n_starts = min(config.refine_starts, flat.size)
        starts = np.argpartition(flat, n_starts - 1)[:n_starts]
        starts = starts[np.argsort(flat[starts], kind="stable")]
        for idx in starts:
            fam_pair, th = unpack(idx)

            def objective(x, fam_pair=fam_pair):
                return _two_pair_entropy_point(cmat, fam_pair, x)

            h_ref, x_ref = _refine(objective, np.array(th), config)
            th_ref = tuple(float(t) for t in x_ref)
            candidates.append((h_ref, _pref_key(fam_pair, th_ref), (fam_pair, th_ref)))

    h_best, _, (fam_pair, th) = _pick(candidates, config.tie_tol)
    basis = BasisSpec(
        (
            PairBasis(FAMILIES[fam_pair[0]], th[0], th[1]),
            PairBasis(FAMILIES[fam_pair[1]], th[2], th[3]),
        )
    )
    return h_best, basis


def q_det(choi: AccessibleChoi, search: SearchConfig | None = None) -> WitnessResult:
    """Witness value: output entropy minus the minimized basis entropy."""
    config = search or SearchConfig()
    s_out = output_entropy(choi)
    if choi.n_pairs == 1:
        h_min, basis = _search_single(choi, config)
    else:
        h_min, basis = _search_double(choi, config)
    raw = s_out - h_min
    return WitnessResult(
        q_det=max(0.0, raw),
        q_det_raw=raw,
        clamped=raw < 0.0,
        best_basis=basis,
        prob_vector=probability_vector(choi, basis),
        entropy_min=h_min,
        output_entropy=s_out,
        assumptions=choi.assumptions,
    )


def q_lim(
    source: AccessibleChoi | ChannelParams,
    search: SearchConfig | None = None,
) -> CapacityReport:
    """Witnessed capacity of the two arms used independently (Q1 + Q2).

    Accepts either a two-pair accessible object whose per-pair correlators
    were measured, or fitted channel parameters when they were not.
    """
    if isinstance(source, ChannelParams):
        ch = correlated_channel(source)
        views = [
            accessible_choi_from_channel(marginal(ch, 1)),
            accessible_choi_from_channel(marginal(ch, 2)),
        ]
        q_exact = exact_capacity(source)
    else:
        views = [marginal_view(source, 1), marginal_view(source, 2)]
        if not views[0].coefficients or not views[1].coefficients:
            raise DataError(
                "per-pair correlators are absent; fit channel parameters first"
            )
        q_exact = None
    q1 = q_det(views[0], search).q_det
    q2 = q_det(views[1], search).q_det
    return CapacityReport(q1=q1, q2=q2, q_lim=q1 + q2, q_exact=q_exact)


# ---------------------------------------------------------------------------
# finite-statistics error on the witness
# ---------------------------------------------------------------------------

def _warm_q_det(choi: AccessibleChoi, base: WitnessResult, config: SearchConfig) -> float:
    """Raw witness value via simplex refinement from a known good basis only."""
    s_out = output_entropy(choi)
    pairs = base.best_basis.pairs
    fam_pair = tuple(FAMILIES.index(pb.family) for pb in pairs)
    x0 = np.array([t for pb in pairs for t in (pb.theta_b, pb.theta_d)])
    if choi.n_pairs == 1:
        cvec = _coefficient_vector(choi)

        def objective(x):
            return _single_pair_entropy_point(cvec, fam_pair[0], x)

    else:
        cmat = _coefficient_matrix(choi)

        def objective(x):
            return _two_pair_entropy_point(cmat, fam_pair, x)

    h_ref, _ = _refine(objective, x0, config)
    h_ref = min(h_ref, float(objective(x0)))
    return s_out - h_ref


def bootstrap_error(
    choi: AccessibleChoi,
    resamples: int,
    seed: int,
    search: SearchConfig | None = None,
    base: WitnessResult | None = None,
    rederive=None,
) -> float:
    """Standard deviation of the witness under Gaussian resampling of every
    measured coefficient (truncated to [-1, 1]).

    The spread is taken over the raw (unclamped) witness values, so runs
    whose reported value clamps to zero still carry a meaningful error bar.
    Each resample re-minimizes the entropy by simplex refinement from the
    unperturbed optimum, which tracks the smooth drift of the minimum at a
    fraction of the full-grid cost.  ``rederive`` may rebuild derived
    (model-assisted) coefficients from the perturbed measured ones.
    Deterministic for a fixed seed.
    """
    if resamples < 10:
        raise ConfigError(f"need at least 10 resamples, got {resamples}")
    config = search or SearchConfig()
    if base is None:
        base = q_det(choi, config)
    measured = sorted(k for k, s in choi.sigmas.items() if s > 0)
    if not measured:
        return 0.0

    values = np.empty(resamples)
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(resamples)):
        rng = np.random.default_rng(ss)
        noise = rng.standard_normal(len(measured))
        coeffs = dict(choi.coefficients)
        for k, z in zip(measured, noise):
            coeffs[k] = float(np.clip(choi.coefficients[k] + choi.sigmas[k] * z, -1.0, 1.0))
        if rederive is not None:
            resampled = rederive(coeffs)
        else:
            resampled = replace(choi, coefficients=coeffs)
        values[i] = _warm_q_det(resampled, base, config)
    return float(np.std(values, ddof=1))

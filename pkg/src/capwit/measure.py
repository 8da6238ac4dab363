"""Simulation of the separable prepare-and-measure scheme.

For each setting (one Pauli axis per channel arm) the system qubits are
prepared uniformly in the +-1 eigenstates of that axis and measured along
the same axis after the channel.  Averages of products of preparation and
outcome signs reproduce the correlators of the virtual entangled-input
experiment: the sign label of the preparation plays the role of a
transposed-observable measurement on the reference side, so the derived
coefficients are natively in the transpose convention
(pair correlator = Tr[sigma_i E(sigma_i)]/d).

A coefficient estimable under several settings (identity slots do not pin
the axis) is pooled over all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .channels import PauliChannel, _apply_matrix
from .errors import ConfigError, ValidationError
from .paulis import AXES, eigenprojector
from .witness import TOKENS, AccessibleChoi, transpose_sign

SIGNS = (+1, -1)


@dataclass(frozen=True)
class Setting:
    """Measurement setting: one Pauli axis per pair."""

    axes: tuple

    def __post_init__(self):
        if len(self.axes) not in (1, 2) or any(a not in AXES for a in self.axes):
            raise ValidationError(f"bad setting axes {self.axes!r}")


@dataclass
class SettingData:
    """Joint outcome statistics for one setting.

    ``counts`` maps a sign string over (preps..., outcomes...) such as
    "+-++" to a count; for exact records ``shots`` is None and counts hold
    the exact outcome probabilities instead.
    """

    axes: tuple
    shots: int | None
    counts: dict

    @property
    def total(self) -> float:
        return float(sum(self.counts.values()))


@dataclass
class CorrelatorRecord:
    """Full data product of one run of the scheme."""

    n_pairs: int
    convention: str
    settings: tuple
    coefficients: dict
    sigmas: dict
    metadata: dict = field(default_factory=dict)


def all_settings(n_pairs: int) -> tuple:
    return tuple(Setting(axes) for axes in product(AXES, repeat=n_pairs))


def _outcome_keys(n_pairs: int) -> list:
    keys = []
    for signs in product(SIGNS, repeat=2 * n_pairs):
        keys.append("".join("+" if s > 0 else "-" for s in signs))
    return keys


def _joint_distribution(ch: PauliChannel, setting: Setting) -> dict:
    """Exact joint distribution over (prep signs, outcome signs)."""
    n = ch.n_qubits
    prep_weight = 0.5 ** n
    dist = {}
    for preps in product(SIGNS, repeat=n):
        rho = np.array([[1.0]], dtype=complex)
        for axis, s in zip(setting.axes, preps):
            rho = np.kron(rho, eigenprojector(axis, s))
        out = _apply_matrix(ch, rho)
        for outs in product(SIGNS, repeat=n):
            proj = np.array([[1.0]], dtype=complex)
            for axis, o in zip(setting.axes, outs):
                proj = np.kron(proj, eigenprojector(axis, o))
            prob = float(np.trace(proj @ out).real)
            key = "".join("+" if s > 0 else "-" for s in preps + outs)
            dist[key] = prep_weight * max(prob, 0.0)
    return dist


def _sign_product(key: str, tokens: tuple, n_pairs: int) -> int:
    """Product of the prep/outcome signs selected by one component token per
    pair, evaluated on an outcome string (preps..., outcomes...)."""
    g = 1
    for k, tok in enumerate(tokens):
        s = 1 if key[k] == "+" else -1
        o = 1 if key[n_pairs + k] == "+" else -1
        if tok[0] != "I":
            g *= s
        if tok[1] != "I":
            g *= o
    return g


def _derive_coefficients(n_pairs: int, settings: tuple) -> tuple:
    """Pooled coefficient estimates and standard errors from setting data."""
    coefficients = {}
    sigmas = {}
    exact = all(sd.shots is None for sd in settings)
    for combo in product(TOKENS, repeat=n_pairs):
        if all(t == "II" for t in combo):
            continue
        key = ",".join(combo)
        num = 0.0
        weight = 0.0
        for sd in settings:
            # a token like "XX" or "XI" pins the setting axis of its pair;
            # "II" is estimable under any axis
            compatible = True
            for k, tok in enumerate(combo):
                axis = tok[0] if tok[0] != "I" else tok[1]
                if axis != "I" and axis != sd.axes[k]:
                    compatible = False
                    break
            if not compatible:
                continue
            for okey, count in sd.counts.items():
                num += count * _sign_product(okey, combo, n_pairs)
            weight += sd.total
        mean = num / weight
        coefficients[key] = float(np.clip(mean, -1.0, 1.0))
        if exact:
            sigmas[key] = 0.0
        else:
            var = max(0.0, 1.0 - mean * mean)
            sigmas[key] = float(np.sqrt(var / weight))
    return coefficients, sigmas


def exact_record(ch: PauliChannel, metadata: dict | None = None) -> CorrelatorRecord:
    """Infinite-statistics record: exact joint distributions per setting."""
    n = ch.n_qubits
    settings = []
    for setting in all_settings(n):
        dist = _joint_distribution(ch, setting)
        settings.append(SettingData(axes=setting.axes, shots=None, counts=dist))
    settings = tuple(settings)
    coefficients, sigmas = _derive_coefficients(n, settings)
    meta = {"mode": "exact"}
    if metadata:
        meta.update(metadata)
    return CorrelatorRecord(
        n_pairs=n,
        convention="transpose",
        settings=settings,
        coefficients=coefficients,
        sigmas=sigmas,
        metadata=meta,
    )


def sampled_record(
    ch: PauliChannel,
    shots_per_setting: int,
    seed: int,
    metadata: dict | None = None,
) -> CorrelatorRecord:
    """Finite-statistics record: one multinomial draw per setting.

    Each setting samples from its exact joint distribution with an
    independent seed derived from ``seed``, so the result is reproducible
    and independent of evaluation order.
    """
    if shots_per_setting < 1:
        raise ConfigError(f"shots_per_setting must be >= 1, got {shots_per_setting}")
    n = ch.n_qubits
    base_settings = all_settings(n)
    seeds = np.random.SeedSequence(seed).spawn(len(base_settings))
    settings = []
    for setting, ss in zip(base_settings, seeds):
        dist = _joint_distribution(ch, setting)
        keys = list(dist.keys())
        pvals = np.array([dist[k] for k in keys])
        pvals = pvals / pvals.sum()
        rng = np.random.default_rng(ss)
        draws = rng.multinomial(shots_per_setting, pvals)
        counts = {k: int(c) for k, c in zip(keys, draws)}
        settings.append(SettingData(axes=setting.axes, shots=shots_per_setting, counts=counts))
    settings = tuple(settings)
    coefficients, sigmas = _derive_coefficients(n, settings)
    meta = {"mode": "sampled", "shots_per_setting": shots_per_setting, "seed": seed}
    if metadata:
        meta.update(metadata)
    return CorrelatorRecord(
        n_pairs=n,
        convention="transpose",
        settings=settings,
        coefficients=coefficients,
        sigmas=sigmas,
        metadata=meta,
    )


def record_to_accessible_choi(rec: CorrelatorRecord) -> AccessibleChoi:
    """Transfer record coefficients into an accessible Choi object,
    normalizing the sign convention."""
    if rec.convention == "transpose":
        coeffs = dict(rec.coefficients)
    elif rec.convention == "no_transpose":
        coeffs = {k: v * transpose_sign(k) for k, v in rec.coefficients.items()}
    else:
        raise ValidationError(f"unknown convention tag {rec.convention!r}")
    return AccessibleChoi(
        n_pairs=rec.n_pairs,
        coefficients=coeffs,
        sigmas=dict(rec.sigmas),
    )

"""End-to-end analysis: data in, capacity report rows out.

Appendix-style datasets print only the nine pair-pair correlators, so the
single-pair correlators entering both the joint witness and Q1/Q2 are
reconstructed from a channel fit and flagged as model-assisted.  Records
from the simulator carry every measured coefficient and need no model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import CapacityReport, dephasing_capacity, exact_capacity
from .channels import ChannelParams, FitResult, correlated_channel, fit_channel, marginal
from .dataio import AppendixDataset, ReportRow
from .errors import ConfigError, DataError
from .measure import CorrelatorRecord, record_to_accessible_choi
from .paulis import AXES
from .witness import (
    AccessibleChoi,
    SearchConfig,
    WitnessResult,
    _warm_q_det,
    accessible_choi_from_channel,
    bootstrap_error,
    q_det,
    q_lim,
    transpose_sign,
)

# dataset coefficients are model-completed; these flags travel with results
ASSUMPTION_FIT_PAIRS = "pair_correlators_from_fit"
ASSUMPTION_UNITAL = "output_marginals_assumed_zero"


def _cc_key(ax1: str, ax2: str) -> str:
    return f"{ax1}{ax1},{ax2}{ax2}"


def _matrix_from_cc(cc_transpose: dict) -> np.ndarray:
    """Pair-pair coefficients (transpose convention) back to the printed
    no-transpose 3x3 matrix."""
    out = np.empty((3, 3))
    for i, ax1 in enumerate(AXES):
        for j, ax2 in enumerate(AXES):
            key = _cc_key(ax1, ax2)
            out[i, j] = cc_transpose[key] * transpose_sign(key)
    return out


def _choi_from_cc(cc_transpose: dict, sigmas_matrix: np.ndarray) -> tuple:
    """Accessible object from pair-pair data plus a fresh channel fit for the
    single-pair correlators."""
    fit = fit_channel(_matrix_from_cc(cc_transpose), sigmas_matrix)
    single = accessible_choi_from_channel(marginal(correlated_channel(fit.params), 1))
    coeffs = dict(cc_transpose)
    for ax in AXES:
        value = single.coefficient(ax + ax)
        coeffs[f"{ax}{ax},II"] = value
        coeffs[f"II,{ax}{ax}"] = value
    sigmas = {}
    for i, ax1 in enumerate(AXES):
        for j, ax2 in enumerate(AXES):
            sigmas[_cc_key(ax1, ax2)] = float(sigmas_matrix[i, j])
    choi = AccessibleChoi(
        n_pairs=2,
        coefficients=coeffs,
        sigmas=sigmas,
        assumptions=(ASSUMPTION_FIT_PAIRS, ASSUMPTION_UNITAL),
    )
    return choi, fit


def dataset_to_accessible_choi(ds: AppendixDataset) -> tuple:
    """Accessible object plus the channel fit backing its model-assisted
    coefficients."""
    if ds.convention != "no_transpose":
        raise DataError(f"unsupported dataset convention {ds.convention!r}")
    values = ds.values
    cc = {}
    for i, ax1 in enumerate(AXES):
        for j, ax2 in enumerate(AXES):
            key = _cc_key(ax1, ax2)
            cc[key] = float(values[i, j]) * transpose_sign(key)
    return _choi_from_cc(cc, ds.sigmas)


@dataclass
class DatasetAnalysis:
    """Everything the report needs for one dataset."""

    dataset: AppendixDataset
    fit: FitResult
    witness: WitnessResult
    capacities: CapacityReport
    q_theory: float
    sigma_q: float | None = None
    sigma_lim: float | None = None
    sigma_diff: float | None = None

    def report_row(self) -> ReportRow:
        return ReportRow(
            p=float(self.dataset.p),
            mu=float(self.dataset.mu),
            q_theory=self.q_theory,
            q_det_raw=self.witness.q_det_raw,
            q_det=self.witness.q_det,
            sigma_q=self.sigma_q,
            q1=self.capacities.q1,
            q2=self.capacities.q2,
            q_lim=self.capacities.q_lim,
            clamped=self.witness.clamped,
            assumptions=self.witness.assumptions,
            p_label=self.dataset.p_label,
            mu_label=self.dataset.mu_label,
        )


def _bootstrap_dataset(
    ds: AppendixDataset,
    base: WitnessResult,
    resamples: int,
    seed: int,
    config: SearchConfig,
) -> tuple:
    """Joint bootstrap of (Q_tot, Q_lim) under Gaussian resampling of the
    printed entries, re-fitting the channel per resample.  Spreads are taken
    over the raw (unclamped) values."""
    if resamples < 10:
        raise ConfigError(f"need at least 10 resamples, got {resamples}")
    values = ds.values
    sigmas = ds.sigmas
    q_tot = np.empty(resamples)
    q_sum = np.empty(resamples)
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(resamples)):
        rng = np.random.default_rng(ss)
        perturbed = np.clip(values + sigmas * rng.standard_normal((3, 3)), -1.0, 1.0)
        cc = {}
        for a, ax1 in enumerate(AXES):
            for b, ax2 in enumerate(AXES):
                key = _cc_key(ax1, ax2)
                cc[key] = float(perturbed[a, b]) * transpose_sign(key)
        choi, fit = _choi_from_cc(cc, sigmas)
        q_tot[i] = _warm_q_det(choi, base, config)
        # the single-pair witness on the fitted marginal equals the closed
        # form 1 - H2(p) at the Bell point, so the per-resample Q_lim spread
        # is taken from the refit directly
        q_sum[i] = 2.0 * dephasing_capacity(fit.params.p)
    sigma_tot = float(np.std(q_tot, ddof=1))
    sigma_lim = float(np.std(q_sum, ddof=1))
    sigma_diff = float(np.std(q_tot - q_sum, ddof=1))
    return sigma_tot, sigma_lim, sigma_diff


def analyze_dataset(
    ds: AppendixDataset,
    search: SearchConfig | None = None,
    bootstrap_resamples: int = 0,
    seed: int = 0,
) -> DatasetAnalysis:
    config = search or SearchConfig()
    choi, fit = dataset_to_accessible_choi(ds)
    result = q_det(choi, config)
    capacities = q_lim(fit.params, config)
    analysis = DatasetAnalysis(
        dataset=ds,
        fit=fit,
        witness=result,
        capacities=capacities,
        q_theory=exact_capacity(ChannelParams(ds.p, ds.mu)),
    )
    if bootstrap_resamples:
        sigma_tot, sigma_lim, sigma_diff = _bootstrap_dataset(
            ds, result, bootstrap_resamples, seed, config
        )
        result.sigma_q = sigma_tot
        analysis.sigma_q = sigma_tot
        analysis.sigma_lim = sigma_lim
        analysis.sigma_diff = sigma_diff
    return analysis


@dataclass
class RecordAnalysis:
    record: CorrelatorRecord
    witness: WitnessResult
    capacities: CapacityReport | None
    q_theory: float | None
    sigma_q: float | None = None

    def report_row(self) -> ReportRow:
        params = _record_params(self.record)
        return ReportRow(
            p=float(params.p) if params else float("nan"),
            mu=float(params.mu) if params else float("nan"),
            q_theory=self.q_theory,
            q_det_raw=self.witness.q_det_raw,
            q_det=self.witness.q_det,
            sigma_q=self.sigma_q,
            q1=self.capacities.q1 if self.capacities else None,
            q2=self.capacities.q2 if self.capacities else None,
            q_lim=self.capacities.q_lim if self.capacities else None,
            clamped=self.witness.clamped,
            assumptions=self.witness.assumptions,
        )


def _record_params(rec: CorrelatorRecord) -> ChannelParams | None:
    spec = rec.metadata.get("channel")
    if isinstance(spec, dict) and spec.get("type") == "correlated_flip":
        return ChannelParams(float(spec["p"]), float(spec["mu"]))
    return None


def analyze_record(
    rec: CorrelatorRecord,
    search: SearchConfig | None = None,
    bootstrap_resamples: int = 0,
    seed: int = 0,
) -> RecordAnalysis:
    config = search or SearchConfig()
    choi = record_to_accessible_choi(rec)
    result = q_det(choi, config)
    capacities = q_lim(choi, config) if choi.n_pairs == 2 else None
    params = _record_params(rec)
    analysis = RecordAnalysis(
        record=rec,
        witness=result,
        capacities=capacities,
        q_theory=exact_capacity(params) if params else None,
    )
    if bootstrap_resamples:
        sigma = bootstrap_error(
            choi, bootstrap_resamples, seed, search=config, base=result
        )
        result.sigma_q = sigma
        analysis.sigma_q = sigma
    return analysis


def analyze_fixture_set(
    datasets,
    search: SearchConfig | None = None,
    bootstrap_resamples: int = 0,
    seed: int = 0,
) -> list:
    """Analyses for a collection of datasets, ordered (p desc, mu asc).

    Each dataset's bootstrap stream is derived independently from ``seed``
    so the result set does not depend on processing order.
    """
    ordered = sorted(datasets, key=lambda ds: (-ds.p, ds.mu))
    out = []
    for k, ds in enumerate(ordered):
        out.append(
            analyze_dataset(
                ds,
                search=search,
                bootstrap_resamples=bootstrap_resamples,
                seed=seed + k,
            )
        )
    return out

"""File formats: correlator datasets, records, the run registry and reports.

The 14 measured correlator matrices ship with the package as JSON files
under ``data/appendix``, transcribed entry-by-entry in the printed
parenthesis-uncertainty notation (e.g. "0.9687(5)" is 0.9687 +- 0.0005) so
the files stay diffable against the source tables.  A checksum manifest
pins the transcription.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .channels import ChannelParams, channel_to_schedules
from .errors import DataError, ValidationError
from .measure import CorrelatorRecord, SettingData

_VALUE_RE = re.compile(r"^([+-]?\d+\.(\d+))\((\d+)\)$")

DATASET_FORMAT = "appendix_correlators"
RECORD_FORMAT = "correlator_record"


def parse_uncertain(text: str) -> tuple:
    """Parse parenthesis notation: "0.020(2)" -> (0.020, 0.002)."""
    m = _VALUE_RE.match(text.strip())
    if m is None:
        raise DataError(f"malformed value {text!r}; expected e.g. '0.9687(5)'")
    value = float(m.group(1))
    sigma = int(m.group(3)) * 10.0 ** (-len(m.group(2)))
    return value, sigma


@dataclass
class AppendixDataset:
    """One measured 3x3 correlator block, entries kept as printed."""

    p_label: str
    mu_label: str
    entries: tuple
    convention: str = "no_transpose"

    def __post_init__(self):
        rows = tuple(tuple(str(e) for e in row) for row in self.entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise DataError("correlator matrix must be 3x3")
        for row in rows:
            for entry in row:
                value, sigma = parse_uncertain(entry)
                if abs(value) > 1.0:
                    raise DataError(f"correlator {entry!r} has magnitude above 1")
                if sigma <= 0.0:
                    raise DataError(f"correlator {entry!r} has no positive uncertainty")
        self.entries = rows

    @property
    def p(self) -> Fraction:
        return Fraction(self.p_label)

    @property
    def mu(self) -> Fraction:
        return Fraction(self.mu_label)

    @property
    def values(self) -> np.ndarray:
        return np.array([[parse_uncertain(e)[0] for e in row] for row in self.entries])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([[parse_uncertain(e)[1] for e in row] for row in self.entries])


def dump_appendix(ds: AppendixDataset) -> str:
    payload = {
        "format": DATASET_FORMAT,
        "p": ds.p_label,
        "mu": ds.mu_label,
        "convention": ds.convention,
        "axes": ["X", "Y", "Z"],
        "matrix": [list(row) for row in ds.entries],
    }
    return json.dumps(payload, indent=2) + "\n"


def load_appendix(path) -> AppendixDataset:
    try:
        text = Path(path).read_text()
        payload = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != DATASET_FORMAT:
        raise DataError(f"{path} is not a correlator dataset file")
    try:
        return AppendixDataset(
            p_label=str(payload["p"]),
            mu_label=str(payload["mu"]),
            entries=payload["matrix"],
            convention=str(payload.get("convention", "no_transpose")),
        )
    except KeyError as exc:
        raise DataError(f"{path} is missing field {exc}") from exc


def fixture_name(p: Fraction, mu: Fraction) -> str:
    def frac(x: Fraction) -> str:
        return str(x).replace("/", "-")

    return f"p{frac(p)}_mu{frac(mu)}.json"


def packaged_fixture_dir():
    return resources.files("capwit").joinpath("data/appendix")


def load_fixture_set(directory=None) -> list:
    """All datasets in a directory, ordered by (p descending, mu ascending)."""
    base = Path(directory) if directory is not None else packaged_fixture_dir()
    names = sorted(
        entry.name
        for entry in base.iterdir()
        if entry.name.endswith(".json") and entry.name != "manifest.json"
    )
    if not names:
        raise DataError(f"no dataset files found under {base}")
    datasets = [load_appendix(base.joinpath(name)) for name in names]
    datasets.sort(key=lambda ds: (-ds.p, ds.mu))
    return datasets


def verify_manifest(directory=None) -> dict:
    """Check fixture checksums against the manifest; returns name -> digest."""
    base = Path(directory) if directory is not None else packaged_fixture_dir()
    manifest = json.loads(base.joinpath("manifest.json").read_text())
    digests = {}
    for name, expected in manifest["files"].items():
        blob = base.joinpath(name).read_bytes()
        digest = hashlib.sha256(blob).hexdigest()
        if digest != expected:
            raise DataError(f"fixture {name} checksum mismatch")
        digests[name] = digest
    return digests


# ---------------------------------------------------------------------------
# run registry
# ---------------------------------------------------------------------------

# (p, mu, printed weights A_00, A_0X, A_X0, A_XX) for every run; the printed
# A_00/A_XX columns are swapped relative to the flip-probability convention
# whenever p != 1/2 and are normalized on ingestion
_TABLE1 = (
    ("1/2", "0", ("1/4", "1/4", "1/4", "1/4")),
    ("1/2", "1/4", ("5/16", "3/16", "3/16", "5/16")),
    ("1/2", "1/2", ("3/8", "1/8", "1/8", "3/8")),
    ("1/2", "3/4", ("7/16", "1/16", "1/16", "7/16")),
    ("1/2", "1", ("1/2", "0", "0", "1/2")),
    ("3/8", "1/5", ("3/16", "3/16", "3/16", "7/16")),
    ("3/8", "7/15", ("1/4", "1/8", "1/8", "1/2")),
    ("3/8", "11/15", ("5/16", "1/16", "1/16", "9/16")),
    ("3/8", "1", ("3/8", "0", "0", "5/8")),
    ("1/4", "1/3", ("1/8", "1/8", "1/8", "5/8")),
    ("1/4", "2/3", ("3/16", "1/16", "1/16", "11/16")),
    ("1/4", "1", ("1/4", "0", "0", "3/4")),
    ("1/8", "3/7", ("1/16", "1/16", "1/16", "13/16")),
    ("1/8", "1", ("1/8", "0", "0", "7/8")),
)

_TC = Fraction(8)


@dataclass(frozen=True)
class Table1Row:
    """One registered run: labels, printed weights, normalized weights and
    the voltage schedules realising it over the 8 s counting window."""

    p_label: str
    mu_label: str
    printed_weights: tuple
    weights: dict
    schedules: tuple

    @property
    def p(self) -> Fraction:
        return Fraction(self.p_label)

    @property
    def mu(self) -> Fraction:
        return Fraction(self.mu_label)

    @property
    def params(self) -> ChannelParams:
        return ChannelParams(self.p, self.mu)

    @property
    def fixture(self) -> str:
        return fixture_name(self.p, self.mu)


def _normalize_weights(p: Fraction, mu: Fraction, printed: tuple) -> dict:
    a00, a0x, ax0, axx = (Fraction(x) for x in printed)
    if a0x != ax0:
        raise ValidationError("printed weights must have A_0X = A_X0")
    for u, w in ((a00, axx), (axx, a00)):
        if 1 - u - a0x == p:
            weights = {"II": u, "IX": a0x, "XI": ax0, "XX": w}
            break
    else:
        raise ValidationError(f"printed weights {printed} inconsistent with p={p}")
    if sum(weights.values()) != 1:
        raise ValidationError(f"weights {printed} do not sum to 1")
    if p not in (0, 1):
        mu_check = 1 - a0x / (p * (1 - p))
        if mu_check != mu:
            raise ValidationError(
                f"weights {printed} give mu={mu_check}, expected {mu}"
            )
    return weights


def table1_registry() -> tuple:
    rows = []
    for p_label, mu_label, printed in _TABLE1:
        p, mu = Fraction(p_label), Fraction(mu_label)
        weights = _normalize_weights(p, mu, printed)
        schedules = channel_to_schedules(ChannelParams(p, mu), _TC)
        rows.append(
            Table1Row(
                p_label=p_label,
                mu_label=mu_label,
                printed_weights=tuple(Fraction(x) for x in printed),
                weights=weights,
                schedules=schedules,
            )
        )
    return tuple(rows)


# ---------------------------------------------------------------------------
# correlator records
# ---------------------------------------------------------------------------

def dump_record(rec: CorrelatorRecord) -> str:
    payload = {
        "format": RECORD_FORMAT,
        "n_pairs": rec.n_pairs,
        "convention": rec.convention,
        "settings": [
            {"axes": list(sd.axes), "shots": sd.shots, "counts": sd.counts}
            for sd in rec.settings
        ],
        "coefficients": rec.coefficients,
        "sigmas": rec.sigmas,
        "metadata": rec.metadata,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def save_record(rec: CorrelatorRecord, path) -> None:
    Path(path).write_text(dump_record(rec))


def load_record(path) -> CorrelatorRecord:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read record {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != RECORD_FORMAT:
        raise DataError(f"{path} is not a correlator record file")
    try:
        settings = tuple(
            SettingData(
                axes=tuple(sd["axes"]),
                shots=sd["shots"],
                counts=dict(sd["counts"]),
            )
            for sd in payload["settings"]
        )
        return CorrelatorRecord(
            n_pairs=int(payload["n_pairs"]),
            convention=str(payload["convention"]),
            settings=settings,
            coefficients={k: float(v) for k, v in payload["coefficients"].items()},
            sigmas={k: float(v) for k, v in payload["sigmas"].items()},
            metadata=dict(payload.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"record {path} is malformed: {exc}") from exc


# ---------------------------------------------------------------------------
# report output
# ---------------------------------------------------------------------------

REPORT_COLUMNS = (
    "p",
    "mu",
    "Q_theory",
    "Q_det_tot_raw",
    "Q_det_tot",
    "sigma_Q",
    "Q1",
    "Q2",
    "Q_lim",
    "clamped",
    "assumptions",
)


@dataclass
class ReportRow:
    """One line of the capacity report."""

    p: float
    mu: float
    q_theory: float | None = None
    q_det_raw: float | None = None
    q_det: float | None = None
    sigma_q: float | None = None
    q1: float | None = None
    q2: float | None = None
    q_lim: float | None = None
    clamped: bool = False
    assumptions: tuple = ()
    p_label: str | None = None
    mu_label: str | None = None


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def format_report(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                _fmt(row.p),
                _fmt(row.mu),
                _fmt(row.q_theory),
                _fmt(row.q_det_raw),
                _fmt(row.q_det),
                _fmt(row.sigma_q),
                _fmt(row.q1),
                _fmt(row.q2),
                _fmt(row.q_lim),
                "true" if row.clamped else "false",
                ";".join(row.assumptions),
            ]
        )
    return buf.getvalue()


def write_report(rows, path) -> None:
    Path(path).write_text(format_report(rows))

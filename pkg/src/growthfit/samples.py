"""Growth samples: ingestion, log-growth rates and descriptive statistics."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import EmptySampleError, IngestionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PopulationPair:
    """Population of one unit at two census dates."""

    unit_id: str
    pop_start: float
    pop_end: float

    def __post_init__(self):
        for name in ("pop_start", "pop_end"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise IngestionError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class GrowthSample:
    """An ordered collection of log-growth rates.

    Parameters
    ----------
    values : array_like
        Finite log-growth rates, kept in input order.
    label : str
        Short name used in reports.
    source_meta : str, optional
        Free-form provenance text.
    """

    values: np.ndarray
    label: str = "sample"
    source_meta: str | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise IngestionError("growth sample contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class RejectedRow:
    line: int
    unit_id: str
    reason: str


@dataclass(frozen=True)
class IngestionReport:
    n_read: int
    n_accepted: int
    rejected: tuple[RejectedRow, ...] = field(default_factory=tuple)

    @property
    def n_rejected(self):
        return len(self.rejected)


@dataclass(frozen=True)
class DescriptiveStats:
    n_obs: int
    mean: float
    sd: float
    min: float
    max: float

    def as_dict(self):
        return {"n_obs": self.n_obs, "mean": self.mean, "sd": self.sd,
                "min": self.min, "max": self.max}


def compute_log_growth(pairs, label="sample", source_meta=None):
    """Log-growth rates ``ln(pop_end) - ln(pop_start)`` for each pair, order preserved."""
    pairs = list(pairs)
    if not pairs:
        raise EmptySampleError("no population pairs to convert")
    start = np.array([p.pop_start for p in pairs], dtype=float)
    end = np.array([p.pop_end for p in pairs], dtype=float)
    return GrowthSample(np.log(end) - np.log(start), label=label, source_meta=source_meta)


def describe(sample):
    """Table-style descriptive statistics; ``sd`` uses the ``n - 1`` denominator."""
    values = np.asarray(sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySampleError("cannot describe an empty sample")
    lo, hi = float(values.min()), float(values.max())
    sd = float(np.std(values, ddof=1)) if values.size > 1 and hi > lo else 0.0
    mean = float(np.mean(values))
    # mean can drift outside [min, max] by one ulp for constant samples
    mean = min(max(mean, lo), hi)
    return DescriptiveStats(n_obs=int(values.size), mean=mean, sd=sd, min=lo, max=hi)


def _parse_positive(text):
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise ValueError("nonpositive population")
    return value


def read_panel_csv(path, label=None):
    """Read an ``id,pop_start,pop_end`` CSV and return the sample and an ingestion report.

    Rows with unparseable or nonpositive populations are dropped and listed in
    the report. Raises :class:`IngestionError` if no valid row remains.
    """
    path = Path(path)
    pairs, rejected = [], []
    n_read = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"id", "pop_start", "pop_end"} - set(reader.fieldnames or ())
        if missing:
            raise IngestionError(f"{path}: missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            n_read += 1
            unit = (row.get("id") or "").strip()
            try:
                start = _parse_positive(row["pop_start"])
                end = _parse_positive(row["pop_end"])
            except (TypeError, ValueError) as exc:
                reason = str(exc) if str(exc) == "nonpositive population" else "unparseable field"
                rejected.append(RejectedRow(lineno, unit, reason))
                continue
            pairs.append(PopulationPair(unit, start, end))
    if rejected:
        logger.info("%s: dropped %d of %d rows", path, len(rejected), n_read)
    if not pairs:
        raise IngestionError(f"{path}: no valid rows")
    sample = compute_log_growth(pairs, label=label or path.stem, source_meta=f"panel:{path.name}")
    return sample, IngestionReport(n_read, len(pairs), tuple(rejected))


def read_rates_csv(path, label=None):
    """Read a single-column ``g`` CSV of precomputed log-growth rates."""
    path = Path(path)
    values, rejected = [], []
    n_read = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if "g" not in (reader.fieldnames or ()):
            raise IngestionError(f"{path}: missing column 'g'")
        for lineno, row in enumerate(reader, start=2):
            n_read += 1
            try:
                value = float(row["g"])
                if not math.isfinite(value):
                    raise ValueError
            except (TypeError, ValueError):
                rejected.append(RejectedRow(lineno, "", "unparseable field"))
                continue
            values.append(value)
    if rejected:
        logger.info("%s: dropped %d of %d rows", path, len(rejected), n_read)
    if not values:
        raise IngestionError(f"{path}: no valid rows")
    sample = GrowthSample(values, label=label or path.stem, source_meta=f"rates:{path.name}")
    return sample, IngestionReport(n_read, len(values), tuple(rejected))


def read_sample(path, mode="rates", label=None):
    if mode == "panel":
        return read_panel_csv(path, label=label)
    if mode == "rates":
        return read_rates_csv(path, label=label)
    raise IngestionError(f"unknown input mode {mode!r}")


def write_rates_csv(sample, path):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("g\n")
        for value in np.asarray(sample):
            fh.write(f"{float(value)!r}\n")
    return path

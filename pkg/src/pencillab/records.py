"""Per-sample experiment rows, recomputable summaries and their CSV/JSON files.

A run is stored as ``NAME.csv`` (one row per sample, fixed column order)
plus ``NAME.csv.json`` (configuration and summary). The CSV holds no
timing information, so equal configurations produce identical bytes.
Column layout and JSON keys are documented in ``docs/schemas.md``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IntegrityError, RecordParseError

__all__ = ["CSV_COLUMNS", "SampleRow", "Summary", "ExperimentRecord", "summarize",
           "write_records", "read_records", "EXCLUSION_CAP"]

CSV_COLUMNS = ("run_id", "seed", "n", "d", "sample_index", "count", "certified",
               "excluded_reason", "n_uncertain")

EXCLUSION_CAP = {1: 0.01, 2: 0.10}

_REASONS = ("", "base-locus", "uncertain", "degenerate")


@dataclass(frozen=True)
class SampleRow:
    """Outcome for one sample.

    ``excluded_reason`` is empty for samples that enter the mean, otherwise
    one of ``"base-locus"``, ``"uncertain"`` or ``"degenerate"``.
    """

    sample_index: int
    count: int
    certified: bool
    n_uncertain: int = 0
    excluded_reason: str = ""

    @property
    def used(self) -> bool:
        return self.certified and not self.excluded_reason


@dataclass(frozen=True)
class Summary:
    n_samples: int
    n_used: int
    excluded: int
    exclusion_rate: float
    mean_count: float
    mean_scaled: float
    stderr_scaled: float
    valid: bool
    wall_time: float = 0.0

    def to_dict(self):
        return dict(self.__dict__)

    def same_statistics(self, other, rel=1e-12) -> bool:
        """Equality of everything except ``wall_time`` (floats to ``rel``)."""
        for k, v in self.__dict__.items():
            if k == "wall_time":
                continue
            w = getattr(other, k)
            if isinstance(v, float):
                if math.isnan(v) and math.isnan(w):
                    continue
                if not math.isclose(v, w, rel_tol=rel, abs_tol=1e-300):
                    return False
            elif v != w:
                return False
        return True


def summarize(rows, n: int, d: int, wall_time: float = 0.0) -> Summary:
    """Summary statistics over the rows that are certified and not excluded.

    ``mean_scaled`` is the mean count divided by ``sqrt(d)^n``; the
    standard error is the sample standard deviation over the square root of
    the number of used samples.
    """
    used = [r.count for r in rows if r.used]
    N = len(rows)
    k = len(used)
    scale = math.sqrt(d) ** n
    mean = math.fsum(used) / k if k else float("nan")
    if k > 1:
        var = math.fsum((c - mean) ** 2 for c in used) / (k - 1)
        se = math.sqrt(var / k) / scale
    else:
        se = float("nan")
    excluded = N - k
    rate = excluded / N if N else 0.0
    return Summary(N, k, excluded, rate, mean, mean / scale, se,
                   rate <= EXCLUSION_CAP.get(n, 0.0), float(wall_time))


@dataclass
class ExperimentRecord:
    """Rows and summary of one Monte Carlo run."""

    run_id: str
    seed: int
    n: int
    d: int
    rows: list
    summary: Summary
    config: dict = field(default_factory=dict)
    angles: object = None

    def recompute(self) -> Summary:
        return summarize(self.rows, self.n, self.d, self.summary.wall_time)

    def __eq__(self, other):
        if not isinstance(other, ExperimentRecord):
            return NotImplemented
        return (self.run_id, self.seed, self.n, self.d, self.rows) == \
            (other.run_id, other.seed, other.n, other.d, other.rows) and \
            self.summary.same_statistics(other.summary)


def _csv_text(record: ExperimentRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in record.rows:
        w.writerow([record.run_id, record.seed, record.n, record.d, r.sample_index, r.count,
                    int(r.certified), r.excluded_reason, r.n_uncertain])
    return buf.getvalue()


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def write_records(path, record: ExperimentRecord) -> Path:
    """Write ``path`` (CSV) and ``path.json`` (summary); returns the CSV path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_csv_text(record), encoding="utf-8")
    meta = {"run_id": record.run_id, "seed": record.seed, "n": record.n, "d": record.d,
            "config": record.config, "summary": record.summary.to_dict()}
    _sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _parse_bool(s, lineno):
    if s not in ("0", "1"):
        raise RecordParseError(f"certified must be 0 or 1, got {s!r}", lineno)
    return s == "1"


def _parse_int(s, name, lineno):
    try:
        return int(s)
    except ValueError:
        raise RecordParseError(f"{name} must be an integer, got {s!r}", lineno) from None


def read_records(path) -> ExperimentRecord:
    """Read a run written by :func:`write_records` and verify its summary.

    Raises
    ------
    RecordParseError
        Malformed CSV; the message starts with the offending line number.
    IntegrityError
        The stored summary differs from the one recomputed from the rows.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise RecordParseError(f"bad header, expected {','.join(CSV_COLUMNS)}", 1)
    if text and not text.endswith("\n"):
        raise RecordParseError("file ends without a newline (truncated?)", len(lines))
    rows, ident = [], None
    for lineno, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        if lineno == 1:
            continue
        if len(fields) != len(CSV_COLUMNS):
            raise RecordParseError(f"expected {len(CSV_COLUMNS)} fields, got {len(fields)}", lineno)
        run_id, seed, n, d, idx, count, cert, reason, unc = fields
        key = (run_id, _parse_int(seed, "seed", lineno), _parse_int(n, "n", lineno),
               _parse_int(d, "d", lineno))
        if ident is None:
            ident = key
        elif key != ident:
            raise RecordParseError("run_id/seed/n/d differ from the first row", lineno)
        if reason not in _REASONS:
            raise RecordParseError(f"unknown excluded_reason {reason!r}", lineno)
        count_v = _parse_int(count, "count", lineno)
        if count_v < 0:
            raise RecordParseError("count must be nonnegative", lineno)
        rows.append(SampleRow(_parse_int(idx, "sample_index", lineno), count_v,
                              _parse_bool(cert, lineno), _parse_int(unc, "n_uncertain", lineno), reason))
    sidecar = _sidecar(path)
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IntegrityError(f"missing summary file {sidecar.name}") from None
    except json.JSONDecodeError as exc:
        raise RecordParseError(f"{sidecar.name}: {exc.msg}", exc.lineno) from None
    try:
        stored = Summary(**meta["summary"])
    except (KeyError, TypeError) as exc:
        raise RecordParseError(f"{sidecar.name}: bad summary ({exc})") from None
    if ident is None:
        ident = (meta["run_id"], meta["seed"], meta["n"], meta["d"])
    elif ident != (meta["run_id"], meta["seed"], meta["n"], meta["d"]):
        raise IntegrityError("CSV rows and summary file describe different runs")
    run_id, seed, n, d = ident
    rec = ExperimentRecord(run_id, seed, n, d, rows, stored, meta.get("config", {}))
    fresh = rec.recompute()
    if not fresh.same_statistics(stored):
        raise IntegrityError(f"stored summary {stored.to_dict()} != recomputed {fresh.to_dict()}")
    return rec

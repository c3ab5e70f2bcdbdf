"""Monte Carlo campaigns over random Kostlan pencils.

Sample ``i`` of a run with seed ``s`` is drawn from counter index ``i`` of
the stream ``(s, crc32("pencil{n}d:{d}"))``; samples are processed in
fixed batches and the rows are reassembled in index order, so the output
does not depend on the number of worker processes.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .ensembles import RngStream, sample_pencil, stream_id_for
from .errors import BaseLocusError, DegeneratePencilError, ZeroFormError
from .forms import bombieri_coefficients, circle_basis
from .parallel import pmap
from .realroots.circle import RootOptions, WronskianOnCircle, derivative_columns, grid_angles, isolate
from .realroots.critical import (RESULTANT_MAX_DEGREE, _from_brackets, check_base_locus,
                                 check_uncertain_base_points)
from .realroots.rp2 import Rp2Options, count_crit_rp2
from .records import ExperimentRecord, SampleRow, read_records, summarize, write_records

__all__ = ["RunConfig", "run_pencil1d", "run_pencil2d", "pooled_angles", "ks_uniform",
           "StudyResult", "convergence_study", "fit_inverse_sqrt", "write_records", "read_records"]

_BATCH = 64


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one run.

    ``workers=None`` uses ``PENCILLAB_THREADS`` or the CPU count.
    """

    n: int
    d: int
    samples: int
    seed: int
    root_options: RootOptions = field(default_factory=RootOptions)
    rp2_options: Rp2Options = field(default_factory=Rp2Options)
    out: str | None = None
    workers: int | None = None
    keep_angles: bool = False
    run_id: str | None = None

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("n must be 1 or 2")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be an integer >= 1")

    @property
    def name(self) -> str:
        return self.run_id or f"pencil{self.n}d-d{self.d}-seed{self.seed}-N{self.samples}"

    @property
    def stream(self) -> RngStream:
        return RngStream(self.seed, stream_id_for(f"pencil{self.n}d:{self.d}"))

    def describe(self) -> dict:
        return {"n": self.n, "d": self.d, "samples": self.samples, "seed": self.seed,
                "root_options": asdict(self.root_options), "rp2_options": asdict(self.rp2_options)}


def _grid_values(d, cols_list, opts):
    """Wronskian samples on the level-0 grid for many pencils at once."""
    th = grid_angles(2 * d - 2, opts)[:-1]
    C = np.concatenate(cols_list, axis=1)  # d x 4m
    m = len(cols_list)
    out = np.empty((len(th), m))
    step = max(1, (1 << 22) // max(d, 4 * m))
    for s in range(0, len(th), step):
        P = circle_basis(d - 1, th[s:s + step])
        A = (P @ C).reshape(-1, m, 4)
        out[s:s + step] = A[..., 0] * A[..., 3] - A[..., 1] * A[..., 2]
    return out


def _batch_1d(job):
    d, seed, sid, indices, opts, keep = job
    stream = RngStream(seed, sid)
    rows, angles = {}, {}
    live = []
    for i in indices:
        p = sample_pencil(1, d, stream, i)
        try:
            check_base_locus(p.alpha, p.beta)
        except BaseLocusError:
            rows[i] = SampleRow(i, 0, False, 0, "base-locus")
            continue
        if d == 1:
            # constant nonzero Wronskian: a pencil of Moebius maps has no critical point
            rows[i] = SampleRow(i, 0, True)
            angles[i] = np.zeros(0)
            continue
        ga, _ = bombieri_coefficients(p.alpha)
        gb, _ = bombieri_coefficients(p.beta)
        live.append((i, p, derivative_columns(ga, gb)))
    if live:
        grid = _grid_values(d, [c for _, _, c in live], opts)
        for k, (i, p, cols) in enumerate(live):
            func = WronskianOnCircle.from_columns(d, cols, opts.noise_factor)
            try:
                brackets, unc = isolate(func, opts, grid[:, k])
                # above RESULTANT_MAX_DEGREE the real base-point test at the
                # located angles is the only base-locus guard
                if keep or d > RESULTANT_MAX_DEGREE:
                    al = _from_brackets(p.alpha, p.beta, func, brackets, unc, opts)
                else:
                    check_uncertain_base_points(p.alpha, p.beta, unc)
            except ZeroFormError:
                rows[i] = SampleRow(i, 0, False, 0, "degenerate")
                continue
            except BaseLocusError:
                rows[i] = SampleRow(i, 0, False, 0, "base-locus")
                continue
            reason = "uncertain" if unc else ""
            rows[i] = SampleRow(i, len(brackets), not unc, len(unc), reason)
            if keep:
                angles[i] = al.angles
    return [rows[i] for i in indices], [angles.get(i) for i in indices] if keep else None


def _batches(config, chunk=_BATCH):
    sid = config.stream.stream_id
    return [(config.d, config.seed, sid, list(range(s, min(s + chunk, config.samples))))
            for s in range(0, config.samples, chunk)]


def _finish(config, rows, t0, angles=None):
    summary = summarize(rows, config.n, config.d, time.perf_counter() - t0)
    rec = ExperimentRecord(config.name, config.seed, config.n, config.d, rows, summary,
                           config.describe(), angles)
    if config.out:
        write_records(config.out, rec)
    return rec


def run_pencil1d(config: RunConfig) -> ExperimentRecord:
    """Real critical points of random Kostlan pencils on ``CP^1``.

    The summary's ``mean_scaled`` is ``mean count / sqrt(d)`` over the
    certified samples; ``valid`` is False when more than 1% of samples
    were excluded.
    """
    if config.n != 1:
        raise ValueError("run_pencil1d needs n = 1")
    t0 = time.perf_counter()
    jobs = [b + (config.root_options, config.keep_angles) for b in _batches(config)]
    rows, pooled = [], []
    for r, a in pmap(_batch_1d, jobs, config.workers):
        rows.extend(r)
        if a is not None:
            pooled.extend(x for x in a if x is not None)
    angles = np.concatenate(pooled) if config.keep_angles and pooled else None
    return _finish(config, rows, t0, angles)


def _batch_2d(job):
    d, seed, sid, indices, opts = job
    stream = RngStream(seed, sid)
    rows = []
    for i in indices:
        p = sample_pencil(2, d, stream, i)
        try:
            rc = count_crit_rp2(p.alpha, p.beta, opts)
        except DegeneratePencilError:
            rows.append(SampleRow(i, 0, False, 0, "degenerate"))
            continue
        rows.append(SampleRow(i, rc.count, rc.certified, len(rc.uncertain_regions),
                              "" if rc.certified else "uncertain"))
    return rows


def run_pencil2d(config: RunConfig) -> ExperimentRecord:
    """Real critical points of random Kostlan pencils on ``CP^2`` (small ``d``).

    ``mean_scaled`` is ``mean count / d``; ``valid`` is False above 10% exclusion.
    """
    if config.n != 2:
        raise ValueError("run_pencil2d needs n = 2")
    t0 = time.perf_counter()
    jobs = [b + (config.rp2_options,) for b in _batches(config, chunk=4)]
    rows = [r for part in pmap(_batch_2d, jobs, config.workers) for r in part]
    return _finish(config, rows, t0)


def pooled_angles(d: int, samples: int, seed: int, opts: RootOptions = RootOptions(), workers=None):
    """All critical angles of ``samples`` random pencils of degree ``d``, pooled."""
    rec = run_pencil1d(RunConfig(1, d, samples, seed, root_options=opts, workers=workers,
                                 keep_angles=True))
    return (rec.angles if rec.angles is not None else np.zeros(0)), rec


def ks_uniform(angles) -> float:
    """Kolmogorov-Smirnov distance between pooled angles and the uniform law on ``[0, pi)``."""
    a = np.asarray(getattr(angles, "angles", angles), dtype=float).ravel()
    if a.size < 100:
        raise ValueError(f"need at least 100 angles, got {a.size}")
    return float(stats.kstest(a / np.pi, "uniform").statistic)


@dataclass
class StudyResult:
    """Per-degree estimates and the fit ``mean/sqrt(d)^n = c + b / sqrt(d)``."""

    n: int
    ds: list
    means: list
    stderrs: list
    c: float
    c_stderr: float
    b: float
    b_stderr: float
    residuals: list
    records: list = field(default_factory=list, repr=False)

    def table(self):
        return [{"d": d, "mean_scaled": m, "stderr": s, "ci95": [m - 1.96 * s, m + 1.96 * s]}
                for d, m, s in zip(self.ds, self.means, self.stderrs)]

    def to_dict(self):
        return {"n": self.n, "table": self.table(), "c": self.c, "c_stderr": self.c_stderr,
                "b": self.b, "b_stderr": self.b_stderr, "residuals": self.residuals}


def fit_inverse_sqrt(ds, means, stderrs):
    """Weighted least squares for ``y = c + b / sqrt(d)``.

    Returns ``(c, se_c, b, se_b, residuals)``; standard errors come from
    the inverse normal matrix (the per-point standard errors are taken as
    known).
    """
    x = 1.0 / np.sqrt(np.asarray(ds, dtype=float))
    y = np.asarray(means, dtype=float)
    w = 1.0 / np.asarray(stderrs, dtype=float) ** 2
    X = np.stack([np.ones_like(x), x], 1)
    N = X.T @ (w[:, None] * X)
    cov = np.linalg.inv(N)
    beta = cov @ (X.T @ (w * y))
    res = y - X @ beta
    return float(beta[0]), float(math.sqrt(cov[0, 0])), float(beta[1]), float(math.sqrt(cov[1, 1])), res.tolist()


def convergence_study(d_list, samples: int, seed: int, n: int = 1, workers=None,
                      opts: RootOptions = RootOptions()) -> StudyResult:
    """Estimates of ``mean/sqrt(d)^n`` for increasing ``d`` and their ``1/sqrt(d)`` extrapolation."""
    ds = [int(d) for d in d_list]
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("d_list must be strictly increasing")
    recs = []
    for d in ds:
        cfg = RunConfig(n, d, samples, seed, root_options=opts, workers=workers)
        recs.append(run_pencil1d(cfg) if n == 1 else run_pencil2d(cfg))
    means = [r.summary.mean_scaled for r in recs]
    ses = [r.summary.stderr_scaled for r in recs]
    if len(ds) >= 2:
        c, sc, b, sb, res = fit_inverse_sqrt(ds, means, ses)
    else:
        c, sc, b, sb, res = means[0], ses[0], float("nan"), float("nan"), [0.0]
    return StudyResult(n, ds, means, ses, c, sc, b, sb, res, recs)

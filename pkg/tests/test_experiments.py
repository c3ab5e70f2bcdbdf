import math

import numpy as np
import pytest

from pencillab.constants import kac_rice_mean
from pencillab.ensembles import kostlan_binary_std
from pencillab.errors import IntegrityError, RecordParseError
from pencillab.experiments import (RunConfig, convergence_study, fit_inverse_sqrt, ks_uniform,
                                   pooled_angles, run_pencil1d, run_pencil2d)
from pencillab.records import (CSV_COLUMNS, ExperimentRecord, SampleRow, read_records, summarize,
                               write_records)


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(3, 5, 10, 0)
    with pytest.raises(ValueError):
        RunConfig(1, 0, 10, 0)
    with pytest.raises(ValueError):
        RunConfig(1, 5, 0, 0)
    with pytest.raises(ValueError):
        run_pencil1d(RunConfig(2, 3, 1, 0))


def test_d1_has_no_critical_points():
    rec = run_pencil1d(RunConfig(1, 1, 300, 4))
    assert all(r.count == 0 and r.certified for r in rec.rows)
    assert rec.summary.mean_count == 0 and rec.summary.valid


def _quadratic_formula_counts(cfg):
    # straight-line oracle: the sample-i normals give alpha then beta; for
    # a = (a0, a1, a2) on (y^2, xy, x^2) the Wronskian is
    # 2(a2 b1 - a1 b2) x^2 + 4(a2 b0 - a0 b2) xy + 2(a1 b0 - a0 b1) y^2
    out = np.empty(cfg.samples, dtype=int)
    w = kostlan_binary_std(2)
    for i in range(cfg.samples):
        g = cfg.stream.generator(i)
        a = g.standard_normal(3) * w
        b = g.standard_normal(3) * w
        A = 2 * (a[2] * b[1] - a[1] * b[2])
        B = 4 * (a[2] * b[0] - a[0] * b[2])
        C = 2 * (a[1] * b[0] - a[0] * b[1])
        out[i] = 2 if B * B - 4 * A * C > 0 else 0
    return out


def test_d2_against_quadratic_formula():
    cfg = RunConfig(1, 2, 10**5, 5)
    rec = run_pencil1d(cfg)
    oracle = _quadratic_formula_counts(cfg)
    got = np.array([r.count for r in rec.rows])
    used = np.array([r.used for r in rec.rows])
    assert used.mean() > 0.999
    assert np.array_equal(got[used], oracle[used])
    m = oracle.mean()
    se = oracle.std(ddof=1) / math.sqrt(len(oracle))
    assert abs(rec.summary.mean_count - m) < 3 * se


def test_parity_and_bound():
    d = 25
    rec = run_pencil1d(RunConfig(1, d, 400, 6))
    for r in rec.rows:
        assert r.count <= 2 * d - 2
        if r.certified:
            assert r.count % 2 == 0


def test_mean_matches_kac_rice_at_moderate_degree():
    d = 256
    rec = run_pencil1d(RunConfig(1, d, 1200, 7))
    s = rec.summary
    assert s.valid
    assert abs(s.mean_count - kac_rice_mean(1, d)) < 3 * s.stderr_scaled * math.sqrt(d)


def test_csv_bytes_independent_of_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_pencil1d(RunConfig(1, 40, 300, 8, out=str(a), workers=1, run_id="r"))
    run_pencil1d(RunConfig(1, 40, 300, 8, out=str(b), workers=2, run_id="r"))
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_round_trip(tmp_path):
    rec = run_pencil1d(RunConfig(1, 12, 200, 9, out=str(tmp_path / "r.csv")))
    back = read_records(tmp_path / "r.csv")
    assert back == rec
    assert back.summary.same_statistics(rec.summary)
    assert back.config["d"] == 12


def _small_record():
    rows = [SampleRow(0, 2, True), SampleRow(1, 4, True), SampleRow(2, 0, False, 1, "uncertain")]
    return ExperimentRecord("x", 1, 1, 9, rows, summarize(rows, 1, 9))


def test_truncated_file_reports_line(tmp_path):
    p = write_records(tmp_path / "t.csv", _small_record())
    text = p.read_text()
    p.write_text(text[: text.rindex(",")])
    with pytest.raises(RecordParseError) as err:
        read_records(p)
    assert err.value.lineno == 4
    assert "line 4" in str(err.value)


def test_bad_fields_report_line(tmp_path):
    p = write_records(tmp_path / "t.csv", _small_record())
    lines = p.read_text().splitlines()
    lines[2] = lines[2].replace(",1,,0", ",yes,,0")
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(RecordParseError) as err:
        read_records(p)
    assert err.value.lineno == 3


def test_bad_header(tmp_path):
    p = write_records(tmp_path / "t.csv", _small_record())
    p.write_text("a,b\n" + p.read_text().split("\n", 1)[1])
    with pytest.raises(RecordParseError):
        read_records(p)


def test_injected_summary_mismatch(tmp_path):
    p = write_records(tmp_path / "t.csv", _small_record())
    text = p.read_text().replace("x,1,1,9,1,4,1,,0", "x,1,1,9,1,6,1,,0")
    p.write_text(text)
    with pytest.raises(IntegrityError):
        read_records(p)


def test_missing_sidecar(tmp_path):
    p = write_records(tmp_path / "t.csv", _small_record())
    (tmp_path / "t.csv.json").unlink()
    with pytest.raises(IntegrityError):
        read_records(p)


def test_summary_counts_and_flags():
    rows = [SampleRow(i, 2, True) for i in range(98)] + [SampleRow(98, 0, False, 1, "uncertain"),
                                                          SampleRow(99, 0, False, 0, "base-locus")]
    s = summarize(rows, 1, 4)
    assert (s.n_samples, s.n_used, s.excluded) == (100, 98, 2)
    assert s.mean_count == 2 and s.mean_scaled == 1.0
    assert not s.valid
    assert summarize(rows, 2, 4).valid


def test_ks_reference_cases():
    grid = (np.arange(10**4) + 0.5) * np.pi / 10**4
    assert ks_uniform(grid) < 0.011
    assert ks_uniform(np.full(500, 1.0)) > 0.6
    assert ks_uniform(np.zeros(500)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ks_uniform(np.zeros(99))


def test_ks_shrinks_with_pool():
    small, _ = pooled_angles(60, 50, 10)
    large, _ = pooled_angles(60, 800, 10)
    assert len(large) > len(small) >= 100
    assert ks_uniform(large) < 0.02
    assert np.all((large >= 0) & (large < np.pi))


def test_fit_recovers_exact_line():
    ds = [16, 64, 256, 1024]
    y = [1.4 + 0.3 / math.sqrt(d) for d in ds]
    c, sc, b, sb, res = fit_inverse_sqrt(ds, y, [0.01] * 4)
    assert c == pytest.approx(1.4) and b == pytest.approx(0.3)
    assert np.allclose(res, 0, atol=1e-12)
    assert sc > 0 and sb > 0


def test_convergence_study_small():
    st = convergence_study((16, 64, 256), 600, 11)
    assert [row["d"] for row in st.table()] == [16, 64, 256]
    assert math.isfinite(st.b)
    widths = [1.96 * s for s in st.stderrs]
    assert all(abs(r) < w for r, w in zip(st.residuals, widths))
    again = convergence_study((16, 64, 256), 600, 12)
    assert abs(st.c - again.c) < 1.96 * math.hypot(st.c_stderr, again.c_stderr)
    with pytest.raises(ValueError):
        convergence_study((64, 16), 10, 0)


def test_convergence_study_seed_reproducible():
    a = convergence_study((8, 32), 100, 13)
    b = convergence_study((8, 32), 100, 13)
    assert a.means == b.means and a.c == b.c


def test_pencil2d_small_degrees():
    rec = run_pencil2d(RunConfig(2, 1, 20, 14))
    assert all(r.count == 0 for r in rec.rows)
    rec = run_pencil2d(RunConfig(2, 3, 60, 15))
    assert all(r.count <= 12 for r in rec.rows)
    assert rec.summary.valid


def test_pencil2d_mean_matches_kac_rice_d3():
    d = 3
    rec = run_pencil2d(RunConfig(2, d, 400, 16))
    s = rec.summary
    assert abs(s.mean_count - kac_rice_mean(2, d)) < 3 * s.stderr_scaled * d

"""The acceptance battery: one function per criterion, each returning a :class:`Criterion`.

Sizes and tolerances are fixed here. ``pencillab report`` runs all of
them and prints a JSON verdict; ``tests/test_acceptance.py`` runs them
under pytest.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import cohomology as coh
from .constants import (E_R2_GOLDEN, e_r, growth_exponent, kac_rice_density, peak_lambda,
                        predicted_real_density, radial_gamma, sphere_vol, wallis)
from .ensembles import make_stream, sample_kostlan_binary, stream_id_for
from .experiments import RunConfig, convergence_study, ks_uniform, pooled_angles, run_pencil2d
from .forms import BinaryForm, wronskian_binary
from .quadric import (QuadricChart, aat_closed_form, aat_reference, build_AB, det_rank_one_identity,
                      gram_jac_psi, jac_psi, quadric_mc)
from .realroots.critical import pencil_critical_count
from .realroots.sturm import sturm_count

__all__ = ["Criterion", "CRITERIA", "run_all", "verdict", "rounded_kostlan_pair"] + [f"criterion_{k}" for k in range(1, 10)]

SEED = 20240611


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    blocking: bool = True

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = "" if self.blocking else " (non-blocking)"
        return f"[{tag}] criterion {self.number}: {self.name}{extra} ({self.seconds:.1f} s)"

    def to_dict(self):
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "blocking": self.blocking, "seconds": self.seconds, "details": _jsonable(self.details)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _timed(number, name, fn, blocking=True):
    t0 = time.perf_counter()
    passed, details = fn()
    return Criterion(number, name, bool(passed), details, time.perf_counter() - t0, blocking)


# ---------------------------------------------------------------------------


def criterion_1():
    def body():
        t0 = time.perf_counter()
        q1 = e_r(1).mean
        exact = math.sqrt(2 / math.pi)
        m1 = e_r(1, "mc", 10**6, make_stream(SEED, 1))
        q2 = e_r(2).mean
        m2 = e_r(2, "mc", 10**6, make_stream(SEED, 2))
        dt = time.perf_counter() - t0
        checks = {
            "quad_n1_err": abs(q1 - exact),
            "quad_n1_ok": abs(q1 - exact) < 1e-10,
            "mc_n1": m1.to_dict(),
            "mc_n1_ok": m1.within(exact) and m1.stderr < 1.5e-3,
            "quad_n2": q2,
            "quad_n2_golden_gap": abs(q2 - E_R2_GOLDEN),
            "mc_n2": m2.to_dict(),
            "mc_n2_ok": m2.within(q2),
            "runtime_s": dt,
            "runtime_ok": dt < 30,
        }
        ok = checks["quad_n1_ok"] and checks["mc_n1_ok"] and checks["mc_n2_ok"] and checks["runtime_ok"]
        return ok, checks

    return _timed(1, "expected absolute determinants", body)


def criterion_2():
    def body():
        t0 = time.perf_counter()
        ok1 = all(coh.exact_crit_count(1, d) == 2 * d - 2 for d in range(1, 101))
        ok2 = all(coh.exact_crit_count(2, d) == 3 * (d - 1) ** 2 for d in range(1, 101))
        gaps = {}
        D = 10**6
        for n in range(1, 5):
            gaps[n] = float(abs(Fraction(coh.exact_crit_count(n, D), D**n) - (n + 1)) / (n + 1))
        ok3 = all(g < 1e-4 for g in gaps.values())
        ok4 = True
        for n in range(1, 7):
            a, b = coh.leading_density_complex(n)
            ok4 &= a == b == n + 1
        dt = time.perf_counter() - t0
        details = {"crit_n1": ok1, "crit_n2": ok2, "relative_gap_at_1e6": gaps,
                   "leading_density_consistent": ok4, "runtime_s": dt}
        return ok1 and ok2 and ok3 and ok4 and dt < 5, details

    return _timed(2, "exact complex critical counts", body)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def criterion_3():
    def body():
        t0 = time.perf_counter()
        gen = make_stream(SEED, 3).generator(0)
        worst_jac = 0.0
        for _ in range(10**4):
            n = int(gen.integers(1, 5))
            a, b = gen.standard_normal(2)
            t = gen.standard_normal(n)
            worst_jac = max(worst_jac, _rel(jac_psi(a, b, t), gram_jac_psi(a, b, t)))
        worst_det = 0.0
        for n in range(1, 7):
            for _ in range(200):
                t = gen.standard_normal(n) * gen.exponential()
                worst_det = max(worst_det, _rel(det_rank_one_identity(t), 1 + t @ t))
        worst_aat = 0.0
        for _ in range(10**4):
            n = int(gen.integers(1, 5))
            a, b = gen.standard_normal(2)
            t = gen.standard_normal(n)
            S = gen.standard_normal((n, n))
            ch = QuadricChart(n, a, b, t, S + S.T, S.T @ S)
            A = build_AB(ch).A
            aat = A @ A.T
            for ref in (aat_reference(ch.point), aat_closed_form(a, b, t)):
                worst_aat = max(worst_aat, float(np.max(np.abs(aat - ref) / np.maximum(1.0, np.abs(ref)))))
        worst_q = 0.0
        for m in range(1, 13):
            q = integrate.quad(lambda s: np.cos(s) ** (m - 1), 0, math.pi / 2, epsabs=1e-14, epsrel=1e-13)[0]
            worst_q = max(worst_q, _rel(wallis(m), q))
        for n in range(0, 9):
            q = integrate.quad(lambda r: r ** (n + 1) * np.exp(-r * r), 0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
            worst_q = max(worst_q, _rel(radial_gamma(n), q))
        vol = 2.0
        for k in range(1, 9):
            # Vol(S^k) = Vol(S^(k-1)) * int_0^pi sin^(k-1)
            vol *= integrate.quad(lambda s: np.sin(s) ** (k - 1), 0, math.pi, epsabs=1e-14, epsrel=1e-13)[0]
            worst_q = max(worst_q, _rel(sphere_vol(k), vol))
        dt = time.perf_counter() - t0
        details = {"jac_psi_vs_gram": worst_jac, "det_rank_one": worst_det, "aat_entrywise": worst_aat,
                   "closed_forms_vs_quadrature": worst_q, "runtime_s": dt}
        ok = worst_jac < 1e-10 and worst_det < 1e-12 and worst_aat < 1e-12 and worst_q < 1e-12 and dt < 10
        return ok, details

    return _timed(3, "identity suite", body)


def criterion_4(samples=2100, ds=(64, 256, 1024)):
    # 2100 draws leave headroom for the <1% uncertified samples above the 2000 certified floor
    def body():
        target = predicted_real_density(1).predicted_density_cpn
        st = convergence_study(ds, samples, SEED)
        last = st.records[-1].summary
        excl = max(r.summary.exclusion_rate for r in st.records)
        used = min(r.summary.n_used for r in st.records)
        details = {"target": target, "extrapolated_c": st.c, "c_stderr": st.c_stderr,
                   "relative_gap": abs(st.c - target) / target, "d_max_mean_scaled": last.mean_scaled,
                   "table": st.table(), "max_exclusion_rate": excl, "min_certified": used,
                   "kac_rice_limit": kac_rice_density(1),
                   "gap_to_kac_rice_limit_in_se": (st.c - kac_rice_density(1)) / st.c_stderr}
        ok = (abs(st.c - target) / target < 0.03 and 2.11 <= last.mean_scaled <= 2.33
              and excl < 0.01 and used >= 2000)
        return ok, details

    return _timed(4, "real critical points on RP^1 (extrapolated density)", body)


def criterion_5(samples=15000, d=100):
    def body():
        ang, rec = pooled_angles(d, samples, SEED)
        ks = ks_uniform(ang)
        return len(ang) >= 2 * 10**5 and ks < 0.02, {"n_angles": int(len(ang)), "ks": ks,
                                                     "excluded": rec.summary.excluded}

    return _timed(5, "equidistribution of critical angles", body)


def rounded_kostlan_pair(d, index, bits=30):
    """Kostlan pair with coefficients rounded to ``bits`` significant bits (exact in float)."""
    st = make_stream(SEED, stream_id_for("sturm-oracle"))
    gen = st.generator(index)
    out = []
    for _ in range(2):
        f = sample_kostlan_binary(d, gen)
        c = f.coeffs
        e = np.floor(np.log2(np.max(np.abs(c))))
        q = 2.0 ** (e - bits)
        out.append(BinaryForm(np.round(c / q) * q))
    return out


def criterion_6(samples=1000, dmax=30):
    def body():
        disagree, uncertain, checked = 0, 0, 0
        for i in range(samples):
            d = 2 + i % (dmax - 1)
            a, b = rounded_kostlan_pair(d, i)
            rc = pencil_critical_count(a, b)
            if not rc.certified:
                uncertain += 1
                continue
            exact = sturm_count(wronskian_binary(a.to_exact(), b.to_exact()))
            checked += 1
            disagree += rc.count != exact
        return disagree == 0, {"certified_checked": checked, "disagreements": disagree,
                               "uncertain": uncertain}

    return _timed(6, "grid counts agree with Sturm", body)


def criterion_7(samples=10**6):
    def body():
        est, rep = quadric_mc(1, samples, make_stream(SEED, 7))
        half = (rep.ratio_ci[1] - rep.ratio_ci[0]) / 2
        details = rep.to_dict()
        details["ratio_ci_half_width_rel"] = half / rep.ratio
        return rep.oracle_rel_gap < 0.01 and half / rep.ratio < 0.02, details

    return _timed(7, "quadric Monte Carlo vs reduced quadrature", body)


def criterion_8():
    def body():
        exps = {p: growth_exponent(p, (100, 1000, 10000)) for p in (0, 1, 2)}
        gaps = {p: abs(peak_lambda(100, p) / peak_lambda(100, p, True) - 1) for p in (0, 1, 2)}
        ok = all(abs(exps[p] - (1 + p)) < 0.02 for p in exps) and all(g < 1e-4 for g in gaps.values())
        return ok, {"growth_exponents": exps, "truncation_gap_d100": gaps}

    return _timed(8, "peak-section growth exponents", body)


def criterion_9(samples8=200, samples3=200):
    def body():
        target = 4 * e_r(2).mean
        r8 = run_pencil2d(RunConfig(2, 8, samples8, SEED))
        r3 = run_pencil2d(RunConfig(2, 3, samples3, SEED))
        mean8 = r8.summary.mean_scaled
        cap = max(r.count for r in r3.rows)
        details = {"target_mean_over_d": target, "mean_over_d_d8": mean8,
                   "stderr_d8": r8.summary.stderr_scaled, "relative_gap": abs(mean8 - target) / target,
                   "exclusion_d8": r8.summary.exclusion_rate, "max_count_d3": cap,
                   "kac_rice_mean_over_d_d8": 2 * 7 * (math.sqrt(2) - 0.5) / 8}
        ok = abs(mean8 - target) <= 0.3 * target and cap <= 12 and r8.summary.valid
        return ok, details

    return _timed(9, "RP^2 pencils (extended tier)", body, blocking=False)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def run_all(only=None, echo=None):
    """Run the selected criteria in order; ``echo`` receives each result line."""
    out = []
    for k in sorted(CRITERIA):
        if only and k not in only:
            continue
        res = CRITERIA[k]()
        if echo:
            echo(res.line())
        out.append(res)
    return out


def verdict(results) -> dict:
    blocking = [r for r in results if r.blocking]
    return {"passed": all(r.passed for r in blocking),
            "all_passed": all(r.passed for r in results),
            "criteria": [r.to_dict() for r in results]}

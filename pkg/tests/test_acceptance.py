"""One test per acceptance criterion; each records a PASS/FAIL line."""

import itertools
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from exzeros import bernoulli, bnpoly, cli, digits, lseries, powersums
from exzeros.gfq import field_from_q
from exzeros.polyseries import BiPoly, polygon_in_t, squarefree_in_t
from exzeros.powersums import digit_sum, is_q_minimal

from .conftest import ACCEPTANCE_LINES


def verdict(n, title, ok, elapsed, limit, detail=""):
    ok = bool(ok) and elapsed < limit
    line = f"[AC{n:02d}] {'PASS' if ok else 'FAIL'} {title} ({elapsed:.1f}s, limit {limit}s){' ' + detail if detail else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def qualifying(q, nmax):
    return [N for N in range(2, nmax + 1) if (N - 1) % (q - 1) == 0 and digit_sum(N, q) >= q]


def test_ac01_golden_682():
    t0 = time.time()
    F = field_from_q(4)
    expected = BiPoly.from_terms(
        F,
        [(0, 2, 1)]
        + [(e, 1, 1) for e in (10, 34, 40, 130, 136, 160, 514, 520, 544, 640)]
        + [(e, 0, 1) for e in (170, 554, 650, 674, 680)],
    )
    res = bnpoly.compute_BN(682, F)
    rep = bnpoly.exceptional_zero_report(682, F)
    checks = {
        "polynomial": res.poly == expected,
        "vertices": set(map(tuple, rep["polygon_t"]["vertices"])) == {(0, -2), (640, -1), (680, 0)},
        "valuations": rep["root_valuations_t"] == [["-1/640", 640], ["-1/40", 40]],
        "swapped": {Fraction(v) for v, _ in rep["root_valuations_theta_t"]} == {Fraction(-40), Fraction(-640)},
    }
    bad = [k for k, v in checks.items() if not v]
    verdict(1, "q=4 N=682 polynomial, polygon and zero valuations (exact)", not bad, time.time() - t0, 30, f"failed={bad}" if bad else "")


def _theta_squarefree(bs):
    """BB_s as a polynomial in theta over F_q(t_1..t_s) has no repeated factor (r <= 2)."""
    if bs.r <= 1:
        return True
    b, c = bs.poly.theta_coeff(1), bs.poly.theta_coeff(0)
    if bs.q % 2 == 0:
        return not b.is_zero()  # derivative in theta is the nonzero constant b
    disc = b * b - (c + c + c + c)
    return not disc.is_zero()


def test_ac02_small_forms():
    t0 = time.time()
    failures = []
    for q in (2, 3):
        F = field_from_q(q)
        forms = bnpoly.appendix_forms(F)
        for s, form in forms.items():
            bs = bnpoly.compute_Bs(s, F)
            if bs.poly != form:
                failures.append(f"form q={q} s={s}")
            if not bnpoly.rho_check(bs):
                failures.append(f"rho q={q} s={s}")
            if not _theta_squarefree(bs):
                failures.append(f"theta-squarefree q={q} s={s}")
            # squarefree specializations B_N, N with s digits (multiplicities < q)
            for e in itertools.combinations_with_replacement(range(4), s):
                if any(e.count(x) > q - 1 for x in set(e)):
                    continue
                res = bnpoly.compute_BN(sum(q**x for x in e), F)
                if res.r and not (squarefree_in_t(res.poly) and squarefree_in_t(res.swapped())):
                    failures.append(f"squarefree q={q} N={sum(q**x for x in e)}")
    verdict(2, "small-s closed forms, squarefree and rho bound for q in {2,3} (exact)", not failures, time.time() - t0, 60, str(failures[:5]) if failures else "")


def test_ac03_oracle_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(20240601)
    cells = mismatches = 0
    for q in (2, 3, 4, 5):
        F = field_from_q(q)
        for d in (1, 2, 3):
            for N in range(0, 201):
                ks = [tuple(int(x) for x in rng.integers(0, 4 * q**d, d)) for _ in range(50)]
                a = powersums.power_sums_combinatorial(d, N, [powersums.kbar(k, q) for k in ks], F)
                b = powersums.power_sums_bruteforce(d, N, ks, F)
                cells += 1
                mismatches += int(not np.array_equal(a, b))
    verdict(3, "combinatorial == brute-force power sums, q<=5 d<=3 N<=200 x 50 k (exact)", mismatches == 0, time.time() - t0, 300, f"cells={cells} mismatches={mismatches}")


def test_ac04_bc_three_routes():
    t0 = time.time()
    failures = []
    for q, N, d in [(2, 7, 3), (2, 7, 4), (2, 7, 5), (3, 13, 3), (3, 17, 3)]:
        F = field_from_q(q)
        if bernoulli.bc_via_BN(N, d, F) != bernoulli.bc_series(q**d - N, F)[q**d - N]:
            failures.append(f"series/BN q={q} N={N} d={d}")
    DIGITS = 20
    for q in (2, 3):
        F = field_from_q(q)
        for n in (q - 1, 2 * (q - 1)):
            exact = bernoulli.bc_number(n, F)
            v = exact.valuation()
            z = bernoulli.bc_from_zeta(n, v + DIGITS, F)
            if not (z.prec >= v + DIGITS and z.agrees_with(exact.to_laurent(v + DIGITS))):
                failures.append(f"zeta q={q} n={n}")
    verdict(4, f"BC series == via B_N (exact); zeta/pi route to {DIGITS} digits", not failures, time.time() - t0, 120, str(failures) if failures else "")


def test_ac05_nonvanishing_mod_primes():
    t0 = time.time()
    failures = []
    primes = 0
    for q in (2, 3):
        F = field_from_q(q)
        for N in range(2, 65):
            if (N - 1) % (q - 1):
                continue
            d = 1
            while q**d <= N:
                d += 1
            for dd in range(d, 9):
                rep = bernoulli.verify_theorem_1_2(N, dd, F)
                primes += len(rep["records"])
                if not (rep["bnn_nonzero"] and rep["degree_bound"] and rep["pass"]):
                    failures.append((q, N, dd))
                for r in rep["records"]:
                    if "bc_zero" in r and r["bc_zero"] != r["zero"]:
                        failures.append((q, N, dd, r["P"]))
    verdict(5, "B_N(theta,theta) nonzero, degree bound, residues and BC equivalence, deg P <= 8 (exact)", not failures, time.time() - t0, 300, f"primes={primes} failures={failures[:5]}")


def test_ac06_structural_suite():
    t0 = time.time()
    records = []
    for q in (2, 3):
        F = field_from_q(q)
        fargs = (F.p, F.e, tuple(F.modulus))
        records += cli.run_suite(fargs, 64, ["structure"], 1, powersums.DEFAULT_BUDGET)
    rec_ok = bnpoly.vanishing_recursion_check(5, field_from_q(3))
    bad = [(r["id"], r["inputs"]) for r in records if r["verdict"] != "pass"]
    verdict(6, "structural identities on N <= 64, q in {2,3} (exact)", not bad and rec_ok and records, time.time() - t0, 300, f"checks={len(records) + 1} failures={bad[:5]}")


def test_ac07_newton_polygons():
    t0 = time.time()
    failures = []
    cases = 0
    for q in (2, 3, 4):
        F = field_from_q(q)
        for N in qualifying(q, 64):
            if q == F.p:
                d = (digit_sum(N, q) - q) // (q - 1)
            else:
                d = 0
                while powersums.enumerate_U(d + 1, N, (q - 1,) * (d + 1), q).shape[0]:
                    d += 1
                d -= 1  # largest d with U_{d+1}(N) nonempty
            if d < 1:
                continue
            cases += 1
            T = lseries.lambda_truncation(N, d, F)
            expected = [(powersums.deg_S(j, N, F) if j else 0, j) for j in range(d + 1)]
            got = [(x, int(v)) for x, v in T.polygon().vertices]
            if got != expected:
                failures.append(("edges", q, N))
            degs = [x for x, _ in expected]
            if any(degs[j] - degs[j - 1] <= degs[j + 1] - degs[j] for j in range(1, d)):
                failures.append(("concavity", q, N))
    certified = 0
    for q in (2, 3, 4, 5):
        F = field_from_q(q)
        for N in qualifying(q, 64):
            if is_q_minimal(N, q):
                certified += 1
                if not bnpoly.simplicity_certificate(bnpoly.compute_BN(N, F)):
                    failures.append(("simplicity", q, N))
    verdict(7, "polygon edge points, concavity and simplicity certificates (exact)", not failures and cases and certified, time.time() - t0, 300, f"polygons={cases} certificates={certified} failures={failures[:5]}")


def test_ac08_appendix_a():
    t0 = time.time()
    failures = []
    PREC = 20
    for q in (2, 3):
        F = field_from_q(q)
        for j in range(3):
            rep = digits.omega_residue_check(j, 16, F, D=3)
            if not rep["pass"]:
                failures.append(("omega", q, j))
        for N in qualifying(q, 64):
            if not digits.verify_digit_principle(N, PREC, F)["pass"]:
                failures.append(("digit", q, N))
    F2 = field_from_q(2)
    dv = digits.delta_bruteforce(1, 4, 40, F2)
    ref = digits.delta_one_reference(4, 40, F2)
    P = min(dv.precision, ref.prec)
    if not dv.value.truncate(P).agrees_with(ref.truncate(P)):
        failures.append(("delta_1",))
    verdict(8, f"omega residues, exp coefficients to t^3, digit principle at precision {PREC}, delta_1", not failures, time.time() - t0, 300, str(failures[:5]) if failures else "")


def test_ac09_fitting_identity():
    t0 = time.time()
    PREC = 8
    failures = [(q, N) for q, Ns in ((2, (3, 7, 11)), (3, (7, 13))) for N in Ns if not lseries.verify_fitting_identity(N, PREC, field_from_q(q))["pass"]]
    verdict(9, f"Fitting identity to 1/t-precision {PREC}", not failures, time.time() - t0, 120, str(failures) if failures else "")


def test_ac10_determinism():
    t0 = time.time()
    outs = []
    for jobs in (1, 8):
        r = subprocess.run(
            [sys.executable, "-m", "exzeros", "verify", "--suite", "all", "--q", "2", "--nmax", "32", "--jobs", str(jobs)],
            capture_output=True,
        )
        outs.append((r.returncode, r.stdout))
    same = outs[0] == outs[1]
    verdict(10, "full suite output byte-identical at jobs 1 and 8", same and outs[0][0] == 0, time.time() - t0, 600, f"bytes={len(outs[0][1])} exit={outs[0][0]},{outs[1][0]}")

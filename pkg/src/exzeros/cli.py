"""Command-line entry point.

Exit codes: 0 success, 1 a verification failed, 2 usage or validation error.
Every flag can also be set through an environment variable EXZEROS_<FLAG>
(upper case, dashes as underscores), e.g. EXZEROS_Q=3, EXZEROS_JOBS=4,
EXZEROS_BUDGET=1e9, EXZEROS_FORMAT=json, EXZEROS_CACHE_DIR=/tmp/exz.
Command-line flags win over the environment.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import os
import sys

from . import bernoulli, bnpoly, digits, lseries, powersums
from .gfq import FieldError, field_construct, field_from_q
from .polyseries import BiPoly, polygon_in_t
from .powersums import BudgetExceeded, digit_sum, is_q_minimal

ENV_PREFIX = "EXZEROS_"
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _field_args(args):
    """(p, e, modulus) describing the field; picklable for worker processes."""
    q = args.q if args.q is not None else _env("q")
    p = args.p if args.p is not None else _env("p")
    modulus = args.modulus if args.modulus is not None else _env("modulus")
    if p is not None:
        if modulus is None:
            raise UsageError("--p needs --modulus (or use --q)")
        coeffs = tuple(int(c) for c in str(modulus).split(","))
        return (int(p), len(coeffs) - 1, coeffs)
    if q is None:
        raise UsageError("a field is required: --q or --p/--modulus")
    f = field_from_q(int(q))
    return (f.p, f.e, tuple(f.modulus))


def _field(fargs):
    p, e, modulus = fargs
    return field_construct(p, e, modulus)


def _budget(args):
    raw = args.budget if args.budget is not None else _env("budget")
    if raw is None:
        return powersums.DEFAULT_BUDGET
    val = int(float(raw))
    if val <= 0:
        raise UsageError("budget must be positive")
    return val


def _jobs(args):
    raw = args.jobs if args.jobs is not None else _env("jobs", "1")
    val = int(raw)
    if val < 1:
        raise UsageError("--jobs must be >= 1")
    return val


def _format(args):
    if args.fmt is not None:
        return args.fmt
    return _env("format", "text")


def _cache_dir(args):
    d = args.cache_dir if args.cache_dir is not None else _env("cache_dir")
    if d:
        os.makedirs(d, exist_ok=True)
    return d


def _pmap(fn, items, jobs):
    """Ordered map; worker count never changes the result order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=1))


def _dump(obj):
    return json.dumps(obj, sort_keys=True)


# ---------------------------------------------------------------------------
# B_N with an optional on-disk cache
# ---------------------------------------------------------------------------


def _bn(N, field, budget, cache_dir=None):
    if cache_dir:
        mod = "-".join(str(c) for c in field.modulus)
        path = os.path.join(cache_dir, f"bn_p{field.p}_m{mod}_N{N}.json")
        if os.path.exists(path):
            with open(path) as fh:
                obj = json.load(fh)
            poly = BiPoly.from_json(field, obj["poly"])
            return bnpoly.BNResult(N, field.q, obj["r"], tuple(obj["digits"]), poly, obj["tail"])
        res = bnpoly.compute_BN(N, field, budget=budget)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"r": res.r, "digits": list(res.digits), "tail": res.tail, "poly": res.poly.to_json()}, fh, sort_keys=True)
        os.replace(tmp, path)
        return res
    return bnpoly.compute_BN(N, field, budget=budget)


# ---------------------------------------------------------------------------
# text renderers shared with the golden files
# ---------------------------------------------------------------------------


def _frac(x):
    return str(x)


def render_bn_example(res):
    """Polynomial, Newton polygons and root valuations of B_N."""
    B = res.poly
    poly_t = polygon_in_t(B)
    poly_sw = polygon_in_t(res.swapped())
    lines = [
        f"q = {res.q}",
        f"N = {res.N}",
        f"r = {res.r}",
        f"B_N(t, theta) = {B.to_text()}",
        "newton polygon of B_N(t, theta) in t: " + " ".join(f"({x},{_frac(y)})" for x, y in poly_t.vertices),
        "root valuations of B_N(t, theta) in t: " + ", ".join(f"{w} at {_frac(v)}" for v, w in poly_t.root_valuations()),
        "newton polygon of B_N(theta, t) in t: " + " ".join(f"({x},{_frac(y)})" for x, y in poly_sw.vertices),
        "root valuations of B_N(theta, t) in t: " + ", ".join(f"{w} at {_frac(v)}" for v, w in poly_sw.root_valuations()),
    ]
    return "\n".join(lines) + "\n"


def render_small_bs(field, budget=powersums.DEFAULT_BUDGET):
    q = field.q
    lines = [f"q = {q}"]
    for s in (q, 2 * q - 1, 3 * q - 2):
        bs = bnpoly.compute_Bs(s, field, budget=budget)
        lines.append(f"BB_{s} = {bs.poly.to_text()}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _emit(out, fmt, text, obj):
    if fmt == "json":
        out.write(_dump(obj) + "\n")
    elif fmt == "csv":
        raise UsageError("csv output is only available for verify and scan")
    else:
        out.write(text)


def cmd_bn(args, out):
    fargs = _field_args(args)
    field = _field(fargs)
    N = args.report if type(args.report) is int else args.N
    if N is None:
        raise UsageError("--N is required")
    fmt = _format(args)
    if args.report is not None:
        rep = bnpoly.exceptional_zero_report(N, field, budget=_budget(args))
        rep = {"field": field.header(), **rep}
        text = "".join(f"{k}: {json.dumps(v, sort_keys=True)}\n" for k, v in rep.items())
        _emit(out, fmt, text, rep)
        return 0
    res = _bn(N, field, _budget(args), _cache_dir(args))
    poly = res.swapped() if args.swap else res.poly
    name = "B_N(theta, t)" if args.swap else "B_N(t, theta)"
    obj = {"field": field.header(), "N": N, "r": res.r, "poly": poly.to_json()}
    _emit(out, fmt, f"{name} = {poly.to_text()}\n", obj)
    return 0


def cmd_bs(args, out):
    field = _field(_field_args(args))
    bs = bnpoly.compute_Bs(args.s, field, budget=_budget(args))
    obj = {"field": field.header(), "s": args.s, "r": bs.r, "poly": bs.poly.to_json()}
    _emit(out, _format(args), f"BB_{args.s} = {bs.poly.to_text()}\n", obj)
    return 0


def cmd_bc(args, out):
    field = _field(_field_args(args))
    if args.via_bn:
        if args.N is None or args.d is None:
            raise UsageError("--via-bn needs --N and --d")
        val = bernoulli.bc_via_BN(args.N, args.d, field, budget=_budget(args))
        n = field.q**args.d - args.N
    else:
        if args.n is None:
            raise UsageError("--n is required")
        n = args.n
        val = bernoulli.bc_number(n, field)
    obj = {"field": field.header(), "n": n, "value": val.to_json()}
    _emit(out, _format(args), f"BC_{n} = {val.to_text()}\n", obj)
    return 0


def cmd_powersum(args, out):
    field = _field(_field_args(args))
    k = tuple(args.k) if args.k else (0,) * args.d
    if len(k) != args.d:
        raise UsageError("--k needs exactly d entries")
    budget = _budget(args)
    res = {}
    if args.method in ("comb", "both"):
        res["comb"] = powersums.power_sum_combinatorial(args.d, args.N, k, field, budget)
    if args.method in ("brute", "both"):
        res["brute"] = powersums.power_sum_bruteforce(args.d, args.N, k, field, budget)
    first = next(iter(res.values()))
    obj = {"field": field.header(), "d": args.d, "N": args.N, "k": list(k), "poly": first.to_json()}
    text = f"S_{args.d}({args.N}, {list(k)}) = {first.to_text()}\n"
    code = 0
    if len(res) == 2:
        agree = res["comb"] == res["brute"]
        obj["agree"] = agree
        text += f"agree: {agree}\n"
        code = 0 if agree else 1
    _emit(out, _format(args), text, obj)
    return code


def cmd_lseries(args, out):
    field = _field(_field_args(args))
    budget = _budget(args)
    fmt = _format(args)
    if args.fitting:
        rep = lseries.verify_fitting_identity(args.N, args.prec, field, budget=budget)
        obj = {"field": field.header(), **rep}
        _emit(out, fmt, f"fitting identity N={args.N} prec={args.prec}: {'pass' if rep['pass'] else 'FAIL'}\n", obj)
        return 0 if rep["pass"] else 1
    if args.r is None:
        raise UsageError("--r is required")
    T = lseries.lambda_truncation(args.N, args.r, field, budget)
    poly = T.polygon()
    segs = lseries.certified_segments(args.N, args.r, field, budget)
    lines = [f"alpha_{i} = {T.alpha(i).to_text()}" for i in range(args.r + 1)]
    lines.append("polygon: " + " ".join(f"({x},{y})" for x, y in poly.vertices))
    # a segment of slope s and width w certifies w zeros of valuation -s
    lines.append("certified zero valuations: " + ", ".join(f"{w} at {-s}" for s, w in segs))
    obj = {
        "field": field.header(),
        "N": args.N,
        "alphas": [T.alpha(i).to_json() for i in range(args.r + 1)],
        "polygon": poly.to_json(),
        "certified": [[str(-s), w] for s, w in segs],
    }
    _emit(out, fmt, "\n".join(lines) + "\n", obj)
    return 0


def cmd_delta(args, out):
    field = _field(_field_args(args))
    budget = _budget(args) if (args.budget is not None or _env("budget")) else digits.DEFAULT_BUDGET
    val = digits.delta_bruteforce(args.N, args.depth, args.prec, field, budget)
    obj = {"field": field.header(), **val.to_json()}
    text = (
        f"delta_{args.N} = {val.value.to_text(max_terms=12)}\n"
        f"depth {val.depth}, precision {val.precision}, tail bound {val.tail_bound}\n"
    )
    _emit(out, _format(args), text, obj)
    return 0


# ---------------------------------------------------------------------------
# verification registry
# ---------------------------------------------------------------------------

# id -> statement being checked
REGISTRY = {
    "bn.frobenius": "B_N(t^p, theta^p) = B_N(t, theta)^p",
    "bn.scale_q": "B_{qN}(t, theta) = B_N(t^q, theta)",
    "bn.congruence": "B_N = (theta - t)^r - r (t^q - t)(theta - t)^{r-1} mod (t^q - t)^2",
    "bn.t_p_powers": "p | N implies B_N is a polynomial in t^p",
    "bn.deg_t_at_least_p": "deg_t B_N >= p when r >= 1",
    "bn.total_degree": "total degree of B_N at most rN + r - 2",
    "bn.primitive": "B_N is primitive in t over F_q[theta]",
    "bn.root_valuations": "roots of B_N(t, theta) in t have valuations in [-1, -1/N]",
    "bn.no_small_roots": "B_N(a, theta) != 0 for a in F_q[theta] of degree <= 2",
    "bn.theta_power_roots": "at most one theta^{q^i} among the roots",
    "bn.squarefree": "B_N(t, theta) and B_N(theta, t) are squarefree in t",
    "bn.no_theta_power_roots": "no theta^{q^i} is a root (|i| <= k + 2)",
    "bn.coprime_prime_powers": "B_N coprime to P(t)^N - P(theta) for primes P of degree <= 3",
    "bn.simplicity": "polygon of B_N(theta, t): r segments of width 1 with distinct integer slopes",
    "lseries.edge_points": "edge points of the truncated L-series polygon are (deg_t S_j(N), j)",
    "lseries.degree_bound": "deg_t alpha_{i,N} <= N (log_q i + [l_q(N)/(q-1)] + 1)",
    "lseries.fitting": "B_N(theta, t) pi_bar t^-r prod omega_bar(theta^{q^l})^{n_l} equals the 1/t-expansion of curly-L_N",
    "bc.three_routes": "BC_{q^d-N} from the series equals the B_N route",
    "bc.nonvanishing": "B_N(theta, theta) mod P != 0 for deg P = d when d >= (l-1)N/(q-1), and the vanishing patterns of BC_{q^d-N} and B_N(theta, theta) mod P agree",
    "delta.digit_principle": "delta_N / pi~ = (-1)^s beta_N Pi(N) pi~^{-N}",
    "bs.small_forms": "BB_q, BB_{2q-1}, BB_{3q-2} equal their closed forms",
    "bs.rho": "rho(B_{i,s}) >= i(q-1) + 1",
    "bs.recursion": "BB_s(t_1..t_{s'}, 0, ..) = (theta - t_1...t_{s'}) BB_{s'} with s' = s - q + 1",
    "n1.identities": "ell_d sum 1/a = 1 and ell_d S_d(1) = prod (t - theta^{q^i})",
    "n1.pellarin": "(theta - t) L_1(t) = (pi~/lambda) prod (1 - t/theta^{q^j})",
    "omega.residue": "residue of omega at theta^{q^j} and omega = exp_C(pi~/(theta - t))",
    "bc.zeta_route": "Pi(n) zeta_A(n) / pi~^n equals BC_n",
}

SUITES = {
    "structure": ("bn.",),
    "lseries": ("lseries.",),
    "bc": ("bc.",),
    "digits": ("delta.", "omega."),
    "bs": ("bs.",),
    "n1": ("n1.",),
}


def _record(cid, inputs, ok, witness=None):
    rec = {"id": cid, "inputs": inputs, "verdict": "pass" if ok else "fail"}
    if not ok and witness is not None:
        rec["witness"] = witness
    return rec


def _qualifying(N, q):
    return N >= 2 and (N - 1) % (q - 1) == 0 and digit_sum(N, q) >= q


def _task_bn(task):
    fargs, N, budget, cache_dir = task
    field = _field(fargs)
    q = field.q
    res = _bn(N, field, budget, cache_dir)
    inp = {"q": q, "N": N}
    out = []
    l22 = bnpoly.frobenius_scaling_checks(res, field, budget)
    for key, cid in (("frobenius", "bn.frobenius"), ("qN", "bn.scale_q"), ("congruence", "bn.congruence"), ("t_p_powers", "bn.t_p_powers")):
        if key in l22:
            out.append(_record(cid, inp, l22[key]))
    l23 = bnpoly.degree_primitivity_checks(res)
    for key, cid in (("deg_t_at_least_p", "bn.deg_t_at_least_p"), ("total_degree_bound", "bn.total_degree"), ("primitive", "bn.primitive")):
        if key in l23:
            out.append(_record(cid, inp, l23[key]))
    ok, vals = bnpoly.valuation_bound_check(res)
    out.append(_record("bn.root_valuations", inp, ok, [[str(v), w] for v, w in vals]))
    out.append(_record("bn.no_small_roots", inp, bnpoly.no_small_roots_check(res, field)))
    roots = bnpoly.theta_power_roots(res, len(res.digits) + 2)
    out.append(_record("bn.theta_power_roots", inp, len(roots) <= 1, roots))
    c56 = bnpoly.root_separation_checks(res, field)
    out.append(_record("bn.squarefree", inp, c56["squarefree"]))
    out.append(_record("bn.no_theta_power_roots", inp, c56["no_theta_power_roots"], roots))
    out.append(_record("bn.coprime_prime_powers", inp, c56["coprime_prime_powers"]))
    if q == field.p or is_q_minimal(N, q):
        out.append(_record("bn.simplicity", inp, bnpoly.simplicity_certificate(res)))
    return out


def _task_lseries(task):
    fargs, N, budget, cache_dir = task
    field = _field(fargs)
    q, p = field.q, field.p
    inp = {"q": q, "N": N}
    out = []
    if q == p:
        dmax = (digit_sum(N, q) - q) // (q - 1)
    else:
        dmax = 0
        while powersums.enumerate_U(dmax + 2, N, (q - 1,) * (dmax + 2), q, p, budget).shape[0]:
            dmax += 1
    if dmax >= 1:
        T = lseries.lambda_truncation(N, dmax, field, budget)
        expected = [(powersums.deg_S(j, N, field, budget) if j else 0, j) for j in range(dmax + 1)]
        got = [tuple(v) for v in T.polygon().vertices]
        out.append(_record("lseries.edge_points", inp, got == expected, {"got": got, "expected": expected}))
    T = lseries.lambda_truncation(N, max(dmax, 1) + 2, field, budget)
    degs = T.degrees()
    ok = all(d <= lseries.alpha_degree_bound(i, N, q) for i, d in enumerate(degs) if d >= 0)
    out.append(_record("lseries.degree_bound", inp, ok, degs))
    rep = lseries.verify_fitting_identity(N, 8, field, B=_bn(N, field, budget, cache_dir).poly, budget=budget)
    out.append(_record("lseries.fitting", {**inp, "prec": 8}, rep["pass"], rep.get("mismatch_rows")))
    return out


def _task_bc(task):
    fargs, N, budget, cache_dir, dmax = task
    field = _field(fargs)
    q = field.q
    out = []
    B = _bn(N, field, budget, cache_dir).poly
    d = 1
    while q**d <= N:
        d += 1
    while d <= dmax:
        inp = {"q": q, "N": N, "d": d}
        if q**d - N <= bernoulli.BC_CAP:
            a = bernoulli.bc_via_BN(N, d, field, B=B)
            b = bernoulli.bc_number(q**d - N, field)
            out.append(_record("bc.three_routes", inp, a == b))
        rep = bernoulli.verify_theorem_1_2(N, d, field, budget=budget)
        bad = [r["P"] for r in rep["records"] if (rep["hypothesis"] and r["zero"]) or ("bc_zero" in r and r["bc_zero"] != r["zero"])]
        out.append(_record("bc.nonvanishing", inp, rep["pass"], bad))
        d += 1
    return out


def _task_digits(task):
    fargs, N, prec = task
    field = _field(fargs)
    rep = digits.verify_digit_principle(N, prec, field)
    return [_record("delta.digit_principle", {"q": field.q, "N": N, "prec": prec}, rep["pass"], rep)]


def _task_global(task):
    fargs, name, budget = task
    field = _field(fargs)
    q = field.q
    out = []
    if name == "bs":
        forms = bnpoly.appendix_forms(field)
        for s, form in sorted(forms.items()):
            bs = bnpoly.compute_Bs(s, field, budget=budget)
            out.append(_record("bs.small_forms", {"q": q, "s": s}, bs.poly == form))
            out.append(_record("bs.rho", {"q": q, "s": s}, bnpoly.rho_check(bs)))
        s = 2 * q - 1
        out.append(_record("bs.recursion", {"q": q, "s": s}, bnpoly.vanishing_recursion_check(s, field, budget)))
    elif name == "n1":
        for d in range(0, 4 if q <= 3 else 3):
            rep = lseries.l1_identities(d, field, budget)
            out.append(_record("n1.identities", {"q": q, "d": d}, rep["sum_inverse"] and rep["sum_ratio"]))
        out.append(_record("n1.pellarin", {"q": q, "prec": 20, "deg": 3}, lseries.pellarin_identity_check(20, 3, field)["pass"]))
    elif name == "omega":
        for j in range(3):
            out.append(_record("omega.residue", {"q": q, "j": j, "prec": 16}, digits.omega_residue_check(j, 16, field)["pass"]))
    elif name == "zeta":
        for n in (q - 1, 2 * (q - 1)):
            bc = bernoulli.bc_number(n, field)
            v = bc.valuation()
            z = bernoulli.bc_from_zeta(n, v + 20, field)
            out.append(_record("bc.zeta_route", {"q": q, "n": n, "digits": 20}, z.agrees_with(bc.to_laurent(v + 20)) and z.prec >= v + 20))
    return out


def _sort_key(rec):
    return (rec["id"], _dump(rec["inputs"]))


def run_suite(fargs, nmax, suites, jobs, budget, cache_dir=None, dmax=6, prec=20):
    field = _field(fargs)
    q = field.q
    Ns = [N for N in range(2, nmax + 1) if _qualifying(N, q)]
    wanted = lambda prefix: any(prefix.startswith(s) for name in suites for s in SUITES[name])
    groups = []
    if wanted("bn."):
        groups.append((_task_bn, [(fargs, N, budget, cache_dir) for N in Ns]))
    if wanted("lseries."):
        groups.append((_task_lseries, [(fargs, N, budget, cache_dir) for N in Ns]))
    if wanted("bc."):
        groups.append((_task_bc, [(fargs, N, budget, cache_dir, dmax) for N in Ns]))
        groups.append((_task_global, [(fargs, "zeta", budget)]))
    if wanted("delta."):
        groups.append((_task_digits, [(fargs, N, prec) for N in Ns if N >= q and field.is_prime]))
        groups.append((_task_global, [(fargs, "omega", budget)]))
    if wanted("bs."):
        groups.append((_task_global, [(fargs, "bs", budget)]))
    if wanted("n1."):
        groups.append((_task_global, [(fargs, "n1", budget)]))
    records = []
    for fn, tasks in groups:
        for chunk in _pmap(fn, tasks, jobs):
            records.extend(chunk)
    records.sort(key=_sort_key)
    return records


def _write_records(out, records, fmt, header):
    if fmt == "json":
        out.write(_dump({"field": header, "records": records}) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "inputs", "verdict", "witness"])
        for r in records:
            w.writerow([r["id"], _dump(r["inputs"]), r["verdict"], _dump(r.get("witness")) if "witness" in r else ""])
        out.write(buf.getvalue())
    else:
        for r in records:
            inp = ",".join(f"{k}={v}" for k, v in sorted(r["inputs"].items()))
            line = f"{r['verdict'].upper():4s} {r['id']} {inp}"
            if "witness" in r:
                line += f" witness={_dump(r['witness'])}"
            out.write(line + "\n")
        npass = sum(r["verdict"] == "pass" for r in records)
        out.write(f"{npass}/{len(records)} checks passed\n")


def cmd_verify(args, out):
    fargs = _field_args(args)
    field = _field(fargs)
    budget = _budget(args)
    jobs = _jobs(args)
    fmt = _format(args)
    if args.theorem12:
        if args.N is None:
            raise UsageError("--theorem12 needs --N")
        dmax = args.dmax if args.dmax is not None else 6
        records = _task_bc((fargs, args.N, budget, _cache_dir(args), dmax))
    elif args.digit_principle:
        if args.N is None:
            raise UsageError("--digit-principle needs --N")
        records = _task_digits((fargs, args.N, args.prec or 20))
    else:
        suites = list(SUITES) if args.suite == "all" else [args.suite]
        nmax = args.nmax if args.nmax is not None else 32
        dmax = args.dmax if args.dmax is not None else 6
        records = run_suite(fargs, nmax, suites, jobs, budget, _cache_dir(args), dmax, args.prec or 20)
    records.sort(key=_sort_key)
    _write_records(out, records, fmt, field.header())
    return 0 if all(r["verdict"] == "pass" for r in records) else 1


# ---------------------------------------------------------------------------
# scan: append-only JSON lines
# ---------------------------------------------------------------------------


def _parse_range(text):
    if ".." not in text:
        raise UsageError("--drange expects a..b")
    a, b = text.split("..", 1)
    return int(a), int(b)


def _scan_task(task):
    fargs, N, d, budget = task
    field = _field(fargs)
    q = field.q
    if q**d <= N:
        return []
    rep = bernoulli.verify_theorem_1_2(N, d, field, budget=budget)
    out = []
    for r in rep["records"]:
        zero = r["zero"]
        ok = not (rep["hypothesis"] and zero)
        if "bc_zero" in r:
            ok = ok and r["bc_zero"] == zero
        out.append(
            {
                "q": q,
                "modulus": list(field.modulus),
                "N": N,
                "d": d,
                "P": r["P"],
                "residue": r["residue"],
                "nonzero": not zero,
                "hypothesis": rep["hypothesis"],
                "verdict": "ok" if ok else "violation",
            }
        )
    return out


def _scan_key(rec):
    return (rec["q"], tuple(rec["modulus"]), rec["N"], rec["P"])


def cmd_scan(args, out):
    fargs = _field_args(args)
    budget = _budget(args)
    if args.N is None or args.drange is None or args.out is None:
        raise UsageError("scan needs --N, --drange and --out")
    field = _field(fargs)
    if args.N < 2 or (args.N - 1) % (field.q - 1):
        raise UsageError(f"N = {args.N} must be >= 2 and congruent to 1 mod {field.q - 1}")
    a, b = _parse_range(args.drange)
    seen = set()
    if os.path.exists(args.out):
        with open(args.out) as fh:
            for line in fh:
                if line.strip():
                    seen.add(_scan_key(json.loads(line)))
    tasks = [(fargs, args.N, d, budget) for d in range(a, b + 1)]
    records = [r for chunk in _pmap(_scan_task, tasks, _jobs(args)) for r in chunk]
    new = [r for r in records if _scan_key(r) not in seen]
    with open(args.out, "a") as fh:
        for r in new:
            fh.write(_dump(r) + "\n")
    bad = [r for r in records if r["verdict"] != "ok"]
    fmt = _format(args)
    if fmt == "json":
        out.write(_dump({"field": field.header(), "records": len(records), "appended": len(new), "violations": len(bad)}) + "\n")
    else:
        out.write(f"{len(records)} records, {len(new)} appended, {len(bad)} violations\n")
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# reproduce-paper
# ---------------------------------------------------------------------------

EXAMPLE = {4: 682}
SMALL_BS_QS = (2, 3, 4, 5)


def golden_path(name):
    return os.path.join(GOLDEN_DIR, name)


def cmd_reproduce(args, out):
    budget = _budget(args)
    qs = [args.q] if args.q is not None else sorted(set(EXAMPLE) | set(SMALL_BS_QS))
    failures = 0
    for q in qs:
        field = field_from_q(q)
        items = []
        if q in EXAMPLE:
            res = bnpoly.compute_BN(EXAMPLE[q], field, budget=budget)
            items.append((f"bn_q{q}_N{EXAMPLE[q]}.txt", render_bn_example(res)))
        if q in SMALL_BS_QS:
            items.append((f"small_bs_q{q}.txt", render_small_bs(field, budget)))
        if not items:
            raise UsageError(f"no reference data for q={q}")
        for name, text in items:
            with open(golden_path(name)) as fh:
                ref = fh.read()
            ok = text == ref
            failures += not ok
            out.write(text)
            out.write(f"{name}: {'match' if ok else 'MISMATCH'}\n")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("field and run configuration")
    g.add_argument("--q", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--modulus", help="c0,c1,...,ce (monic, lowest degree first)")
    g.add_argument("--budget", help="cap on estimated coefficient operations")
    g.add_argument("--jobs", type=int)
    g.add_argument("--cache-dir")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")

    parser = argparse.ArgumentParser(prog="exzeros", description="Exceptional zeros of characteristic-p L-series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bn", parents=[common], help="B_N(t, theta)")
    p.add_argument("--N", type=int)
    p.add_argument("--report", nargs="?", type=int, const=True, help="exceptional-zero report (optionally give N here)")
    p.add_argument("--swap", action="store_true", help="print B_N(theta, t)")
    p.set_defaults(func=cmd_bn)

    p = sub.add_parser("bs", parents=[common], help="the multivariable BB_s")
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_bs)

    p = sub.add_parser("bc", parents=[common], help="Bernoulli-Carlitz numbers")
    p.add_argument("--n", type=int)
    p.add_argument("--via-bn", action="store_true")
    p.add_argument("--N", type=int)
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_bc)

    p = sub.add_parser("powersum", parents=[common], help="S_d(N, k)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, nargs="*")
    p.add_argument("--method", choices=["brute", "comb", "both"], default="comb")
    p.set_defaults(func=cmd_powersum)

    p = sub.add_parser("lseries", parents=[common], help="truncated L-series and the Fitting identity")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--fitting", action="store_true")
    p.add_argument("--prec", type=int, default=8)
    p.set_defaults(func=cmd_lseries)

    p = sub.add_parser("delta", parents=[common], help="delta_N by layered summation")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--prec", type=int, default=20)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("verify", parents=[common], help="verification suites")
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--nmax", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--dmax", type=int)
    p.add_argument("--prec", type=int)
    p.add_argument("--theorem12", action="store_true")
    p.add_argument("--digit-principle", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="residues of B_N(theta, theta) modulo primes")
    p.add_argument("--N", type=int)
    p.add_argument("--drange")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reproduce-paper", parents=[common], help="compare with the shipped reference outputs")
    p.set_defaults(func=cmd_reproduce)
    return parser


def run(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ValueError, FieldError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""Command-line front end.

Every subcommand writes its artifacts into ``--out`` (default: the current
directory) and prints their paths. Exit status is 0 on success, 1 on a
numerical failure and 2 on invalid input.
"""

import argparse
import json
import os
import sys

import numpy as np

from ._errors import NumericalError, ValidationError
from ._validation import check_count, check_positive_sequence, check_precision_bits, check_time_grid, default_precision
from .diagnostics import py_sum
from .hankel import jacobi_from_moments
from .infinite import ZLatticeState, build_block, evolution_rhs_check, half_coefficients, truncated_block_spectrum, weyl_matrix
from .io import config_hash, load_measure, measure_to_dict, write_csv, write_json
from .jacobi import eigendecompose, finite_spectral_measure, truncate, weyl_cf
from .measure import evolve, moments, szego_integral, to_fraction
from .pipeline import SolveRequest, correspond, cross_validate, modified_solve, spectral_solve
from .szego import geronimus_map, map_to_circle, verblunsky

COMMANDS = ("solve", "solve-modified", "diagnose", "direct", "verblunsky", "infinite", "spectrum", "compare")


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse --{name} {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="vsl", description="Spectral solutions of Volterra lattices.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--precision", type=int, default=None, help="working precision in bits")
    common.add_argument("--seed", type=int, default=0, help="seed for random draws")

    def add(name, help_text, measure=True, times=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if measure:
            sp.add_argument("--measure", required=True, help="measure JSON file or preset name")
        if times:
            sp.add_argument("--t", default="0", help="comma-separated time grid")
        sp.add_argument("--n", type=int, default=16, help="number of coefficients")
        return sp

    add("solve", "lattice coefficients from a measure").add_argument("--exact", action="store_true")
    sm = add("solve-modified", "modified lattice by reduction and lift", measure=False)
    sm.add_argument("--measure", default=None, help="measure JSON file or preset name")
    sm.add_argument("--b0", type=float, default=1.0)
    sm.add_argument("--c0", default=None, help="initial c values instead of a measure (comma list)")
    add("diagnose", "finiteness diagnostics of a measure", times=False)
    d = add("direct", "finite spectral measure of a coefficient list, with the inverse round trip", measure=False, times=False)
    d.add_argument("--a", default=None, help="coefficients (comma list); random if omitted")
    v = add("verblunsky", "Verblunsky coefficients and the Geronimus cross-check", times=False)
    v.add_argument("--exact", action="store_true")
    inf = add("infinite", "Weyl matrix and evolution check of a doubly-infinite window", measure=False, times=False)
    inf.add_argument("--broken", action="store_true", help="set a_{-1} = 0")
    add("spectrum", "moments and section spectrum of the evolved measure")
    c = add("compare", "spectral route against the ODE route")
    c.add_argument("--window", type=int, default=24)
    c.add_argument("--step", type=float, default=1e-3)
    return p


def _measure_config(source):
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError:
                return source
    return source


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k != "out"}
    if getattr(args, "measure", None):
        cfg["measure"] = _measure_config(args.measure)
    return cfg


def _path(args, name):
    return os.path.join(args.out, name)


def _diag_payload(rep):
    if hasattr(rep, "regularized"):
        out = {
            "h0": rep.h0.verdict,
            "h0_partial": rep.h0.half.last,
            "regularized": rep.regularized.verdict,
            "trace_class": rep.perturbation.trace.verdict,
            "hilbert_schmidt": rep.perturbation.hilbert_schmidt.verdict,
            "marchenko": rep.marchenko.verdict,
            "szego_product": rep.product_verdict,
            "hs_lhs": rep.hs.lhs,
            "hs_rhs": rep.hs.rhs,
            "notes": rep.notes,
        }
        if rep.py is not None:
            out["py_sum"] = rep.py
        return out
    return {"h0": rep.verdict, "h0_partial": rep.half.last}


def cmd_solve(args, digest):
    m = load_measure(args.measure)
    res = spectral_solve(SolveRequest(m, check_time_grid(args.t), args.n, args.precision, exact=args.exact))
    rows = [(t, n, a) for t, co in zip(res.times, res.coefficients) for n, a in enumerate(co.a)]
    write_csv(_path(args, "lattice.csv"), ["t", "n", "a_n"], rows, digest)
    payload = {
        "precision_bits": res.precision if res.precision else "exact",
        "delcond": {str(t): {"verdict": d.verdict, "limit": d.limit} for t, d in zip(res.times, res.delcond)},
        "diagnostics": {str(t): _diag_payload(r) for t, r in res.diagnostics.items()},
    }
    write_json(_path(args, "diagnostics.json"), payload, digest)
    return ["lattice.csv", "diagnostics.json"]


def cmd_solve_modified(args, digest):
    times = check_time_grid(args.t)
    if args.c0:
        c0 = check_positive_sequence(_floats(args.c0, "c0"), "c0", min_length=2)
        dummy = load_measure("semicircle")
        res = modified_solve(SolveRequest(dummy, times, args.n, args.precision, "modified"), c0=c0)
    elif args.measure:
        m = load_measure(args.measure)
        ns = tuple(range(max(1, args.n // 2 - 3), args.n // 2 - 1)) if args.n >= 8 else None
        res = modified_solve(SolveRequest(m, times, args.n, args.precision, "modified"), b0=args.b0, xcond_ns=ns)
    else:
        raise ValidationError("solve-modified needs --measure or --c0")
    rows = [(t, n, c) for t, cs in zip(res.lifted.times, res.lifted.c) for n, c in enumerate(cs)]
    write_csv(_path(args, "modified.csv"), ["t", "n", "c_n"], rows, digest)
    files = ["modified.csv"]
    if res.xcond is not None:
        x = res.xcond
        rows = [(t, n, r, ra) for t, row, row_a in zip(x.times, x.ratio, x.ratio_a) for n, r, ra in zip(x.ns, row, row_a)]
        write_csv(_path(args, "xcond.csv"), ["t", "n", "x_delta", "x_a"], rows, digest)
        write_json(_path(args, "xcond.json"), {"verdict": x.verdict, "value": x.value, "identity_gap": x.identity_gap}, digest)
        files += ["xcond.csv", "xcond.json"]
    return files


def cmd_diagnose(args, digest):
    m = load_measure(args.measure)
    res = spectral_solve(SolveRequest(m, (0.0,), args.n, args.precision))
    payload = {"diagnostics": _diag_payload(res.diagnostics[0.0]), "delcond": res.delcond[0].verdict}
    if not m.unbounded and m.ac is not None:
        payload["szego_integral"] = float(szego_integral(m))
        payload["py_sum"] = py_sum(m.points, m.c)
    write_json(_path(args, "diagnostics.json"), payload, digest)
    return ["diagnostics.json"]


def cmd_direct(args, digest):
    if args.a:
        a = list(check_positive_sequence(_floats(args.a, "a"), "a"))
    else:
        rng = np.random.default_rng(args.seed)
        a = list(rng.uniform(0.5, 1.5, check_count(args.n, "n", 2) - 1))
    N = len(a) + 1
    prec = args.precision or default_precision()
    m = finite_spectral_measure(a, N, prec)
    back = jacobi_from_moments(moments(m, N - 1, prec=prec), N - 1, prec=prec)
    rows = [(n, x, float(y), abs(x - float(y))) for n, (x, y) in enumerate(zip(a, back.a))]
    write_csv(_path(args, "roundtrip.csv"), ["n", "a_n", "a_n_recovered", "abs_diff"], rows, digest)
    write_json(_path(args, "measure.json"), measure_to_dict(m), digest)
    rep = correspond(a)
    write_json(
        _path(args, "correspond.json"),
        {"szego_estimate": rep.szego, "outside": list(rep.outside), "py_sum": rep.py, "hs_lhs": rep.hs.lhs,
         "hs_rhs": rep.hs.rhs, "delcond": rep.delcond.verdict, "h0": rep.hamiltonian.verdict},
        digest,
    )
    return ["roundtrip.csv", "measure.json", "correspond.json"]


def cmd_verblunsky(args, digest):
    m = load_measure(args.measure)
    K = 2 * args.n + 2
    cm = map_to_circle(m, K, args.precision, exact=args.exact)
    v = verblunsky(cm, K)
    ger = geronimus_map(v, cm.scale)
    res = spectral_solve(SolveRequest(m, (0.0,), len(ger.a), args.precision, exact=args.exact))
    hank = res.coefficients[0].a
    write_csv(_path(args, "verblunsky.csv"), ["n", "alpha_n"], list(enumerate(v.alpha)), digest)
    rows = [(n, g, h, abs(float(g) - float(h))) for n, (g, h) in enumerate(zip(ger.a, hank))]
    write_csv(_path(args, "geronimus.csv"), ["n", "a_geronimus", "a_hankel", "abs_diff"], rows, digest)
    return ["verblunsky.csv", "geronimus.csv"]


def _random_window(seed, K, broken):
    rng = np.random.default_rng(seed)
    vals = {n: 1 + 0.5 * rng.uniform(-1, 1) * 0.85 ** abs(n) for n in range(-K - 1, K + 1)}
    if broken:
        vals[-1] = 0.0
    return ZLatticeState(tuple(vals[n] for n in range(-K - 1, K + 1)), K + 1)


def cmd_infinite(args, digest):
    K = check_count(args.n, "n", 2)
    s = _random_window(args.seed, K, args.broken)
    plus, minus = half_coefficients(s)
    rng = np.random.default_rng(args.seed + 1)
    rows = []
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.1, 2))
        mp_ = weyl_cf(plus, z, len(plus) + 1, tail="free").value
        mm = weyl_cf(minus, z, len(minus) + 1, tail="free").value
        w = weyl_matrix(mp_, mm, s[-1], z)
        rows.append((z.real, z.imag, w.m00.real, w.m00.imag, w.m01.real, w.m01.imag, w.m11.real, w.m11.imag, w.detm_residual))
    cols = ["re_z", "im_z", "re_m00", "im_m00", "re_m01", "im_m01", "re_m11", "im_m11", "detm_residual"]
    write_csv(_path(args, "weyl.csv"), cols, rows, digest)
    sp = truncated_block_spectrum(build_block(s))
    payload = {"K": K, "broken": args.broken, "max_offdiag_weight": max(abs(W[0, 1]) for W in sp.weights)}
    if not args.broken:
        chk = evolution_rhs_check(s, K=K)
        payload.update(evolution_residual=chk.residual, evolution_residual_product=chk.residual_product,
                       compared=chk.compared, excluded=chk.excluded)
    write_json(_path(args, "infinite.json"), payload, digest)
    return ["weyl.csv", "infinite.json"]


def cmd_spectrum(args, digest):
    m = load_measure(args.measure)
    prec = args.precision or default_precision()
    times = check_time_grid(args.t)
    mrows, srows = [], []
    res = spectral_solve(SolveRequest(m, times, args.n, args.precision))
    for t, co in zip(times, res.coefficients):
        s = moments(evolve(m, to_fraction(t)), args.n, prec=prec)
        mrows += [(t, k, v) for k, v in enumerate(s.values)]
        sp = eigendecompose(truncate(co.a, len(co.a) + 1))
        srows += [(t, lam, w) for lam, w in zip(sp.eigenvalues, sp.weights)]
    write_csv(_path(args, "moments.csv"), ["t", "k", "s_k"], mrows, digest)
    write_csv(_path(args, "spectrum.csv"), ["t", "lambda", "weight"], srows, digest)
    return ["moments.csv", "spectrum.csv"]


def cmd_compare(args, digest):
    m = load_measure(args.measure)
    cv = cross_validate(SolveRequest(m, check_time_grid(args.t), args.n, args.precision), args.window, args.step)
    rows = [
        (t, n, x, y, abs(x - y), md)
        for t, sa, oa, md in zip(cv.times, cv.spectral, cv.ode, cv.max_diff)
        for n, (x, y) in enumerate(zip(sa, oa))
    ]
    write_csv(_path(args, "crossval.csv"), ["t", "n", "a_spectral", "a_ode", "abs_diff", "max_diff"], rows, digest)
    return ["crossval.csv"]


HANDLERS = {
    "solve": cmd_solve,
    "solve-modified": cmd_solve_modified,
    "diagnose": cmd_diagnose,
    "direct": cmd_direct,
    "verblunsky": cmd_verblunsky,
    "infinite": cmd_infinite,
    "spectrum": cmd_spectrum,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.precision is not None:
            args.precision = check_precision_bits(args.precision)
        else:
            args.precision = default_precision()
        check_count(args.n, "n")
        digest = config_hash(_config(args))
        files = HANDLERS[args.command](args, digest)
    except ValidationError as exc:
        print(f"vsl: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"vsl: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(_path(args, f))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``geolink <subcommand> [flags]``.

Exit codes: 0 on success, 2 on usage errors (argparse), 1 on domain errors
with a JSON object {"error", "message"} on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction

from . import bqf, completion, cycles, gamma15, linking
from .exact import format_rat, parse_mat2, parse_rat, parse_symt

_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_NUMLIST = re.compile(r"^-[\d/.]")


class DomainError(Exception):
    pass


# ------------------------------------------------------------ argument types


def _arg(fn, what):
    def conv(s):
        try:
            return fn(s)
        except (ValueError, ZeroDivisionError, TypeError, IndexError) as e:
            raise argparse.ArgumentTypeError(f"malformed {what} {s!r}: {e}") from None
    conv.__name__ = what
    return conv


form_arg = _arg(bqf.parse_form, "form")
symt_arg = _arg(parse_symt, "SymT")
mat_arg = _arg(parse_mat2, "matrix")
rat_arg = _arg(parse_rat, "rational")


def _cycle_name(s: str):
    key = s.strip().translate(_SUBSCRIPTS).lower().replace("'", "").replace("′", "")
    if key in linking.TRIPLE_FORMS:
        return linking.TRIPLE_FORMS[key]
    return bqf.parse_form(s)


def _cycles(s: str):
    forms = [_cycle_name(p) for p in s.split(";") if p.strip()]
    if not forms:
        raise ValueError("no cycles given")
    return forms


cycles_arg = _arg(_cycles, "cycle list")


def _shift(s: str):
    parts = [p for p in s.split(";")]
    if len(parts) != 2:
        raise ValueError("expected 'x1,y1;x2,y2'")
    out = []
    for p in parts:
        xy = [parse_rat(x) for x in p.split(",")]
        if len(xy) != 2:
            raise ValueError("each shift needs two entries")
        out.append(tuple(xy))
    return tuple(out)


shift_arg = _arg(_shift, "shift")


def _v(s: str):
    t = parse_symt(s)
    return [[float(t.t1), float(t.t0)], [float(t.t0), float(t.t2)]]


v_arg = _arg(_v, "matrix v")


def _pair(s: str):
    a, b = (float(x) for x in s.split(","))
    return a, b


pair_arg = _arg(_pair, "pair")


# ------------------------------------------------------------ output


class Out:
    def __init__(self, mode: str, stream=None):
        self.mode = mode
        self.stream = stream or sys.stdout

    def json(self, obj):
        print(json.dumps(obj), file=self.stream)

    def rows(self, header, rows, records=None):
        """Emit a table: JSON lines of ``records`` (or dicts built from header),
        CSV, or aligned text."""
        if self.mode == "json":
            for i, r in enumerate(rows):
                self.json(records[i] if records else dict(zip(header, r)))
        elif self.mode == "csv":
            w = csv.writer(self.stream, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        else:
            cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
            widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
            for j, r in enumerate(cells):
                print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=self.stream)
                if j == 0:
                    print("  ".join("-" * w for w in widths), file=self.stream)

    def record(self, obj: dict):
        if self.mode == "json":
            self.json(obj)
        elif self.mode == "csv":
            self.rows(list(obj), [[_flat(v) for v in obj.values()]])
        else:
            for k, v in obj.items():
                print(f"{k}: {_flat(v)}", file=self.stream)


def _flat(v):
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(str(x) for x in v) + ")"
    return v


# ------------------------------------------------------------ subcommands


def cmd_classgroup(a, out: Out):
    cl = bqf.primitive_classes(a.disc) if a.primitive else bqf.classes(a.disc)
    out.rows(["rep", "disc", "content"], [[str(c.rep), c.rep.disc, c.content] for c in cl],
             [c.to_json() for c in cl])


def cmd_reduce(a, out: Out):
    if a.form is not None:
        q = a.form
        if not q.is_posdef():
            raise DomainError(f"{q} is not positive definite")
        r, g = bqf.reduce_posdef(q)
        out.record({"form": str(q), "reduced": str(r), "matrix": str(g)})
    else:
        from .exact import reduce_sym
        if not a.T.is_posdef():
            raise DomainError(f"T = {a.T} is not positive definite")
        r, g, _ = reduce_sym(a.T)
        out.record({"T": str(a.T), "reduced": str(r), "matrix": str(g)})


def _segments(cyc):
    rows = []
    for f in cyc.forms:
        c = Fraction(-f.b, 2 * f.a)
        r2 = Fraction(f.disc, 4 * f.a * f.a)
        rp, rm = bqf.roots(f)
        rows.append([str(f), format_rat(c), format_rat(r2), float(rm), float(rp),
                     gamma15.arc_index(rm), gamma15.arc_index(rp)])
    return rows


def cmd_traverse(a, out: Out):
    cyc = gamma15.traverse(a.form)
    if out.mode == "csv":
        # one geodesic segment per row: the semicircle through F
        out.rows(["form", "centre", "radius2", "exit_root", "entry_root", "exit_side",
                  "entry_side"], _segments(cyc))
    elif out.mode == "json":
        out.json({**cyc.to_json(), "length": len(cyc)})
    else:
        print(f"disc {cyc.disc}  length {len(cyc)}  homology {tuple(cyc.homology)}",
              file=out.stream)
        for f in cyc.forms:
            print(f"  {f.pretty()}", file=out.stream)


def _cycle_set(a):
    return linking.CycleSet.of_forms(a.cycles)


def cmd_winding(a, out: Out):
    q = a.form
    if not q.is_definite():
        raise DomainError(f"{q} is not definite")
    if a.reduce:
        q, _ = gamma15.reduce_point_to_F(q)
    cs = _cycle_set(a)
    ws = [gamma15.winding(q, c) for c in cs.cycles]
    out.record({"point": str(q), "per_cycle": [format_rat(w) for w in ws],
                "total": format_rat(sum(ws, Fraction(0)))})


def _classes_for(T):
    return bqf.classes(cycles.t_form(T).disc)


def cmd_mcoeff(a, out: Out):
    T = a.T
    qs = [a.form] if a.form is not None else [C.rep for C in _classes_for(T)]
    out.rows(["form", "m"], [[str(q), cycles.m_coeff(T, q)] for q in qs],
             [{"T": str(T), "form": str(q), "m": cycles.m_coeff(T, q)} for q in qs])


def cmd_zerocycle(a, out: Out):
    zc = cycles.zero_cycle(a.T)
    if out.mode == "json":
        out.json({**zc.to_json(), "degree": zc.degree()})
    else:
        out.rows(["form", "sign", "weight"],
                 [[str(p.form), p.sign, p.weight] for p in zc.points])
        if out.mode == "text":
            print(f"degree {zc.degree()}", file=out.stream)


def cmd_link(a, out: Out):
    cs = _cycle_set(a)
    T = a.T
    by_class = {}
    for c in cs.cycles:
        for rep, m, ws in linking.winding_sums(T, c):
            by_class.setdefault(str(rep), (m, []))[1].append(ws)
    weighted = [sum((m * ws[i] for m, ws in by_class.values()), Fraction(0))
                for i in range(len(cs.cycles))]
    out.record({"T": str(T), "iota_prime": format_rat(linking.iota_prime(T, cs)),
                "classes": [{"form": k, "m": m, "winding_sums": [format_rat(x) for x in ws]}
                            for k, (m, ws) in by_class.items()],
                "per_cycle": [format_rat(x) for x in weighted],
                "homology": list(cs.homology)})


def cmd_linkfull(a, out: Out):
    cs = _cycle_set(a)
    T = a.T
    shifts = linking.theta_shifts(T)
    out.record({"T": str(T), "iota": format_rat(linking.iota_full(T, cs)),
                "shifts": [list(s) for s in shifts]})


def cmd_series(a, out: Out):
    cs = _cycle_set(a)
    tab = linking.series_table(a.max_det, cs, a.nonsquare, a.keep_zero, a.workers)
    rows = [[format_rat(r.T.t1), format_rat(r.T.t2), format_rat(r.T.t0), format_rat(r.value)]
            for r in tab.rows]
    out.rows(["t1", "t2", "t0", "iota"], rows, [r.to_json() for r in tab.rows])


def cmd_growth(a, out: Out):
    ratio, T = linking.growth_check(a.max_det, _cycle_set(a), a.nonsquare)
    out.record({"max_ratio": ratio, "argmax": str(T) if T is not None else None})


def cmd_wstar(a, out: Out):
    if not a.x2 > 0:
        raise DomainError("x2 must be positive")
    r = completion.w_star(a.x1, a.x2, a.tol)
    out.record({"x1": a.x1, "x2": a.x2, "value": r.value, "err": r.err,
                "bound": completion.w_star_bound(a.x1, a.x2)})


def cmd_k0(a, out: Out):
    if not a.x > 0:
        raise DomainError("x must be positive")
    r = completion.bessel_k0(a.x, a.tol)
    out.record({"x": a.x, "value": r.value, "err": r.err, "bound": completion.k0_bound(a.x)})


def _lattice(a):
    P = a.gram
    g = a.automorph if a.automorph is not None else completion.find_automorph(P)
    if a.shift is not None:
        return completion.Lattice11(P, g, a.shift)
    return completion.Lattice11(P, g)


def cmd_rho(a, out: Out):
    lat = _lattice(a)
    out.record({"T": str(a.T), "rho": completion.rho_indef(lat, a.T),
                "automorph": str(lat.automorph)})


def cmd_beta(a, out: Out):
    import numpy as np
    lat = _lattice(a)
    theta = a.theta

    def r_pos(T):
        return completion.theta_rep_count(theta, T)

    r = completion.beta_coeff(a.T, np.array(a.v), r_pos, lat, N=a.N, delta_max=a.delta_max,
                              factor=a.factor, coef_bound=a.coef_bound, tol=a.trunc_tol)
    out.record({"T": str(a.T), "value": r.value, "err": r.err, "tail_bound": r.tail_bound,
                "quad_err": r.quad_err, "terms": r.n_terms, "delta_max": r.delta_max,
                "coef_bound": list(r.coef_bound)})


def golden_checks():
    """(name, ok, detail) for the published tables."""
    from .exact import SymT
    res = []
    T = SymT(2, Fraction(1, 2), 3)
    reps = [str(C.rep) for C in bqf.classes(-23)]
    res.append(("classgroup -23", reps == ["1,1,6", "2,-1,3", "2,1,3"], reps))
    cyc = [gamma15.traverse(q) for q in linking.TRIPLE_FORMS.values()]
    got = [(len(c), tuple(c.homology)) for c in cyc]
    res.append(("traverse table", got == [(5, (3, 2, 0)), (4, (2, -1, -1)), (9, (-5, -1, 1))],
                got))
    c2 = cyc[1]
    w = (gamma15.winding(bqf.BQF(2, -1, 1), c2), gamma15.winding(bqf.BQF(6, -1, 1), c2))
    res.append(("winding", w == (1, 2), [str(x) for x in w]))
    ms = [cycles.m_coeff(T, q) for q in (bqf.BQF(1, -1, 6), bqf.BQF(2, -1, 3), bqf.BQF(3, -1, 2))]
    res.append(("m(T, q)", ms == [0, 0, 2], ms))
    cs = linking.bounding_triple()
    io = (linking.iota_prime(T, cs), linking.iota_full(T, cs))
    res.append(("iota", io == (8, 8), [str(x) for x in io]))
    vals = [int(v) for v in linking.series_table(15, linking.CycleSet.named(["c3"])).values()]
    res.append(("series table", vals == [8, 24, 16, 2, -4, -4, 8, 4, -32], vals))
    return res


def cmd_selftest(a, out: Out):
    res = golden_checks()
    out.rows(["check", "status", "detail"],
             [[n, "PASS" if ok else "FAIL", json.dumps(d)] for n, ok, d in res],
             [{"check": n, "ok": ok, "detail": d} for n, ok, d in res])
    if not all(ok for _, ok, _ in res):
        raise DomainError("selftest mismatch")


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    m = common.add_mutually_exclusive_group()
    m.add_argument("--json", dest="mode", action="store_const", const="json")
    m.add_argument("--csv", dest="mode", action="store_const", const="csv")
    m.add_argument("--text", dest="mode", action="store_const", const="text")
    m.set_defaults(mode="text")

    p = argparse.ArgumentParser(prog="geolink", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help):
        s = sub.add_parser(name, parents=[common], help=help)
        s.set_defaults(fn=fn)
        return s

    s = add("classgroup", cmd_classgroup, "form classes of a negative discriminant")
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--primitive", action="store_true", help="primitive classes only")

    s = add("reduce", cmd_reduce, "reduce a positive definite form or SymT")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--form", type=form_arg)
    g.add_argument("--T", type=symt_arg)

    s = add("traverse", cmd_traverse, "closed geodesic of an indefinite form")
    s.add_argument("--form", type=form_arg, required=True)

    s = add("winding", cmd_winding, "winding number of a CM point around cycles")
    s.add_argument("--form", type=form_arg, required=True, help="definite form with root in F")
    s.add_argument("--cycles", type=cycles_arg, required=True)
    s.add_argument("--reduce", action="store_true", help="move the root into F first")

    s = add("mcoeff", cmd_mcoeff, "multiplicities m(T, q)")
    s.add_argument("--T", type=symt_arg, required=True)
    s.add_argument("--form", type=form_arg)

    s = add("zerocycle", cmd_zerocycle, "weighted CM zero-cycle of T")
    s.add_argument("--T", type=symt_arg, required=True)

    for name, fn in (("link", cmd_link), ("linkfull", cmd_linkfull)):
        s = add(name, fn, "linking coefficient" + (" with theta shifts" if fn is cmd_linkfull
                                                   else ""))
        s.add_argument("--T", type=symt_arg, required=True)
        s.add_argument("--cycles", type=cycles_arg, default=_cycles("c1;c2;c3"))

    for name, fn in (("series", cmd_series), ("growth", cmd_growth)):
        s = add(name, fn, "coefficient table" if name == "series" else "growth ratio")
        s.add_argument("--max-det", type=rat_arg, required=True)
        s.add_argument("--cycles", type=cycles_arg, default=_cycles("c1;c2;c3"))
        s.add_argument("--nonsquare", action="store_true")
        if name == "series":
            s.add_argument("--keep-zero", action="store_true")
            s.add_argument("--workers", type=int, default=None)

    s = add("wstar", cmd_wstar, "the W* function")
    s.add_argument("--x1", type=float, required=True)
    s.add_argument("--x2", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-10)

    s = add("k0", cmd_k0, "modified Bessel K0")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-12)

    for name, fn in (("rho", cmd_rho), ("beta", cmd_beta)):
        s = add(name, fn, "indefinite representation number" if name == "rho"
                else "beta coefficient")
        s.add_argument("--gram", type=symt_arg, required=True)
        s.add_argument("--automorph", type=mat_arg, default=None)
        s.add_argument("--shift", type=shift_arg, default=None, help="'x1,y1;x2,y2'")
        s.add_argument("--T", type=symt_arg, required=True)
        if name == "beta":
            s.add_argument("--v", type=v_arg, required=True, help="'v11,v12,v22'")
            s.add_argument("--theta", type=symt_arg, required=True,
                           help="positive definite Gram matrix counting T''")
            s.add_argument("--N", type=int, default=1)
            s.add_argument("--trunc-tol", type=float, default=1e-8)
            s.add_argument("--delta-max", type=float, default=None)
            s.add_argument("--factor", type=float, default=1.0)
            s.add_argument("--coef-bound", type=pair_arg, default=None, help="'C,k'")

    add("selftest", cmd_selftest, "golden table checks")
    return p


def _join_negative_values(argv):
    # let "--form -3,-11,9" through: argparse would read the value as a flag
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NUMLIST.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    out = Out(a.mode, stdout)
    try:
        a.fn(a, out)
    except (DomainError, bqf.FormError, gamma15.CuspError, completion.LatticeError,
            ValueError, RuntimeError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

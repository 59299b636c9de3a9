"""Command-line front end: ``focusjet <group> <command> [files] [flags]``.

Reports go to stdout as jet text blocks or tab separated tables with a
``#`` header.  Failures print one line ``ERR <code>: <message>`` on stderr
and exit with 2 (contract), 3 (I/O) or 4 (parse).
"""

import argparse
import os
import sys

import numpy as np

from . import acceptance, fibrlab, geomlin, germs, io, moduli
from .config import DEFAULT_ORDER, TOL_ENV
from .errors import ContractError, FocusJetError, ParseError
from .jetcalc import compose, invert

EXIT_OK, EXIT_CONTRACT, EXIT_IO, EXIT_PARSE = 0, 2, 3, 4


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _g(x):
    return f"{float(x):.12g}"


def _truncate(jet, args):
    if args.order is None:
        return jet
    if args.order > jet.order:
        raise ContractError(f"--order {args.order} exceeds the file's order {jet.order}")
    return jet.truncate(args.order)


def _load_jet(path, args):
    return _truncate(io.parse_jet(_read(path)), args)


def _load_tuple(path, args):
    return moduli.GluingTuple(tuple(_truncate(j, args) for j in io.parse_tuple(_read(path))))


# -- jet ----------------------------------------------------------------------------


def cmd_jet(args, out):
    f = _load_jet(args.files[0], args)
    if args.op == "compose":
        _need(args, 2)
        res = compose(f, _load_jet(args.files[1], args))
    elif args.op == "invert":
        res = invert(f)
    else:
        res = f.conj()
    out.write(io.format_jet(res))


# -- germ ---------------------------------------------------------------------------


def _format_jet4(name, jet):
    lines = [f"{name} order {jet.order}"]
    for key in sorted(jet.coeffs):
        c = jet.coeffs[key]
        lines.append(" ".join(map(str, key)) + f" {c.real:.17g} {c.imag:.17g}")
    return "\n".join(lines) + "\n"


def cmd_germ(args, out):
    psi = _load_jet(args.files[0], args)
    if args.op == "liftable":
        cls = germs.classify_liftable(psi)
        out.write(cls.kind.value + ("\t# also divisible by zbar" if cls.ambiguous else "") + "\n")
        return
    lift = germs.lift_to_model(psi)
    out.write("# Psi_1 * Psi_2 = psi(uv, ubar vbar); keys a b c d mean u^a ubar^b v^c vbar^d\n")
    out.write(f"# residual {germs.verify_lift(psi, lift):.3e}\n")
    out.write(_format_jet4("Psi1", lift[0]))
    out.write(_format_jet4("Psi2", lift[1]))


# -- orbit --------------------------------------------------------------------------


def cmd_orbit(args, out):
    op = args.op
    if op == "act":
        _need(args, 2)
        eta = moduli.GaugeTuple(tuple(_truncate(j, args) for j in io.parse_gauge(_read(args.files[0]))))
        phi = _load_tuple(args.files[1], args)
        out.write(io.format_tuple(list(moduli.gauge_act(eta, phi).maps)))
    elif op == "invariants":
        phi = _load_tuple(args.files[0], args)
        inv = moduli.first_order_invariants(phi)
        can = moduli.canonicalize_invariant(inv)
        out.write("# first order invariants mu_i = b_i / conj(a_i); canonical modulo a common "
                  "unit factor and conjugation\n")
        out.write("i\tre\tim\tabs\traw_re\traw_im\n")
        for i, (m, r) in enumerate(zip(can.mus, inv.mus), start=2):
            out.write(f"{i}\t{_g(m.real)}\t{_g(m.imag)}\t{_g(abs(m))}\t{_g(r.real)}\t{_g(r.imag)}\n")
    elif op == "normalize":
        phi = _load_jet(args.files[0], args)
        res = moduli.normalize_double_pinched(phi)
        out.write(f"# psi1 o phi o psi2^-1 = z + mu zbar\n# mu {res.mu:.17g}\n"
                  f"# residual {res.residual:.3e}\n")
        out.write(io.format_gauge([res.psi1, res.psi2]))
    elif op == "equiv":
        _need(args, 2)
        res = moduli.equivalent_double_pinched(_load_jet(args.files[0], args),
                                               _load_jet(args.files[1], args))
        out.write("status\tmu\tmu_other\tresidual\n")
        resid = "nan" if res.residual is None else f"{res.residual:.3e}"
        out.write(f"{res.status.value}\t{_g(res.mu)}\t{_g(res.mu_other)}\t{resid}\n")
        if res.witness is not None:
            out.write("# witness (chi1, chi2) with chi1 o phi o chi2^-1 = phi_other\n")
            out.write(io.format_gauge(list(res.witness.psis)))
    else:  # rank
        if args.files:
            rows = [moduli.orbit_tangent_rank(_load_tuple(args.files[0], args))]
        else:
            rng = np.random.default_rng(args.seed)
            top = args.order or 8
            rows = [moduli.orbit_tangent_rank(moduli.generic_linear_tuple(n, k, rng))
                    for n in args.n for k in range(1, top + 1)]
        out.write("# orbit dimension = numerical rank of the orbit map differential; "
                  "stab = dim(group) - orbit; codim = dim(jets) - orbit\n")
        out.write("n\tk\torbit\tstab\tcodim\tstab_formula\tcodim_formula\tgap\n")
        for r in rows:
            out.write(f"{r.n}\t{r.order}\t{r.orbit_dim}\t{r.stab_dim}\t{r.codim}\t"
                      f"{moduli.stabilizer_formula(r.n, r.order)}\t"
                      f"{moduli.codim_formula(r.n, r.order)}\t{r.gap:.3e}\n")


# -- geom ---------------------------------------------------------------------------


def cmd_geom(args, out):
    if args.op == "trace":
        J2 = geomlin.j_from_gluing(_load_jet(args.files[0], args))
        J1 = geomlin.j_from_gluing(_load_jet(args.files[1], args)) if len(args.files) > 1 \
            else geomlin.STANDARD
        t = geomlin.trace_invariant(J1, J2)
        out.write("# trace = tr(J2 J1^-1) = 2(1 + mu^2) / (1 - mu^2)\n")
        out.write(f"trace\tmu\n{_g(t)}\t{_g(geomlin.mu_from_trace(t))}\n")
    elif args.op == "hessian-j":
        H = io.parse_hessian(_read(args.files[0]))
        J, _ = geomlin.hessian_to_j(H, seed=args.seed)
        out.write("# complex structure J (sign: J[1,0] > 0); -J is the other solution\n")
        for row in J.J:
            out.write("\t".join(_g(x) for x in row) + "\n")
    else:  # eigen-mu
        _need(args, 2)
        l1, li = io.parse_complex(args.files[0]), io.parse_complex(args.files[1])
        mu = geomlin.eigen_mu(l1, li)
        out.write("# mu_i = (lambda_i - lambda_1) / (lambda_i + conj(lambda_1))\n")
        out.write(f"mu\tabs\n{io.format_complex(mu)}\t{_g(abs(mu))}\n")


# -- lab ----------------------------------------------------------------------------


def _profile_table(rows):
    lines = ["# circle factor suppressed: invariants are constant along the critical circle",
             "# trace = tr(J2 J1^-1) at the two focus points; mu = sqrt((trace-2)/(trace+2));"
             " critical_value = (F_t(P), t)",
             "t\ttrace\tmu\tstatus\tcritical_value"]
    for r in rows:
        cv = ",".join(_g(x) for x in r.critical_value) if r.critical_value else "nan"
        lines.append(f"{_g(r.t)}\t{_g(r.trace)}\t{_g(r.mu)}\t{r.status}\t{cv}")
    return "\n".join(lines) + "\n"


def _parse_profile(text):
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#") or line.startswith("t\t"):
            continue
        tok = line.split("\t")
        if len(tok) < 4:
            raise ParseError(f"bad profile row {line!r}")
        try:
            rows.append(fibrlab.ProfileRow(float(tok[0]), float(tok[1]), float(tok[2]), tok[3]))
        except ValueError:
            raise ParseError(f"bad profile row {line!r}") from None
    return rows


def cmd_lab(args, out):
    text = _read(args.files[0])
    if args.op == "profile":
        rows = fibrlab.mu_profile(io.parse_family(text), args.samples, route=args.route,
                                  seed=args.seed)
        out.write(_profile_table(rows))
        return
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if body and body[0].split()[0] == "family":
        rows = fibrlab.mu_profile(io.parse_family(text), args.samples, route=args.route,
                                  seed=args.seed)
    else:
        rows = _parse_profile(text)
    out.write("\n".join(fibrlab.product_obstruction_report(rows).lines()) + "\n")


def cmd_selftest(args, out):
    results = []
    for num in args.criteria or range(1, len(acceptance.CRITERIA) + 1):
        r = acceptance.run_criterion(num, seed=args.seed)
        out.write(r.line() + "\n")
        out.flush()
        results.append(r)
    return EXIT_OK if all(r.passed for r in results) else 1


# -- argument parsing ---------------------------------------------------------------

GROUPS = {
    "jet": (("compose", "invert", "conj"), cmd_jet),
    "germ": (("liftable", "lift"), cmd_germ),
    "orbit": (("act", "invariants", "normalize", "equiv", "rank"), cmd_orbit),
    "geom": (("trace", "hessian-j", "eigen-mu"), cmd_geom),
    "lab": (("profile", "obstruction"), cmd_lab),
}

MIN_FILES = {"rank": 0}


def _need(args, n):
    if len(args.files) < n:
        raise ContractError(f"'{args.group} {args.op}' needs {n} inputs")


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    p.add_argument("--order", type=int, default=None,
                   help="truncate inputs to this order; for 'orbit rank' the top order "
                        f"(default: file order, or 8; jets default to {DEFAULT_ORDER})")
    p.add_argument("--tol", type=float, default=None,
                   help=f"coefficient tolerance, overrides ${TOL_ENV} (default 1e-9)")
    p.add_argument("--samples", type=int, default=11, help="samples for lab commands (default 11)")


def build_parser():
    parser = argparse.ArgumentParser(prog="focusjet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)
    for group, (ops, _) in GROUPS.items():
        gp = sub.add_parser(group)
        gsub = gp.add_subparsers(dest="op", required=True)
        for op in ops:
            p = gsub.add_parser(op)
            p.add_argument("files", nargs="*", help="input files ('-' for stdin) or literals")
            _common(p)
            if op == "rank":
                p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4],
                               help="numbers of focus points (default 2 3 4)")
            if group == "lab":
                p.add_argument("--route", choices=("slice", "suspended"), default="slice",
                               help="Hessians from F_t (slice) or from (F_t, t) (suspended)")
    st = sub.add_parser("selftest")
    st.add_argument("criteria", type=int, nargs="*", help="criterion numbers (default all)")
    _common(st)
    return parser


def run(argv, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    saved = os.environ.get(TOL_ENV)
    try:
        if args.tol is not None:
            if not args.tol > 0:
                raise ContractError("--tol must be positive")
            os.environ[TOL_ENV] = repr(args.tol)
        if args.group == "selftest":
            return cmd_selftest(args, out)
        if len(args.files) < MIN_FILES.get(args.op, 1):
            raise ContractError(f"'{args.group} {args.op}' needs an input")
        GROUPS[args.group][1](args, out)
        return EXIT_OK
    except FocusJetError as exc:
        print(f"ERR {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"ERR io: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"ERR contract: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    finally:
        if saved is None:
            os.environ.pop(TOL_ENV, None)
        else:
            os.environ[TOL_ENV] = saved


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()

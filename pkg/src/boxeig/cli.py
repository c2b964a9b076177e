"""Command-line interface: solve, scan, split, plotdata, oracle.

All energies cross the CLI boundary as decimal strings; binary floats never
carry results.  A flat ``key = value`` config file (INI sections) can supply
any option; explicit flags win.  Exit codes: 0 success, 2 bad configuration,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .eigensolver import (Bracket, ConvergenceError, EigenvalueRecord, bisect,
                          converge_in_terms, scan, solve_spectrum, splitting,
                          suggest_terms)
from .numerics import make_context, render, rational_from_text, to_real, \
    working_context
from .oracle import MorseParams, fd_eigenvalues, morse_exact_energy, \
    square_well_energy
from .potential import (Potential, PotentialSyntaxError, anharmonic,
                        morse_series, parse_potential, render_potential)
from .series import boundary_value, series_coefficients, evaluate_series, \
    wavefunction_samples

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOCONV = 3


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    potential: Potential
    L: str
    kind: str               # even | odd | determinant | auto
    digits: int
    terms: int | None       # None = auto
    scan_range: tuple | None
    count: int
    output: str             # csv | jsonl


def _load_config_file(path: str) -> dict:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are option names; keep their case (e.g. L)
    read = cp.read(path)
    if not read:
        raise ConfigError("cannot read config file %r" % path)
    merged: dict = {}
    for section in cp.sections():
        merged.update(dict(cp.items(section)))
    merged.update(dict(cp.items(cp.default_section)))
    return merged


def _opt(args, cfg: dict, name: str, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    if name in cfg:
        return cfg[name]
    return default


def _build_potential(args, cfg) -> Potential:
    expr = _opt(args, cfg, "potential")
    family = _opt(args, cfg, "family")
    if expr is not None and family is not None:
        raise ConfigError("give either a potential expression or a family, not both")
    if expr is not None:
        return parse_potential(str(expr))
    if family is None:
        raise ConfigError("no potential given (use --potential or --family)")
    family = str(family).lower()
    if family == "anharmonic":
        mu2 = rational_from_text(str(_opt(args, cfg, "mu2", "1")))
        g = rational_from_text(str(_opt(args, cfg, "g", "1")))
        k = int(_opt(args, cfg, "k", 2))
        return anharmonic(mu2, g, k)
    if family == "morse":
        V0 = rational_from_text(str(_opt(args, cfg, "V0", "400")))
        lam = rational_from_text(str(_opt(args, cfg, "lam", "1")))
        J = int(_opt(args, cfg, "J", 30))
        return morse_series(V0, lam, J)
    raise ConfigError("unknown family %r" % family)


def _parse_range(text) -> tuple:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError("range must be lo:hi:step")
    return tuple(parts)


def _job_config(args, cfg) -> JobConfig:
    P = _build_potential(args, cfg)
    L = _opt(args, cfg, "L")
    if L is None:
        raise ConfigError("missing wall position --L")
    digits = int(_opt(args, cfg, "digits", 15))
    if digits < 1:
        raise ConfigError("digits must be >= 1")
    terms_raw = _opt(args, cfg, "terms", "auto")
    terms = None if str(terms_raw) == "auto" else int(terms_raw)
    if terms is not None and terms < 1:
        raise ConfigError("terms must be >= 1 or 'auto'")
    kind = str(_opt(args, cfg, "kind", "auto")).lower()
    if kind == "det":
        kind = "determinant"
    if kind not in ("auto", "even", "odd", "determinant"):
        raise ConfigError("kind must be auto|even|odd|determinant")
    if kind in ("even", "odd") and not P.symmetric:
        raise ConfigError("parity kinds require a symmetric potential")
    rng = _opt(args, cfg, "range")
    scan_range = _parse_range(rng) if rng is not None else None
    count = int(_opt(args, cfg, "count", 1))
    if count < 1:
        raise ConfigError("count must be >= 1")
    output = str(_opt(args, cfg, "output", "jsonl")).lower()
    if output not in ("csv", "jsonl"):
        raise ConfigError("output must be csv or jsonl")
    return JobConfig(P, str(L), kind, digits, terms, scan_range, count, output)


def _open_out(args):
    path = getattr(args, "out", None)
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


def _emit_records(records, job, fh):
    if job.output == "jsonl":
        for r in records:
            fh.write(json.dumps(r.as_dict()) + "\n")
    else:
        fh.write("energy,kind,index,terms,L,digits,working_digits,"
                 "stable_digits,cancellation_digits,converged\n")
        for r in records:
            d = r.as_dict()
            fh.write("%s,%s,%d,%d,%s,%d,%d,%d,%d,%s\n" % (
                d["energy"], d["kind"], d["index"], d["terms"], d["L"],
                d["digits"], d["working_digits"], d["stable_digits"],
                d["cancellation_digits"], str(d["converged"]).lower()))


def cmd_solve(args, cfg) -> int:
    job = _job_config(args, cfg)
    ctx = make_context(job.digits)
    e_range = None
    if job.scan_range is not None:
        e_range = (job.scan_range[0], job.scan_range[1])
    if job.kind in ("auto",):
        records = solve_spectrum(job.potential, job.L, job.count, ctx,
                                 terms=job.terms, e_range=e_range)
    else:
        # single-kind solve: scan then converge per bracket
        scan_ctx = make_context(30)
        if job.scan_range is not None:
            lo, hi, step = job.scan_range
        else:
            est = fd_eigenvalues(job.potential, float(mpfr(job.L)), 4000,
                                 job.count + 2)
            spread = max(est[-1] - est[0], 1.0)
            lo = est[0] - 0.25 * spread - 0.5
            hi = est[-1] + 0.3 * spread + 0.5
            step = (hi - lo) / 200
        scan_terms = job.terms or suggest_terms(
            job.potential, job.L, max(abs(float(mpfr(lo))), abs(float(mpfr(hi)))),
            parity_split=(job.kind != "determinant"))
        brackets = scan(job.potential, job.kind, job.L, scan_terms,
                        lo, hi, step, scan_ctx)
        records = []
        for i, br in enumerate(brackets[: job.count]):
            if job.terms is None:
                records.append(converge_in_terms(job.potential, job.kind,
                                                 job.L, br, ctx, index=i))
            else:
                records.append(bisect(job.potential, br, job.L, job.terms,
                                      ctx, index=i))
        if len(records) < job.count:
            raise ConvergenceError("only %d of %d requested roots found"
                                   % (len(records), job.count))
    fh, close = _open_out(args)
    try:
        _emit_records(records, job, fh)
    finally:
        if close:
            fh.close()
    if job.terms is None and not all(r.converged for r in records):
        return EXIT_NOCONV
    return EXIT_OK


def cmd_scan(args, cfg) -> int:
    job = _job_config(args, cfg)
    if job.scan_range is None:
        raise ConfigError("scan requires --range lo:hi:step")
    kind = job.kind
    if kind == "auto":
        kind = "even" if job.potential.symmetric else "determinant"
    lo, hi, step = job.scan_range
    ctx = make_context(job.digits)
    terms = job.terms or suggest_terms(
        job.potential, job.L,
        max(abs(float(mpfr(lo))), abs(float(mpfr(hi))), 1.0),
        parity_split=(kind != "determinant"))
    # grid values for plotting, then detected brackets
    fh, close = _open_out(args)
    try:
        rows = []
        with working_context(ctx):
            e = to_real(lo, ctx)
            hi_r = to_real(hi, ctx)
            step_r = to_real(step, ctx)
            while e <= hi_r:
                be = boundary_value(job.potential, e, job.L, terms, kind, ctx)
                rows.append((render(e, 12), render(be.value, 8)))
                e = e + step_r
        brackets = scan(job.potential, kind, job.L, terms, lo, hi, step,
                        make_context(max(30, job.digits)))
        if job.output == "jsonl":
            for E, v in rows:
                fh.write(json.dumps({"E": E, "value": v}) + "\n")
            for br in brackets:
                fh.write(json.dumps({
                    "bracket": [render(br.e_lo, 12), render(br.e_hi, 12)],
                    "kind": br.kind}) + "\n")
        else:
            fh.write("E,value\n")
            for E, v in rows:
                fh.write("%s,%s\n" % (E, v))
            for br in brackets:
                fh.write("# bracket,%s,%s,%s\n"
                         % (render(br.e_lo, 12), render(br.e_hi, 12), br.kind))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_split(args, cfg) -> int:
    mu2_raw = _opt(args, cfg, "mu2")
    if mu2_raw is None:
        raise ConfigError("split requires --mu2 (comma-separated list allowed)")
    mu2_list = [rational_from_text(p) for p in str(mu2_raw).split(",")]
    L = _opt(args, cfg, "L")
    if L is None:
        raise ConfigError("missing wall position --L")
    digits = int(_opt(args, cfg, "digits", 30))
    output = str(_opt(args, cfg, "output", "jsonl")).lower()
    fh, close = _open_out(args)
    try:
        if output == "csv":
            fh.write("mu2,agree_digits,delta,e_plus,e_minus\n")
        for mu2 in mu2_list:
            if mu2 <= 0:
                raise ConfigError("mu2 must be > 0 for a double well")
            P = anharmonic(-mu2, 1, 2)
            rep = splitting(P, str(L), make_context(digits))
            if output == "jsonl":
                d = rep.as_dict()
                d["mu2"] = str(mu2)
                fh.write(json.dumps(d) + "\n")
            else:
                fh.write("%s,%d,%s,%s,%s\n" % (
                    mu2, rep.agree_digits, rep.delta,
                    rep.e_plus.energy, rep.e_minus.energy))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _det_seed(P, E, L, terms, ctx):
    """Null-vector seed (a0, a1) of the wall determinant at eigenvalue E."""
    f0 = series_coefficients(P, E, 1, 0, terms, ctx)
    f1 = series_coefficients(P, E, 0, 1, terms, ctx)
    with working_context(ctx):
        Lr = to_real(L, ctx)
        f0p, _ = evaluate_series(f0, Lr, ctx)
        f1p, _ = evaluate_series(f1, Lr, ctx)
    return (f1p, -f0p)


def _write_samples(path, P, E, L, terms, seed, npoints, ctx, digits):
    rows = wavefunction_samples(P, E, L, terms, seed, npoints, ctx)
    with open(path, "w") as fh:
        fh.write("# potential=%s, L=%s, terms=%d, digits=%d\n"
                 % (render_potential(P), L, terms, digits))
        fh.write("x,psi\n")
        for x, psi in rows:
            fh.write("%s,%s\n" % (render(x, 12), render(psi, 12)))


def _lowest_pair(P, L, ctx):
    """Converged (ground, first-excited) records for a symmetric potential."""
    recs = solve_spectrum(P, L, 2, ctx)
    return recs[0], recs[1]


def cmd_plotdata(args, cfg) -> int:
    recipe = _opt(args, cfg, "recipe")
    outdir = str(_opt(args, cfg, "outdir", "."))
    npoints = int(_opt(args, cfg, "npoints", 201))
    import os

    os.makedirs(outdir, exist_ok=True)
    written = []
    if recipe is None:
        # custom wavefunction dump at a user-supplied energy
        job = _job_config(args, cfg)
        energy = _opt(args, cfg, "energy")
        if energy is None:
            raise ConfigError("custom plotdata needs --energy (or a figure recipe)")
        ctx = make_context(job.digits)
        terms = job.terms or suggest_terms(job.potential, job.L,
                                           abs(float(mpfr(str(energy)))))
        seed_raw = _opt(args, cfg, "seed")
        if seed_raw is not None:
            a0, a1 = (rational_from_text(p) for p in str(seed_raw).split(","))
        elif job.kind == "odd":
            a0, a1 = 0, 1
        elif job.kind in ("even", "auto"):
            a0, a1 = 1, 0
        else:
            a0, a1 = _det_seed(job.potential, str(energy), job.L, terms, ctx)
        path = os.path.join(outdir, "wavefunction.csv")
        _write_samples(path, job.potential, str(energy), job.L, terms,
                       (a0, a1), npoints, ctx, job.digits)
        written.append(path)
    elif recipe == "fig2":
        # ground-state energy vs quartic coupling g = 0..10 at L = 5
        ctx = make_context(12)
        path = os.path.join(outdir, "fig2_ground_vs_coupling.csv")
        with open(path, "w") as fh:
            fh.write("# potential=x^2+g*x^4, L=5, terms=auto, digits=12\n")
            fh.write("g,E0\n")
            for g in range(0, 11):
                if g == 0:
                    P = parse_potential("x^2")
                else:
                    P = anharmonic(1, g, 2)
                rec = solve_spectrum(P, 5, 1, ctx)[0]
                fh.write("%d,%s\n" % (g, rec.energy))
        written.append(path)
    elif recipe == "fig3":
        ctx = make_context(20)
        for g in (0, 1, 2):
            P = parse_potential("x^2") if g == 0 else anharmonic(1, g, 2)
            ground, first = _lowest_pair(P, 5, ctx)
            for name, rec, seed in (("ground", ground, (1, 0)),
                                    ("first", first, (0, 1))):
                path = os.path.join(outdir, "fig3_g%d_%s.csv" % (g, name))
                _write_samples(path, P, rec.energy, 5, rec.terms_used, seed,
                               npoints, ctx, 20)
                written.append(path)
    elif recipe == "fig4":
        ctx = make_context(20)
        for k, L in ((3, 4), (4, 3), (5, 3), (6, 2)):
            P = anharmonic(1, 1, k)
            ground, first = _lowest_pair(P, L, ctx)
            for name, rec, seed in (("ground", ground, (1, 0)),
                                    ("first", first, (0, 1))):
                path = os.path.join(outdir, "fig4_x%d_%s.csv" % (2 * k, name))
                _write_samples(path, P, rec.energy, L, rec.terms_used, seed,
                               npoints, ctx, 20)
                written.append(path)
    elif recipe == "fig5":
        ctx = make_context(13)
        P = morse_series(400, 1, 30)
        terms = 500
        recs = solve_spectrum(P, 2, 2, ctx, terms=terms)
        for name, rec in (("ground", recs[0]), ("first", recs[1])):
            seed = _det_seed(P, rec.energy, 2, terms, ctx)
            path = os.path.join(outdir, "fig5_morse_%s.csv" % name)
            _write_samples(path, P, rec.energy, 2, terms, seed, npoints,
                           ctx, 13)
            written.append(path)
    else:
        raise ConfigError("unknown recipe %r (fig2|fig3|fig4|fig5)" % recipe)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_oracle(args, cfg) -> int:
    job = _job_config(args, cfg)
    ctx = make_context(job.digits)
    gridN = int(_opt(args, cfg, "gridn", 4000))
    records = solve_spectrum(job.potential, job.L, job.count, ctx,
                             terms=job.terms)
    fd = fd_eigenvalues(job.potential, float(mpfr(job.L)), gridN, job.count)
    P = job.potential
    is_free = not P.coeffs
    morse_params = None
    label = str(P)
    if label.startswith("morse("):
        V0 = rational_from_text(str(_opt(args, cfg, "V0", "400")))
        lam = rational_from_text(str(_opt(args, cfg, "lam", "1")))
        morse_params = MorseParams(V0, lam)
    fh, close = _open_out(args)
    try:
        fh.write("n,series,fd,fd_agree,exact,exact_agree\n")
        from .numerics import agree_digits

        for i, rec in enumerate(records):
            with working_context(ctx):
                series_val = mpfr(rec.energy)
            fd_val = fd[i]
            fd_agree = agree_digits(series_val, mpfr(repr(fd_val)),
                                    ndigits=17)
            exact = ""
            exact_agree = ""
            if is_free:
                ev = square_well_energy(job.L, i + 1, ctx)
                exact = render(ev, job.digits)
                exact_agree = str(agree_digits(series_val, ev,
                                               ndigits=job.digits))
            elif morse_params is not None and i <= morse_params.n_max:
                ev = morse_exact_energy(morse_params, i, ctx)
                exact = render(ev, job.digits)
                exact_agree = str(agree_digits(series_val, ev,
                                               ndigits=job.digits))
            fh.write("%d,%s,%s,%d,%s,%s\n" % (
                i, rec.energy, repr(fd_val), fd_agree, exact, exact_agree))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--potential", help="polynomial expression, e.g. 'x^2+x^4'")
    p.add_argument("--family", choices=["anharmonic", "morse"])
    p.add_argument("--mu2", help="quadratic coefficient (anharmonic family) "
                                 "or double-well depth list for split")
    p.add_argument("--g", help="coupling constant (anharmonic family)")
    p.add_argument("--k", type=int, help="half-degree of the anharmonic term")
    p.add_argument("--V0", help="Morse well depth")
    p.add_argument("--lambda", dest="lam", help="Morse range parameter")
    p.add_argument("--J", type=int, help="Morse series truncation degree")
    p.add_argument("--L", help="half-width of the box")
    p.add_argument("--digits", type=int, help="target significant digits")
    p.add_argument("--terms", help="truncation order I, or 'auto'")
    p.add_argument("--kind", help="even|odd|determinant|auto")
    p.add_argument("--range", dest="range", help="scan range lo:hi:step")
    p.add_argument("--count", type=int, help="number of eigenvalues")
    p.add_argument("--output", choices=["csv", "jsonl"])
    p.add_argument("--config", help="INI config file; flags override it")
    p.add_argument("--out", help="output file ('-' = stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="boxeig",
        description="Eigenvalues of 1D Schrodinger operators with polynomial "
                    "potentials between infinite walls at x = +/-L "
                    "(units hbar=1, 2m=1).")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, extra in (
            ("solve", cmd_solve, None),
            ("scan", cmd_scan, None),
            ("split", cmd_split, None),
            ("plotdata", cmd_plotdata, "plot"),
            ("oracle", cmd_oracle, "oracle")):
        p = sub.add_parser(name)
        _add_common(p)
        if extra == "plot":
            p.add_argument("--recipe", help="fig2|fig3|fig4|fig5")
            p.add_argument("--outdir", help="directory for CSV files")
            p.add_argument("--npoints", type=int, help="grid points per curve")
            p.add_argument("--energy", help="energy for a custom dump")
            p.add_argument("--seed", help="a0,a1 seed for a custom dump")
        if extra == "oracle":
            p.add_argument("--gridN", dest="gridn", type=int,
                           help="finite-difference grid size")
        p.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = {}
    try:
        if args.config:
            cfg = _load_config_file(args.config)
        return args.func(args, cfg)
    except (ConfigError, PotentialSyntaxError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print("non-convergence: %s" % exc, file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())

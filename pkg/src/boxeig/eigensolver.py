"""Eigenvalue location: scan for sign changes, bisect, convergence control.

The workflow mirrors how one actually uses the series method: sweep the
boundary functional over an energy grid at modest precision, confirm sign
changes (brackets), then bisect each bracket at full precision.  Convergence
is certified by doubling the truncation order until the rendered energy stops
moving, and optionally by marching the wall separation outward.

Deep double wells get a dedicated driver that raises the precision target
until the even/odd pseudo-degenerate pair is actually resolved.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpfr

from .numerics import (PrecisionContext, agree_digits, escalate, make_context,
                       render, to_real, working_context)
from .potential import Potential
from .series import BoundaryEval, boundary_value

__all__ = [
    "Bracket",
    "EigenvalueRecord",
    "SplittingReport",
    "ConvergenceError",
    "scan",
    "bisect",
    "converge_in_terms",
    "converge_in_width",
    "splitting",
    "solve_spectrum",
]

#: Escalation rounds allowed before a boundary value is declared an exact zero.
MAX_ESCALATIONS = 8


class ConvergenceError(RuntimeError):
    """Raised when an eigenvalue cannot be certified within the configured limits."""


@dataclass(frozen=True)
class Bracket:
    """Energy interval with a confirmed sign change of a boundary functional."""

    e_lo: mpfr
    e_hi: mpfr
    f_lo_sign: int
    f_hi_sign: int
    kind: str

    @property
    def degenerate(self) -> bool:
        return self.e_lo == self.e_hi


@dataclass(frozen=True)
class EigenvalueRecord:
    """Converged energy as a decimal string plus full provenance."""

    energy: str
    kind: str
    index: int
    terms_used: int
    L: str
    target_digits: int
    working_digits: int
    stable_digits: int
    cancellation_digits: int
    converged: bool

    def as_dict(self) -> dict:
        return {
            "energy": self.energy,
            "kind": self.kind,
            "index": self.index,
            "terms": self.terms_used,
            "L": self.L,
            "digits": self.target_digits,
            "working_digits": self.working_digits,
            "stable_digits": self.stable_digits,
            "cancellation_digits": self.cancellation_digits,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class SplittingReport:
    """Resolved even/odd pair of a double well and their tunneling gap."""

    e_plus: EigenvalueRecord
    e_minus: EigenvalueRecord
    agree_digits: int
    delta: str

    def as_dict(self) -> dict:
        return {
            "e_plus": self.e_plus.as_dict(),
            "e_minus": self.e_minus.as_dict(),
            "agree_digits": self.agree_digits,
            "delta": self.delta,
        }


def suggest_terms(P: Potential, L, e_abs_max: float = 1.0,
                  parity_split: bool | None = None) -> int:
    """Truncation-order estimate for a converged boundary value at x = L.

    The recurrence tail turns over once l**2 exceeds both |E|*L**2 and
    max_j |v_j|*L**(j+2); beyond that the terms fall off factorially.  A
    60% margin plus a flat pad covers the digits actually requested.

    `parity_split` says whether terms are counted over one parity class
    (symmetric potential, pure-parity seed) or over every index
    (determinant route); defaults to the potential's symmetry.
    """
    if parity_split is None:
        parity_split = P.symmetric
    Lf = abs(float(mpfr(L)))
    if Lf == 0:
        return 50
    s = max(1.0, abs(e_abs_max) * Lf**2)
    for j, c in P.coeffs.items():
        s = max(s, abs(float(c)) * Lf ** (j + 2))
    degree = int(3.2 * s**0.5) + 40
    terms = degree // 2 + 1 if parity_split else degree + 1
    return max(50, terms)


class _Evaluator:
    """Boundary-sign oracle that escalates precision on ambiguous values.

    A value is trusted only while its audited cancellation leaves at least
    five clean working digits; otherwise the sign is meaningless, precision
    is escalated (guard policy) and the point re-evaluated.  If the ceiling
    of rounds is hit the value is declared a genuine zero: at that point the
    energy is far closer to the root than any bisection tolerance in play.
    """

    def __init__(self, P: Potential, L, terms: int, kind: str,
                 ctx: PrecisionContext):
        self.P = P
        self.L = L
        self.terms = terms
        self.kind = kind
        self.ctx = ctx
        self.last: BoundaryEval | None = None

    def sign(self, E) -> int:
        for _ in range(MAX_ESCALATIONS):
            be = boundary_value(self.P, E, self.L, self.terms, self.kind, self.ctx)
            self.last = be
            if be.value == 0 and be.max_term_magnitude == 0:
                return 0
            if be.value != 0 and \
                    be.cancellation_digits <= self.ctx.working_digits - 5:
                return -1 if be.value < 0 else 1
            self.ctx = escalate(self.ctx, be.cancellation_digits)
        return 0


def scan(P: Potential, kind: str, L, terms: int, e_min, e_max, step,
         ctx: PrecisionContext) -> list[Bracket]:
    """Sweep [e_min, e_max] and return one Bracket per adjacent sign change.

    An exact zero on a grid point becomes a degenerate (zero-width) bracket.
    Warns, but does not fail, when nothing is found.
    """
    ev = _Evaluator(P, L, terms, kind, ctx)
    with working_context(ctx):
        e_min = to_real(e_min, ctx)
        e_max = to_real(e_max, ctx)
        step = to_real(step, ctx)
        if not e_min < e_max:
            raise ValueError("empty scan range")
        if not step > 0:
            raise ValueError("scan step must be > 0")
        grid = []
        e = e_min
        while e < e_max:
            grid.append(e)
            e += step
        grid.append(e_max)
    brackets = []
    prev_e = grid[0]
    prev_s = ev.sign(prev_e)
    if prev_s == 0:
        brackets.append(Bracket(prev_e, prev_e, 0, 0, kind))
    for e in grid[1:]:
        s = ev.sign(e)
        if s == 0:
            brackets.append(Bracket(e, e, 0, 0, kind))
        elif prev_s != 0 and s != prev_s:
            brackets.append(Bracket(prev_e, e, prev_s, s, kind))
        prev_e, prev_s = e, s
    if not brackets:
        warnings.warn(
            "no sign change of the %s boundary functional in [%s, %s]"
            % (kind, render(e_min, 6), render(e_max, 6)))
    return brackets


def bisect(P: Potential, bracket: Bracket, L, terms: int,
           ctx: PrecisionContext, index: int = 0) -> EigenvalueRecord:
    """Classic bisection to relative width 10**-target, with audit provenance."""
    t = ctx.target_digits
    ev = _Evaluator(P, L, terms, bracket.kind, ctx)
    with working_context(ctx):
        lo = to_real(bracket.e_lo, ctx)
        hi = to_real(bracket.e_hi, ctx)
        tol = mpfr(10) ** (-t)
    if bracket.degenerate:
        mid = lo
    else:
        s_lo = bracket.f_lo_sign
        mid = lo
        while True:
            with working_context(ev.ctx):
                mid = (lo + hi) / 2
                if hi - lo <= tol * max(mpfr(1), abs(mid)):
                    break
            s = ev.sign(mid)
            if s == 0:
                lo = hi = mid
                break
            if s == s_lo:
                lo = mid
            else:
                hi = mid
    cancel = ev.last.cancellation_digits if ev.last is not None else 0
    return EigenvalueRecord(
        energy=render(mid, t),
        kind=bracket.kind,
        index=index,
        terms_used=terms,
        L=render(to_real(L, ctx), 17),
        target_digits=t,
        working_digits=ev.ctx.working_digits,
        stable_digits=0,
        cancellation_digits=cancel,
        converged=False,
    )


def _record_energy(rec: EigenvalueRecord, ctx: PrecisionContext) -> mpfr:
    with working_context(ctx):
        return mpfr(rec.energy)


def _find_bracket_near(P: Potential, kind: str, L, terms: int, center,
                       radius, ctx: PrecisionContext) -> Bracket | None:
    """Search a +/-radius window around `center` for a sign change (21-point grid)."""
    ev = _Evaluator(P, L, terms, kind, ctx)
    with working_context(ctx):
        center = to_real(center, ctx)
        radius = to_real(radius, ctx)
        grid = [center + radius * k / 10 for k in range(-10, 11)]
    # walk outward from the center so the nearest root wins
    order = sorted(range(len(grid)), key=lambda i: abs(i - 10))
    signs = {}
    for i in order:
        signs[i] = ev.sign(grid[i])
        if signs[i] == 0:
            return Bracket(grid[i], grid[i], 0, 0, kind)
        j = i - 1 if i > 10 else i + 1
        if j in signs and signs[j] != 0 and signs[j] != signs[i]:
            a, b = sorted((i, j))
            return Bracket(grid[a], grid[b], signs[a], signs[b], kind)
    return None


def converge_in_terms(P: Potential, kind: str, L, bracket: Bracket,
                      ctx: PrecisionContext, start_terms: int | None = None,
                      max_terms: int = 1 << 21,
                      index: int = 0) -> EigenvalueRecord:
    """Double the truncation order until the rendered energy stops moving.

    Two successive orders must agree on all target digits.  The bracket is
    re-validated after every change of order; if the sign change drifted out,
    a +/-10-step window around the old bracket is re-scanned.
    """
    if start_terms is None:
        e_abs = max(abs(float(mpfr(bracket.e_lo))),
                    abs(float(mpfr(bracket.e_hi))), 1.0)
        start_terms = suggest_terms(P, L, e_abs,
                                    parity_split=(kind != "determinant"))
    terms = start_terms
    prev: EigenvalueRecord | None = None
    cur_bracket = bracket
    with working_context(ctx):
        width0 = to_real(bracket.e_hi, ctx) - to_real(bracket.e_lo, ctx)
    while terms <= max_terms:
        if prev is not None and not cur_bracket.degenerate:
            # re-validate: does the sign change survive at this order?
            ev = _Evaluator(P, L, terms, kind, ctx)
            s_lo = ev.sign(cur_bracket.e_lo)
            s_hi = ev.sign(cur_bracket.e_hi)
            if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
                center = _record_energy(prev, ctx)
                nb = _find_bracket_near(P, kind, L, terms, center, width0, ctx)
                if nb is None:
                    raise ConvergenceError(
                        "bracket lost while raising truncation order to %d" % terms)
                cur_bracket = nb
            else:
                cur_bracket = Bracket(cur_bracket.e_lo, cur_bracket.e_hi,
                                      s_lo, s_hi, kind)
        rec = bisect(P, cur_bracket, L, terms, ctx, index=index)
        if prev is not None:
            stable = agree_digits(_record_energy(prev, ctx),
                                  _record_energy(rec, ctx),
                                  ndigits=ctx.target_digits)
            if prev.energy == rec.energy:
                return EigenvalueRecord(
                    energy=rec.energy, kind=kind, index=index,
                    terms_used=rec.terms_used, L=rec.L,
                    target_digits=rec.target_digits,
                    working_digits=rec.working_digits,
                    stable_digits=max(stable, ctx.target_digits),
                    cancellation_digits=rec.cancellation_digits,
                    converged=True)
        prev = rec
        terms *= 2
    raise ConvergenceError(
        "energy did not stabilize to %d digits below %d terms"
        % (ctx.target_digits, max_terms))


def converge_in_width(P: Potential, kind: str, bracket: Bracket, L_schedule,
                      ctx: PrecisionContext, start_terms: int | None = None,
                      index: int = 0) -> list[EigenvalueRecord]:
    """One converged-in-order record per wall separation in the schedule.

    The schedule must be strictly increasing; each step re-brackets around the
    previous root (Dirichlet eigenvalues drift downward as the box widens).
    """
    Ls = list(L_schedule)
    with working_context(ctx):
        vals = [to_real(L, ctx) for L in Ls]
    if any(not a < b for a, b in zip(vals, vals[1:])):
        raise ValueError("L_schedule must be strictly increasing")
    records = []
    cur_bracket = bracket
    for i, L in enumerate(Ls):
        if records:
            center = _record_energy(records[-1], ctx)
            probe_terms = start_terms or suggest_terms(
                P, L, max(abs(float(center)), 1.0),
                parity_split=(kind != "determinant"))
            with working_context(ctx):
                width0 = to_real(bracket.e_hi, ctx) - to_real(bracket.e_lo, ctx)
            radius = width0
            nb = None
            for _ in range(6):
                nb = _find_bracket_near(P, kind, L, probe_terms, center,
                                        radius, ctx)
                if nb is not None:
                    break
                with working_context(ctx):
                    radius = radius * 4
            if nb is None:
                raise ConvergenceError("could not re-bracket at L=%s" % L)
            cur_bracket = nb
        records.append(converge_in_terms(P, kind, L, cur_bracket, ctx,
                                         start_terms=start_terms, index=index))
    return records


def _ground_brackets(P: Potential, L, ctx: PrecisionContext):
    """Coarse even and odd brackets around the lowest double-well pair."""
    from .oracle import fd_eigenvalues

    est = fd_eigenvalues(P, float(to_real(L, ctx)), 4000, 4)
    gap = max(est[2] - est[0], 1.0)
    lo = est[0] - gap / 2
    hi = est[0] + gap / 2
    step = gap / 50
    scan_ctx = make_context(30)
    scan_terms = suggest_terms(P, L, max(abs(lo), abs(hi), 1.0))
    out = {}
    for kind in ("even", "odd"):
        brs = scan(P, kind, L, scan_terms, lo, hi, step, scan_ctx)
        if not brs:
            raise ConvergenceError("no %s bracket near the well bottom" % kind)
        out[kind] = brs[0]
    return out


def splitting(P: Potential, L, ctx: PrecisionContext,
              max_target: int = 160) -> SplittingReport:
    """Resolve the even/odd tunneling splitting of a symmetric double well.

    Raises the precision target until the gap carries at least six resolved
    digits beyond the shared prefix of the two energies.
    """
    if not P.symmetric:
        raise ValueError("double-well splitting requires a symmetric potential")
    if P.coeffs.get(2, 0) >= 0:
        raise ValueError("not a double well: quadratic coefficient must be negative")
    brs = _ground_brackets(P, L, ctx)
    target = max(ctx.target_digits, 30)
    while True:
        t_ctx = make_context(target)
        rec_p = converge_in_terms(P, "even", L, brs["even"], t_ctx, index=0)
        rec_m = converge_in_terms(P, "odd", L, brs["odd"], t_ctx, index=0)
        ep = _record_energy(rec_p, t_ctx)
        em = _record_energy(rec_m, t_ctx)
        agree = agree_digits(ep, em, ndigits=target)
        needed = agree + 6 + 2
        if target >= needed:
            with working_context(make_context(target + 10)):
                delta = mpfr(rec_m.energy) - mpfr(rec_p.energy)
            if delta <= 0:
                raise ConvergenceError("even/odd ordering violated; "
                                       "splitting below resolution")
            return SplittingReport(rec_p, rec_m, agree, render(delta, 6))
        if needed > max_target:
            raise ConvergenceError(
                "splitting unresolved below the %d-digit ceiling" % max_target)
        target = needed + 8


def solve_spectrum(P: Potential, L, count: int, ctx: PrecisionContext,
                   terms: int | None = None,
                   e_range=None) -> list[EigenvalueRecord]:
    """Lowest `count` eigenvalues in increasing order, each converged.

    Symmetric potentials are solved per parity and merged; asymmetric ones go
    through the wall determinant.  The scan window defaults to a machine-
    precision finite-difference estimate of the low spectrum.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    kinds = ("even", "odd") if P.symmetric else ("determinant",)
    scan_ctx = make_context(30)
    if e_range is None:
        from .oracle import fd_eigenvalues

        est = fd_eigenvalues(P, float(to_real(L, ctx)), 4000, count + 2)
        spread = max(est[-1] - est[0], 1.0)
        lo = est[0] - 0.25 * spread - 0.5
        hi = est[count - 1] + 0.3 * spread + 0.5
    else:
        lo, hi = e_range
    found = []
    step = None
    with working_context(scan_ctx):
        lo = to_real(lo, scan_ctx)
        hi = to_real(hi, scan_ctx)
        step = (hi - lo) / 200
    scan_terms = suggest_terms(P, L, max(abs(float(lo)), abs(float(hi)), 1.0))
    for attempt in range(4):
        found = []
        for kind in kinds:
            for br in scan(P, kind, L, scan_terms, lo, hi, step, scan_ctx):
                found.append(br)
        if len(found) >= count:
            break
        with working_context(scan_ctx):
            step = step / 4
        scan_terms *= 2
    if len(found) < count:
        raise ConvergenceError(
            "found only %d brackets for %d requested eigenvalues"
            % (len(found), count))
    records = []
    per_kind: dict[str, int] = {}
    for br in sorted(found, key=lambda b: float(to_real(b.e_lo, scan_ctx))):
        idx = per_kind.get(br.kind, 0)
        per_kind[br.kind] = idx + 1
        if terms is None:
            rec = converge_in_terms(P, br.kind, L, br, ctx, index=idx)
        else:
            rec = bisect(P, br, L, terms, ctx, index=idx)
        records.append(rec)
        if len(records) >= count + 2:
            break

    def _order(r: EigenvalueRecord):
        # parse at full precision; an even/odd pseudo-degenerate pair still
        # orders even-first at equal renderings
        with working_context(make_context(r.target_digits)):
            v = mpfr(r.energy)
        return (v, 0 if r.kind == "even" else 1)

    records.sort(key=_order)
    return records[:count]

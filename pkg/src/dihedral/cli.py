"""Command-line interface.

Exit codes: 0 choreography, 10 fragmented, 11 periodic but not
equivariant, 12 quasiperiodic, 13 unbounded (``classify`` only); 2 parse
error, 3 validation error, 4 infeasible design.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io as fio
from .dynamics import Trajectory, default_timestep, integrate_verlet
from .errors import DihedralError, Infeasible, ScenarioParseError
from .model import Branch, Convention, canonical, stiffness_eigenvalues
from .modes import active_sectors, analytic_states, fourier_decompose, remove_center_of_mass
from .resonance import Tolerances, classify, design_couplings, profile_from_spectrum
from .scan import run_scan
from .svg import render_trajectories

EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_INFEASIBLE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _resolve_scenario(ref: str) -> fio.Scenario:
    if Path(ref).exists():
        return fio.load_scenario(ref)
    if ref in fio.builtin_scenarios():
        return fio.load_builtin(ref)
    raise ScenarioParseError(f"no such scenario file or built-in name: {ref}")


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return "-"
    return f"{x:.10g}"


def _sqrt_text(q: Fraction) -> str:
    r = Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
    if r * r == q:
        return str(r)
    if q.denominator == 1:
        return f"√{q.numerator}"
    return f"√({q})"


def _period_text(T, profile, omega):
    """``2π/√3``-style rendering when the base frequency is a known surd."""
    if profile is None or profile.base_frequency_sq is None or T != profile.T_min:
        return f"{T:.10g}"
    root = _sqrt_text(profile.base_frequency_sq)
    if root == "1":
        return "2π" if omega == 1 else f"2π/{_num(omega)}"
    if omega != 1:
        return f"2π/({_num(omega)}·{root})"
    return f"2π/{root}"


def cmd_spectrum(args) -> int:
    scn = _resolve_scenario(args.scenario)
    sp = stiffness_eigenvalues(scn.spec)
    print(f"scenario: {scn.label or args.scenario}")
    print(f"n = {sp.n}, omega = {_num(sp.omega)}, exact = {sp.exact}")
    print(f"{'sector':>6}  {'lambda':>14}  {'Omega':>14}  {'mult':>4}  branch")
    for ell in sp.sectors:
        print(f"{ell:>6}  {_num(sp.lambdas[ell]):>14}  {_num(sp.frequencies[ell]):>14}  "
              f"{sp.multiplicities[ell]:>4}  {sp.branches[ell].value}")
    print("degeneracy groups: " + ", ".join("{" + ",".join(map(str, g)) + "}" for g in sp.degeneracy_groups))
    print(fio.format_machine_block({
        "n": sp.n,
        "omega": sp.omega,
        "exact": sp.exact,
        "lambdas": [str(x) if isinstance(x, Fraction) else x for x in sp.lambdas],
        "frequencies": list(sp.frequencies),
        "multiplicities": list(sp.multiplicities),
        "branches": [b.value for b in sp.branches],
        "degeneracy_groups": [list(g) for g in sp.degeneracy_groups],
    }), end="")
    return 0


def _tolerances(args, scn) -> Tolerances:
    eps = args.eps_rel if args.eps_rel is not None else (scn.eps_rel or Tolerances.eps_rel)
    return Tolerances(
        activity_rel=args.activity_rel,
        max_denominator=args.max_denominator,
        commensurability_rel=args.commensurability_rel,
        eps_rel=eps,
        samples=args.samples,
    )


def cmd_classify(args) -> int:
    scn = _resolve_scenario(args.scenario)
    tol = _tolerances(args, scn)
    c = classify(scn.spec, scn.initial, tol)
    prof = c.profile
    headline = c.category.value
    if c.period is not None and c.category.equivariant:
        headline += f", T={_period_text(c.period, prof, scn.spec.omega)}"
        rep = c.trace_report
        if rep.single_trace:
            headline += f", shift T/{scn.spec.n}"
    print(f"scenario: {scn.label or args.scenario}")
    print(headline)
    print("active sectors: " + ", ".join(map(str, sorted(c.active))))
    if prof is not None and prof.commensurate:
        print("frequency ratios: " + ":".join(map(str, prof.ratios))
              + f"  (Omega_0 = {prof.base_frequency:.10g}, T_min = {prof.T_min:.10g})")
    if c.merged_groups:
        print("merged groups: " + ", ".join("{" + ",".join(map(str, g.labels)) + "}" for g in c.merged_groups))
    if c.witness_shift is not None:
        print(f"witness shift s = {c.witness_shift}, period T = {c.period:.10g}")
    if c.failing_sectors:
        print("failing sectors: " + ", ".join(map(str, sorted(c.failing_sectors))))
    if c.trace_report is not None:
        rep = c.trace_report
        for b in rep.blocks:
            shifts = ", ".join(str(s) for s in b.shifts)
            print(f"block {{{','.join(map(str, b.members))}}}: shifts [{shifts}] x T_min, "
                  f"residual {b.max_residual:.3g}, consistent {b.consistent}")
        print(f"structure: {rep.structure} (tolerance {rep.tolerance:.3g}, diameter {rep.diameter:.6g})")
    payload = c.to_dict()
    payload["scenario"] = scn.label
    payload["tolerances"] = tol.to_dict()
    print(fio.format_machine_block(payload), end="")
    return c.category.exit_code


def _reference_period(scn):
    spec = canonical(scn.spec)
    sp = stiffness_eigenvalues(spec)
    modes = fourier_decompose(remove_center_of_mass(scn.initial), spec.n)
    active = active_sectors(modes, sp, spec.mass)
    rates = [r for r in sp.rates if r > 0]
    max_rate = max(rates) if rates else spec.omega
    if active and all(sp.branches[ell] is Branch.OSCILLATORY for ell in active):
        prof = profile_from_spectrum(sp, active)
        if prof.commensurate:
            return prof.T_min, max_rate
    return None, max_rate


def cmd_simulate(args) -> int:
    scn = _resolve_scenario(args.scenario)
    period, max_rate = _reference_period(scn)
    dt = args.dt if args.dt is not None else default_timestep(period, max_rate)
    t_end = args.t_end if args.t_end is not None else (period or 2 * math.pi / max_rate)
    if not dt > 0 or t_end < 0:
        raise ValueError("need dt > 0 and t-end >= 0")
    steps = int(round(t_end / dt))
    stride = args.stride
    times = scn.initial.t + dt * stride * np.arange(steps // stride + 1)

    def analytic():
        r, p = analytic_states(scn.spec, scn.initial, times - scn.initial.t)
        return Trajectory(times, r, p, {"engine": "analytic"})

    def verlet():
        if steps == 0:
            s = scn.initial
            return Trajectory(np.array([s.t]), s.positions[None], s.momenta[None], {"engine": "verlet"})
        return integrate_verlet(scn.spec, scn.initial, dt, steps, stride)

    traj = verlet() if args.engine == "verlet" else analytic()
    report = sys.stdout if args.out else sys.stderr
    if args.out:
        fio.write_trajectory_csv(traj, args.out, momenta=args.momenta)
    else:
        fio.write_trajectory_csv(traj, sys.stdout, momenta=args.momenta)
    print(f"engine {args.engine}: {len(traj)} samples, dt = {dt:.6g}, t_end = {dt * steps:.6g}", file=report)
    if args.engine == "both":
        other = verlet()
        dev = float(np.abs(other.positions - traj.positions).max())
        print(f"max position deviation verlet vs analytic: {dev:.3e}", file=report)
    return 0


def _parse_ratios(text):
    try:
        out = [int(x) for x in text.split(":")]
    except ValueError:
        raise ValueError(f"ratios must look like 1:2:3, got {text!r}") from None
    return out


def cmd_design(args) -> int:
    ratios = _parse_ratios(args.ratios)
    fam = design_couplings(args.n, ratios, Convention(args.convention), exclude=args.exclude or ())
    print(f"n = {fam.n}, ratios {':'.join(map(str, fam.ratios))} ({fam.convention.value})")
    if fam.excluded:
        print("excluded bonds: " + ", ".join(map(str, sorted(fam.excluded))))
    print("family: kappa = t * (" + ", ".join(_num(x) for x in fam.particular) + "), t > 0"
          + ("" if not fam.homogeneous else f", plus a {len(fam.homogeneous)}-dimensional null space"))
    for k, coeff, lead in fam.relations():
        exact = f"  [{coeff}]" if isinstance(coeff, Fraction) and coeff.denominator != 1 else ""
        print(f"kappa{k} = {float(coeff):.10g}*kappa{lead}{exact}")
    print("sample (" + ", ".join(f"{float(x):.10g}" for x in fam.particular) + ")")
    print(fio.format_machine_block({
        "n": fam.n,
        "ratios": list(fam.ratios),
        "convention": fam.convention.value,
        "exact": fam.exact,
        "particular": [str(x) if isinstance(x, Fraction) else x for x in fam.particular],
        "homogeneous": [[str(x) if isinstance(x, Fraction) else x for x in h] for h in fam.homogeneous],
        "excluded": sorted(fam.excluded),
    }), end="")
    return 0


def cmd_scan(args) -> int:
    req = fio.load_scan_request(args.request)
    res = run_scan(req, workers=args.workers)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.csv").write_text(res.to_csv())
    Path(f"{prefix}.json").write_text(res.to_json())
    counts = {}
    for c in res.cells:
        counts[c.category] = counts.get(c.category, 0) + 1
    print(f"{len(res.cells)} cells written to {prefix}.csv and {prefix}.json")
    for k in sorted(counts):
        print(f"  {k}: {counts[k]}")
    return 0


def cmd_plot(args) -> int:
    traj = fio.read_trajectory_csv(args.trajectory)
    blocks = None
    if args.partition:
        try:
            text = Path(args.partition).read_text()
        except OSError as exc:
            raise ScenarioParseError(f"cannot read {args.partition}: {exc.strerror}") from None
        payload = fio.extract_machine_block(text)
        rep = payload.get("trace_report") if "trace_report" in payload else payload
        if not rep or "blocks" not in rep:
            raise ScenarioParseError(f"{args.partition}: no trace partition in report")
        blocks = [b["members"] for b in rep["blocks"]]
    svg = render_trajectories(traj.positions, blocks, title=args.title)
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")
    return 0


def cmd_scenarios(args) -> int:
    for name in fio.builtin_scenarios():
        print(f"{name}: {fio.load_builtin(name).label}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dihedral", description="Dihedral-invariant quadratic n-body systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", help="stiffness eigenvalues and sector frequencies")
    s.add_argument("scenario", help="scenario file or built-in name")
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("classify", help="classify the motion of a scenario")
    c.add_argument("scenario")
    c.add_argument("--eps-rel", type=float, default=None, help="trace tolerance relative to the diameter")
    c.add_argument("--activity-rel", type=float, default=Tolerances.activity_rel)
    c.add_argument("--max-denominator", type=int, default=Tolerances.max_denominator)
    c.add_argument("--commensurability-rel", type=float, default=Tolerances.commensurability_rel)
    c.add_argument("--samples", type=int, default=None)
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("simulate", help="write a trajectory as CSV")
    m.add_argument("scenario")
    m.add_argument("--t-end", type=float, default=None, help="default: one period")
    m.add_argument("--dt", type=float, default=None, help="default: period / 1e4")
    m.add_argument("--stride", type=int, default=1)
    m.add_argument("--engine", choices=("analytic", "verlet", "both"), default="analytic")
    m.add_argument("--momenta", action="store_true", help="also write momentum columns")
    m.add_argument("--out", default=None, help="CSV path (default: standard output)")
    m.set_defaults(func=cmd_simulate)

    d = sub.add_parser("design", help="couplings for prescribed frequency ratios")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--ratios", required=True, help="e.g. 1:2:3")
    d.add_argument("--convention", choices=[c.value for c in Convention], default="listed-once")
    d.add_argument("--exclude", type=int, nargs="*", help="bond distances pinned to zero coupling")
    d.set_defaults(func=cmd_design)

    sc = sub.add_parser("scan", help="classification map over coupling space")
    sc.add_argument("request")
    sc.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    sc.add_argument("--workers", type=int, default=None)
    sc.set_defaults(func=cmd_scan)

    pl = sub.add_parser("plot", help="render a trajectory CSV as SVG")
    pl.add_argument("trajectory")
    pl.add_argument("--partition", default=None, help="classify report used to colour blocks")
    pl.add_argument("--title", default=None)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)

    ls = sub.add_parser("scenarios", help="list built-in scenarios")
    ls.set_defaults(func=cmd_scenarios)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DihedralError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

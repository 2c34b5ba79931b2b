#!/usr/bin/env python3
"""
Command-line front end.

Subcommands:
    sturm     check | enumerate | orbit
    meander   components | double | close | svg
    seaweed   components | billiard
    tl        eval | trace | meander
    shoot     sigma | curve
    bianchi   integrate | integrals
    kasner    iterate | ifs | stats

Results go to stdout (or --output) as JSON, CSV, DOT or SVG; status and
progress go to stderr. Angles are given in degrees.

Exit codes: 0 success, 2 invalid input, 1 runtime failure.

Usage:
    python cli.py sturm check 1,4,3,2,5
    python cli.py sturm enumerate --n 9 --jobs 4
    python cli.py seaweed components 2,4
    python cli.py kasner iterate --theta 0 --n 1 --d 2
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from config import Settings, load_settings
from errors import EmptyInput, ToolkitError, Unsupported, UsageError

logger = logging.getLogger("cli")

FORMATS = ("json", "csv", "dot", "svg")


class ToolkitArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError (exit 2) instead of exiting."""

    def error(self, message):
        raise UsageError(f"{message}\n\n{self.format_usage().strip()}")


# =============================================================================
# OUTPUT HELPERS
# =============================================================================

def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def csv_text(frame) -> str:
    return frame.to_csv(index=False)


def check_format(fmt: str, allowed) -> str:
    if fmt not in allowed:
        raise UsageError(f"--format {fmt} is not available here (choose from {', '.join(allowed)})")
    return fmt


def banner(title: str, lines=()):
    print(f"\n{'='*60}", file=sys.stderr)
    print(title, file=sys.stderr)
    print(f"{'='*60}", file=sys.stderr)
    for line in lines:
        print(line, file=sys.stderr)


def read_closed_meander(source: str):
    """A ClosedMeander from a JSON file path or an inline JSON object."""
    from meander_core import ClosedMeander

    text = source
    if not source.lstrip().startswith("{"):
        path = Path(source)
        if not path.exists():
            raise UsageError(f"Meander file not found: {path}")
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"Meander JSON does not parse: {e}")
    return ClosedMeander.from_dict(data)


# =============================================================================
# STURM
# =============================================================================

def cmd_sturm(args, settings: Settings):
    from meander_core import (
        canonical_form,
        enumerate_sturm,
        is_dissipative,
        is_meander,
        is_sturm,
        morse_vector,
        parse_permutation,
        symmetry_orbit,
    )
    import pandas as pd

    fmt = check_format(args.format or "json", ("json", "csv"))

    if args.action == "check":
        sigma = parse_permutation(args.perm)
        result = {
            "perm": str(sigma),
            "sturm": is_sturm(sigma),
            "meander": is_meander(sigma),
            "dissipative": is_dissipative(sigma),
            "morse": list(morse_vector(sigma).indices),
        }
        if fmt == "csv":
            return csv_text(pd.DataFrame([{**result, "morse": json.dumps(result["morse"])}]))
        return dump_json(result)

    if args.action == "enumerate":
        jobs = args.jobs or settings.parallel_workers
        banner(f"STURM PERMUTATIONS IN S_{args.n}", [f"Method: {args.method}", f"Workers: {jobs}"])
        perms = enumerate_sturm(args.n, method=args.method, bound=settings.enumeration_bound,
                                jobs=jobs, show_progress=True)
        if args.canonical:
            perms = sorted({canonical_form(p) for p in perms})
        print(f"Found: {len(perms)}", file=sys.stderr)
        rows = [{"perm": str(p), "morse": list(morse_vector(p).indices),
                 "canonical": str(canonical_form(p))} for p in perms]
        if fmt == "csv":
            return csv_text(pd.DataFrame([{**r, "morse": json.dumps(r["morse"])} for r in rows],
                                         columns=["perm", "morse", "canonical"]))
        return dump_json({"n": args.n, "count": len(rows), "permutations": rows})

    sigma = parse_permutation(args.perm)
    orbit = sorted(symmetry_orbit(sigma))
    result = {"perm": str(sigma), "orbit": [str(p) for p in orbit], "canonical": str(orbit[0])}
    if fmt == "csv":
        return csv_text(pd.DataFrame({"orbit": result["orbit"]}))
    return dump_json(result)


# =============================================================================
# MEANDER
# =============================================================================

def cmd_meander(args, settings: Settings):
    from meander_core import (
        close_open_meander,
        components,
        count_components,
        open_meander_arches,
        open_to_rainbow,
        parse_permutation,
    )
    from render import meander_dot, meander_svg

    if args.action == "close":
        fmt = check_format(args.format or "json", ("json", "dot", "svg"))
        m = close_open_meander(open_meander_arches(parse_permutation(args.source)))
    elif args.action == "svg":
        fmt = check_format(args.format or "svg", ("svg",))
        if args.source.lstrip().startswith("{") or Path(args.source).exists():
            m = read_closed_meander(args.source)
        else:
            om = open_meander_arches(parse_permutation(args.source))
            return meander_svg(om.n, om.upper_arches, om.lower_arches, settings.svg_width, settings.svg_height)
    else:
        fmt = check_format(args.format or "json", ("json", "dot", "svg"))
        m = read_closed_meander(args.source)
        if args.action == "double":
            m = open_to_rainbow(m)

    if fmt == "svg":
        return meander_svg(m.n, m.upper, m.lower, settings.svg_width, settings.svg_height)
    if fmt == "dot":
        return meander_dot(m.n, m.upper, m.lower, components(m))
    if args.action == "components":
        return dump_json({"n": m.n, "components": count_components(m)})
    return dump_json({**m.to_dict(), "components": count_components(m)})


# =============================================================================
# SEAWEED
# =============================================================================

def cmd_seaweed(args, settings: Settings):
    from meander_core import count_components
    from render import billiard_svg
    from seaweed_billiard import (
        billiard_components,
        billiard_from_seaweed,
        birainbow_formula,
        parse_composition,
        seaweed_meander,
    )

    sc = parse_composition(args.composition)
    m = seaweed_meander(sc)

    if args.action == "components":
        check_format(args.format or "json", ("json",))
        result = {"composition": str(sc), "n": m.n, "components": count_components(m)}
        if len(sc.beta) == 1:
            try:
                result["formula"] = birainbow_formula(sc.alpha)
            except Unsupported:
                result["formula"] = None
        return dump_json(result)

    fmt = check_format(args.format or "json", ("json", "svg"))
    b = billiard_from_seaweed(sc)
    if fmt == "svg":
        return billiard_svg(b.cells, b.paths, settings.svg_width, settings.svg_height)
    return dump_json({"composition": str(sc), **b.to_dict(), "components": billiard_components(b),
                      "meander_components": count_components(m)})


# =============================================================================
# TEMPERLEY-LIEB
# =============================================================================

def cmd_tl(args, settings: Settings):
    from meander_core import components, count_components
    from render import meander_dot, meander_svg
    from temperley_lieb import eval_word, markov_trace_exponent, parse_word, word_to_meander

    w = parse_word(args.word)
    if args.action == "eval":
        check_format(args.format or "json", ("json",))
        return dump_json({"word": str(w), **eval_word(w).to_dict()})
    if args.action == "trace":
        check_format(args.format or "json", ("json",))
        return dump_json({"word": str(w), "trace_exponent": markov_trace_exponent(w)})

    fmt = check_format(args.format or "json", ("json", "dot", "svg"))
    translation = word_to_meander(w)
    m = translation.meander
    if fmt == "svg":
        return meander_svg(m.n, m.upper, m.lower, settings.svg_width, settings.svg_height)
    if fmt == "dot":
        return meander_dot(m.n, m.upper, m.lower, components(m))
    return dump_json({"word": str(w), **m.to_dict(), "components": count_components(m),
                      "interior_loops": translation.interior_loops})


# =============================================================================
# SHOOTING
# =============================================================================

def cmd_shoot(args, settings: Settings):
    from meander_core import is_sturm, morse_vector
    from render import shooting_svg
    from shooting import find_equilibria, make_nonlinearity, permutation_from_roots, shoot, shooting_curve

    f = make_nonlinearity(args.family, args.param)
    lo, hi = args.window
    grid = args.grid or settings.shooting_grid
    tol = args.tol or settings.shooting_tol
    jobs = args.jobs or settings.parallel_workers

    if args.action == "sigma":
        fmt = check_format(args.format or "json", ("json", "csv"))
        roots = find_equilibria(f, (lo, hi), grid, tol, halvings=settings.bisection_halvings,
                                threshold=settings.hyperbolicity_threshold,
                                escape_bound=settings.escape_bound, jobs=jobs)
        if not roots:
            raise EmptyInput(f"{f.description}: no equilibria in [{lo:g}, {hi:g}]")
        sigma = permutation_from_roots(f, roots, tol, settings.tie_resolution)
        if fmt == "csv":
            import pandas as pd
            rows = [shoot(f, a, tol) for a in roots]
            return csv_text(pd.DataFrame([{"a": r.a, "v1": r.v1, "w1": r.w1} for r in rows]))
        return dump_json({
            "nonlinearity": f.description,
            "sigma": str(sigma),
            "equilibria": [float(a) for a in roots],
            "sturm": is_sturm(sigma),
            "morse": list(morse_vector(sigma).indices),
        })

    fmt = check_format(args.format or "csv", ("csv", "svg"))
    frame = shooting_curve(f, np.linspace(lo, hi, grid), tol, jobs=jobs)
    if fmt == "svg":
        return shooting_svg(frame["v1"], frame["w1"], settings.svg_width, settings.svg_height)
    return csv_text(frame)


# =============================================================================
# BIANCHI
# =============================================================================

def cmd_bianchi(args, settings: Settings):
    from bianchi_ode import (
        BianchiState,
        IntegratorConfig,
        classify_type,
        integrate,
        kasner_epochs,
        mixmaster_integrals,
    )

    s0 = BianchiState.parse(args.state)
    if args.integrator_config:
        cfg = IntegratorConfig.from_json(args.integrator_config)
    else:
        cfg = IntegratorConfig(settings.bianchi_rtol, settings.bianchi_atol, settings.bianchi_max_step)
    gamma = settings.default_gamma if args.gamma is None else args.gamma
    traj = integrate(s0, gamma, args.direction, args.tspan, cfg)

    if args.action == "integrate":
        check_format(args.format or "csv", ("csv",))
        return csv_text(traj.to_frame())

    check_format(args.format or "json", ("json",))
    I, J = mixmaster_integrals(traj)
    return dump_json({
        "type": classify_type(s0),
        "direction": args.direction,
        "t_end": float(traj.t[-1]),
        "steps": len(traj),
        "I": float(I[-1]),
        "J": float(J[-1]),
        "kasner_epochs_deg": [float(np.degrees(e["theta"])) for e in kasner_epochs(traj)],
    })


# =============================================================================
# KASNER
# =============================================================================

def cmd_kasner(args, settings: Settings):
    from kasner_maps import (
        CORNER_ANGLES,
        ArcSet,
        EmanationConfig,
        coverage_steps,
        eras,
        ifs_iterate,
        iterate,
        near_arcs,
        termination_stats,
    )
    from render import kasner_svg

    cfg = EmanationConfig(args.d, settings.tangency_eps)

    if args.action == "iterate":
        fmt = check_format(args.format or "csv", ("csv", "json", "svg"))
        it = iterate(np.radians(args.theta), args.n, cfg, args.policy, seed=args.seed)
        if fmt == "svg":
            return kasner_svg(cfg.d, CORNER_ANGLES.values(), thetas=it.thetas, corners=it.corners,
                              width=settings.svg_width, height=settings.svg_height)
        if fmt == "json":
            return dump_json({
                "d": cfg.d,
                "thetas_deg": [float(np.degrees(t)) for t in it.thetas],
                "corners": list(it.corners),
                "flag": it.flag,
                "eras": [list(e[:2]) + [list(e[2])] for e in eras(it)],
            })
        return csv_text(it.to_frame())

    if args.action == "ifs":
        fmt = check_format(args.format or "json", ("json", "svg"))
        A = ArcSet.parse(args.arcs)
        image = ifs_iterate(A, args.n, cfg)
        if fmt == "svg":
            arcs = [arc for s in near_arcs(cfg).values() for arc in s.arcs] if args.show_near else image.arcs
            return kasner_svg(cfg.d, CORNER_ANGLES.values(), near_arcs=arcs,
                              width=settings.svg_width, height=settings.svg_height)
        result = {"d": cfg.d, "steps": args.n, **image.to_dict()}
        if args.coverage:
            result["coverage_steps"] = coverage_steps(A, cfg, settings.ifs_max_steps)
        return dump_json(result)

    check_format(args.format or "json", ("json",))
    jobs = args.jobs or settings.parallel_workers
    banner(f"KASNER TERMINATION d={cfg.d:g}", [f"Samples: {args.samples}", f"Workers: {jobs}"])
    fraction = termination_stats(args.samples, args.max_iter, cfg, seed=args.seed or 0, jobs=jobs,
                                 chunk=settings.monte_carlo_chunk, show_progress=True)
    return dump_json({"d": cfg.d, "samples": args.samples, "max_iter": args.max_iter,
                      "seed": args.seed or 0, "fraction": fraction})


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = ToolkitArgumentParser(add_help=False)
    common.add_argument("--format", "-f", choices=FORMATS, default=None, help="Output format")
    common.add_argument("--output", "-o", default=None, help="Output file (default: stdout)")
    common.add_argument("--config", "-c", default=None, help="key=value settings file")
    common.add_argument("--jobs", "-j", type=int, default=None, help="Worker processes")
    common.add_argument("--seed", type=int, default=None, help="Random seed")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    parser = ToolkitArgumentParser(prog="sturmkit", description="Sturm attractors, meanders and Kasner maps")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=ToolkitArgumentParser)

    def actions(name, handler, help_text):
        group = groups.add_parser(name, help=help_text)
        group.set_defaults(handler=handler)
        return group.add_subparsers(dest="action", required=True, parser_class=ToolkitArgumentParser)

    sturm = actions("sturm", cmd_sturm, "Sturm permutations")
    p = sturm.add_parser("check", parents=[common], help="Meander, dissipative, Morse and Sturm tests")
    p.add_argument("perm", help="One-line notation, e.g. 1,4,3,2,5")
    p = sturm.add_parser("enumerate", parents=[common], help="All Sturm permutations in S_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("brute", "arches"), default="brute")
    p.add_argument("--canonical", action="store_true", help="One representative per symmetry orbit")
    p = sturm.add_parser("orbit", parents=[common], help="Orbit under inversion and reversal")
    p.add_argument("perm")

    meander = actions("meander", cmd_meander, "Closed and open meanders")
    for action, help_text in (("components", "Count components"),
                              ("double", "Double vertices onto a lower rainbow")):
        p = meander.add_parser(action, parents=[common], help=help_text)
        p.add_argument("source", help="Closed meander JSON file or inline JSON")
    p = meander.add_parser("close", parents=[common], help="Close a dissipative open meander")
    p.add_argument("source", help="Permutation in one-line notation")
    p = meander.add_parser("svg", parents=[common], help="Draw a permutation or closed meander")
    p.add_argument("source", help="Permutation, JSON file or inline JSON")

    seaweed = actions("seaweed", cmd_seaweed, "Seaweed meanders and billiards")
    for action, help_text in (("components", "Meander component count"),
                              ("billiard", "Cartesian billiard of the composition")):
        p = seaweed.add_parser(action, parents=[common], help=help_text)
        p.add_argument("composition", help="e.g. 2,2|1,3 or 2,4 (bi-rainbow)")

    tl = actions("tl", cmd_tl, "Temperley-Lieb words")
    for action, help_text in (("eval", "Evaluate a word to a diagram"),
                              ("trace", "Markov trace exponent"),
                              ("meander", "Rainbow meander of the closed word")):
        p = tl.add_parser(action, parents=[common], help=help_text)
        p.add_argument("word", help="e.g. 'N=4: 2 1 3'")

    shoot = actions("shoot", cmd_shoot, "Shooting for Neumann equilibria")
    for action, help_text in (("sigma", "Sturm permutation of f"), ("curve", "Shooting curve at x=1")):
        p = shoot.add_parser(action, parents=[common], help=help_text)
        p.add_argument("--family", default="cubic", help="cubic | linear | constant | polynomial")
        p.add_argument("--param", nargs="+", default=["15"], help="Family parameter(s)")
        p.add_argument("--window", nargs=2, type=float, default=[-2.0, 2.0], metavar=("LO", "HI"))
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)

    bianchi = actions("bianchi", cmd_bianchi, "Wainwright-Hsu integration")
    for action, help_text in (("integrate", "Trajectory CSV"), ("integrals", "Mixmaster integrals")):
        p = bianchi.add_parser(action, parents=[common], help=help_text)
        p.add_argument("--state", required=True, help="N1,N2,N3,Sp,Sm")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--tspan", type=float, default=50.0)
        direction = p.add_mutually_exclusive_group()
        direction.add_argument("--backward", dest="direction", action="store_const", const="backward",
                               default="backward", help="Toward the singularity (default)")
        direction.add_argument("--forward", dest="direction", action="store_const", const="forward")
        p.add_argument("--integrator-config", default=None, help="JSON file with rtol, atol, max_step, method")

    kasner = actions("kasner", cmd_kasner, "Kasner and HL chord maps")
    p = kasner.add_parser("iterate", parents=[common], help="Itinerary of one initial angle")
    p.add_argument("--theta", type=float, required=True, help="Degrees")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--d", type=float, default=2.0)
    p.add_argument("--policy", default="error", choices=("error", "lexicographic", "seeded-random"))
    p = kasner.add_parser("ifs", parents=[common], help="IFS image of an arc set")
    p.add_argument("--arcs", required=True, help="Degrees, e.g. 0:1,90:95")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--d", type=float, default=2.4)
    p.add_argument("--coverage", action="store_true", help="Also report steps to full coverage")
    p.add_argument("--show-near", action="store_true", help="SVG: draw near arcs instead of the image")
    p = kasner.add_parser("stats", parents=[common], help="Monte Carlo termination fraction")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--d", type=float, default=1.8)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        settings = load_settings(args.config)
        output = args.handler(args, settings)
    except ToolkitError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code

    if args.output:
        Path(args.output).write_text(output)
        print(f"Output: {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(output)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

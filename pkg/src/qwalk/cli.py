"""Command-line front end.

Exit status: 0 on success, 2 on invalid input or unwritable output,
3 when ``verify`` finds a quantity outside its tolerance.
"""

import argparse
import json
import os
import sys

from qwalk import density, limit_laws, spectral, verify
from qwalk._util import atomic_write, fmt, parse_number, parse_real
from qwalk.lattice_walk import CoinSpec, evolve, make_initial

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BREACH = 3

SPINOR_TOL = 1e-9

DEFAULT_INIT = {
    2: "1/sqrt(2),i/sqrt(2)",
    3: "1/sqrt(3),i/sqrt(3),i/sqrt(3)",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _coin(args):
    if args.coin == "grover":
        return CoinSpec.grover()
    theta = parse_real(args.theta)
    return CoinSpec(args.coin, theta)


def _spinor(args, dim):
    text = args.init or DEFAULT_INIT[dim]
    parts = [parse_number(p) for p in text.split(",")]
    if len(parts) != dim:
        raise UsageError(f"--init needs {dim} components for this coin, got {len(parts)}")
    norm = sum(abs(z) ** 2 for z in parts)
    if abs(norm - 1.0) > SPINOR_TOL:
        raise UsageError(f"--init is not normalized (|psi|^2 = {norm!r})")
    return parts


def _entry(text):
    try:
        j1, j2 = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--entry expects 'j1,j2', got {text!r}") from None
    return j1, j2


def _initial(args):
    coin = _coin(args)
    spinor = _spinor(args, coin.dim)
    state = make_initial(coin.dim, args.position, spinor, tol=SPINOR_TOL)
    return coin, spinor, state


def _emit(args, text):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(args.output, text)


def cmd_evolve(args):
    coin, _, state = _initial(args)
    _emit(args, evolve(state, coin, args.steps).to_csv())


def cmd_prob(args):
    coin, _, state = _initial(args)
    _emit(args, density.probability_csv(evolve(state, coin, args.steps)))


def cmd_density(args):
    coin, _, state = _initial(args)
    _emit(args, density.density_csv(evolve(state, coin, args.steps)))


def cmd_interference(args):
    coin, _, state = _initial(args)
    if args.steps < 1:
        raise UsageError("interference profiles need --steps >= 1")
    j1, j2 = _entry(args.entry)
    _emit(args, density.interference_csv(evolve(state, coin, args.steps), j1, j2))


def _laws(coin, spinor, entry):
    """(real law, imaginary law) for an off-diagonal entry, or (g, None) for 'diag'."""
    if coin.dim == 2:
        if entry == "diag":
            return limit_laws.make_g(coin, *spinor), None
        if _entry(entry) != (0, 1):
            raise UsageError("2-state limit laws exist for entry 0,1 only")
        return limit_laws.make_f_2state(coin, *spinor)
    if entry == "diag":
        raise UsageError("no closed-form position law is provided for the Grover walk")
    coeffs = limit_laws.grover_coefficients(*spinor)
    return limit_laws.make_f_3state(coeffs, *_entry(entry))


def cmd_limit(args):
    coin, spinor, _ = _initial(args)
    if args.law == "g":
        law, _ = _laws(coin, spinor, "diag")
    else:
        re_law, im_law = _laws(coin, spinor, args.entry)
        law = re_law if args.law == "fR" else im_law
    _emit(args, limit_laws.law_table_csv(law, args.points))


def cmd_moments(args):
    coin, spinor, state = _initial(args)
    state = evolve(state, coin, args.steps)
    if args.entry == "diag":
        values = {r: complex(density.moment(state, r)) for r in range(args.r_max + 1)} if state.t else {}
        entry = "diag"
    else:
        j1, j2 = _entry(args.entry)
        series = density.moment_series(state, j1, j2, args.r_max) if state.t else None
        values = series.values if series else {}
        entry = [j1, j2]
    laws = _laws(coin, spinor, args.entry) if (coin.dim == 2 or args.entry != "diag") else (None, None)
    limit = {}
    if laws[0] is not None:
        for r in range(args.r_max + 1):
            re = limit_laws.moment_of_law(laws[0], r)
            im = limit_laws.moment_of_law(laws[1], r) if laws[1] is not None else 0.0
            limit[str(r)] = {"re": fmt(re), "im": fmt(im)}
    data = {
        "entry": entry,
        "t": state.t,
        "values": {str(r): {"re": fmt(z.real), "im": fmt(z.imag)} for r, z in values.items()},
        "limit": limit,
    }
    _emit(args, json.dumps(data, indent=2) + "\n")


def cmd_bands(args):
    coin = _coin(args)
    _emit(args, spectral.band_csv(spectral.FourierSymbol(coin), args.points))


def cmd_verify(args):
    name = args.scenario
    if name in verify.SCENARIOS:
        scen = verify.SCENARIOS[name]
        report = verify.run_scenario(scen, args.steps, args.r_max)
        text, ok = report.to_json(), report.passed
    elif name == "custom":
        coin = _coin(args)
        spinor = _spinor(args, coin.dim)
        scen = verify.Scenario("custom", coin, tuple(spinor), args.steps or 1000)
        report = verify.run_scenario(scen, args.steps, args.r_max)
        text, ok = report.to_json(), report.passed
    elif name == "grover-localization":
        ev = verify.check_localization(verify.SCENARIOS["grover-interference"].spinor)
        text, ok = ev.to_json(), ev.passed
    elif name == "hadamard-cross-term":
        scen = verify.SCENARIOS["thm2-fig2"]
        ev = verify.check_cross_term_decay(scen.coin, scen.spinor)
        text, ok = ev.to_json(), ev.passed
    else:
        raise UsageError(f"unknown scenario {name!r}")
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        if os.path.exists(args.output):
            raise UsageError(f"report {args.output} already exists; reports are never overwritten")
        atomic_write(args.output, text)
    return EXIT_OK if ok else EXIT_BREACH


def build_parser():
    parser = _Parser(prog="qwalk", description="Quantum walks on the line: interference terms and limit laws.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def walk_opts(p, steps=True):
        p.add_argument("--coin", choices=["A", "B", "grover"], default="A")
        p.add_argument("--theta", default="pi/4", help="coin angle, e.g. pi/4 (2-state coins)")
        p.add_argument("--init", help="comma-separated complex components, e.g. '1/sqrt(2),i/sqrt(2)'")
        p.add_argument("--position", type=int, default=0)
        if steps:
            p.add_argument("--steps", type=int, default=0)
        p.add_argument("-o", "--output", help="output file (default: stdout)")

    p = sub.add_parser("evolve", help="amplitude CSV at time --steps")
    walk_opts(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("prob", help="probability distribution CSV")
    walk_opts(p)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("density", help="all density-matrix entries as CSV")
    walk_opts(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("interference", help="x/t against Re/Im of one entry")
    walk_opts(p)
    p.add_argument("--entry", default="0,1")
    p.set_defaults(func=cmd_interference)

    p = sub.add_parser("limit", help="tabulate a limit law")
    walk_opts(p, steps=False)
    p.add_argument("--law", choices=["g", "fR", "fI"], default="g")
    p.add_argument("--entry", default="0,1")
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("moments", help="rescaled sums and their limits as JSON")
    walk_opts(p)
    p.add_argument("--entry", default="0,1", help="'j1,j2' or 'diag' for E[(X_t/t)^r]")
    p.add_argument("--r-max", type=int, default=4)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("bands", help="eigenvalues and group velocities of the Fourier symbol")
    p.add_argument("--coin", choices=["A", "B", "grover"], default="A")
    p.add_argument("--theta", default="pi/4")
    p.add_argument("--points", type=int, default=1025)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("verify", help="finite-time vs limit comparison report")
    walk_opts(p, steps=False)
    p.add_argument(
        "--scenario", default="thm2-fig2",
        help="thm2-fig2, grover-interference, grover-localization, hadamard-cross-term or custom",
    )
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--r-max", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    for p in sub.choices.values():
        p.add_argument("--nodes", type=int, help="k-node count for k-space quadratures")
        p.add_argument("--quad-tol", type=float, help="absolute quadrature tolerance")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.quad_tol is not None:
            os.environ["QWALK_QUAD_TOL"] = repr(args.quad_tol)
        if args.nodes is not None:
            spectral.DEFAULT_NODES = args.nodes
        if getattr(args, "steps", None) is not None and args.steps < 0:
            raise UsageError("--steps must be non-negative")
        status = args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())

"""``polarcat`` command line: construct, simulate, optimize, sweep.

Single results are printed as JSON, sweeps as CSV. Every output carries the
resolved configuration, the library version and the seed; CSV output puts
them on a leading ``#`` comment line ahead of the header row.

Bit-channel indices in the output are 1-based.

Exit codes: 0 ok, 2 usage error, 3 infeasible design, 4 truncated simulation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .bch import OuterCode, UsageError, bch_construct
from .channel import AwgnSpec, discretize_rayleigh
from .frame import ConcatenatedScheme
from .galois import ConfigurationError, poly_str
from .optimize import (ConstrainedMac, ConstrainedPhy, Fading, FixedPolarLength, SearchOptions,
                       TargetFsr, design_sc_baseline, find_optimal)
from .polar import polar_construct
from .simulate import ROW_FIELDS, SimPlan, result_row, run_sim

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_TRUNCATED = 0, 2, 3, 4

SWEEP_FIELDS = ("snr_db", "l_phy", "l_mac", "n_p", "k_p", "n_o", "k_o", "t_o", "beta",
                "L_PHY", "L_MAC", "fsr_analytic", "throughput_analytic",
                "fsr", "ci_lo", "ci_hi", "throughput", "frames", "seed")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _default_seed() -> int:
    raw = os.environ.get("POLARCAT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"POLARCAT_SEED must be an integer, got {raw!r}")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _envelope(args, body: dict) -> dict:
    return {"tool": "polarcat", "version": __version__, "seed": args.seed,
            "config": _config(args), **body}


def _emit_json(args, body: dict) -> None:
    _write(args, json.dumps(_envelope(args, body), indent=2, sort_keys=False) + "\n")


def _emit_csv(args, fields, rows) -> None:
    buf = io.StringIO()
    meta = {"tool": "polarcat", "version": __version__, "seed": args.seed, "config": _config(args)}
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(v) for k, v in row.items()})
    _write(args, buf.getvalue())


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- scheme helpers --------------------------------------------------------

def _outer(n_o: int | None, t_o: int | None, lift: bool = False) -> OuterCode:
    if n_o is None or t_o is None:
        raise UsageError("--no and --to are required")
    m = (n_o + 1).bit_length() - 1
    if n_o + 1 != 1 << m:
        raise UsageError(f"n_o must be 2^m - 1, got {n_o}")
    code = bch_construct(m, t_o, lift)
    if code is None:
        raise UsageError(f"no BCH code with n_o={n_o}, t_o={t_o}")
    return code


def _scheme_from_flags(args, design_snr: float) -> ConcatenatedScheme:
    if args.np is None or args.kp is None:
        raise UsageError("--np and --kp are required")
    polar = polar_construct(args.np, args.kp, design_snr)
    if args.decoder == "sc" and args.no is None:
        outer = OuterCode.identity(args.ncw)
    else:
        outer = _outer(args.no, args.to)
    return ConcatenatedScheme(polar, outer, args.beta)


def _channel(args, snr: float):
    if args.channel == "rayleigh":
        return discretize_rayleigh(snr, args.states)
    return AwgnSpec(snr)


def _snr_points(args) -> list[float]:
    if args.snr_grid:
        return list(args.snr_grid)
    value = args.avg_snr_db if args.channel == "rayleigh" and args.avg_snr_db is not None else args.snr_db
    if value is None:
        raise UsageError("give --snr-db, --avg-snr-db or --snr-grid")
    return [value]


# -- subcommands -----------------------------------------------------------

def cmd_construct(args) -> int:
    if args.np is None or args.kp is None or args.snr_db is None:
        raise UsageError("--np, --kp and --snr-db are required")
    code = polar_construct(args.np, args.kp, args.snr_db)
    body = {"polar": {
        "n_p": code.n_p, "k_p": code.k_p, "rate": code.rate,
        "frozen_set": [int(i) + 1 for i in code.frozen_set],
        "frozen_values": [int(b) for b in code.frozen_values[code.frozen_set]],
        "w": [int(i) + 1 for i in code.w],
        "eps": [float(e) for e in code.eps],
        "info_set": [int(i) + 1 for i in code.info_positions],
    }}
    if args.no is not None or args.to is not None:
        outer = _outer(args.no, args.to, args.lift_t_bound)
        body["outer"] = {"n_o": outer.n_o, "k_o": outer.k_o, "t_o": outer.t_o,
                         "rate": outer.rate, "generator_poly": poly_str(outer.generator_poly),
                         "generator_hex": hex(outer.generator_poly)}
    _emit_json(args, body)
    return EXIT_OK


def cmd_simulate(args) -> int:
    points = _snr_points(args)
    design = args.design_snr_db if args.design_snr_db is not None else points[0]
    scheme = _scheme_from_flags(args, design)
    rows, truncated = [], False
    for snr in points:
        plan = SimPlan(scheme, _channel(args, snr), args.decoder, args.frames, args.seed,
                       args.stop, args.ci_target, workers=args.workers)
        res = run_sim(plan)
        truncated |= res.truncated
        rows.append(result_row(plan, res))
    _emit_csv(args, ROW_FIELDS, rows)
    return EXIT_TRUNCATED if truncated else EXIT_OK


def _constraint(args, l_phy=None, l_mac=None, snr=None):
    scen = args.scenario
    l_phy = args.lphy if l_phy is None else l_phy
    l_mac = args.lmac if l_mac is None else l_mac
    if scen == "fixed-np":
        if args.np is None:
            raise UsageError("--np is required for fixed-np")
        return FixedPolarLength(args.np, args.no_max)
    if scen == "phy":
        if l_phy is None:
            raise UsageError("--lphy is required for phy")
        return ConstrainedPhy(l_phy, args.no_min, args.np)
    if scen == "mac":
        if l_mac is None:
            raise UsageError("--lmac is required for mac")
        return ConstrainedMac(l_mac, args.np_max, args.no_max)
    if scen == "target-fsr":
        if l_mac is None or args.fsr_target is None:
            raise UsageError("--lmac and --fsr-target are required for target-fsr")
        return TargetFsr(args.fsr_target, l_mac, args.np_max, args.no_max)
    # fading: inner constraint is fixed-np or phy
    avg = snr if snr is not None else (args.avg_snr_db if args.avg_snr_db is not None else args.snr_db)
    if avg is None:
        raise UsageError("--avg-snr-db is required for fading")
    spec = discretize_rayleigh(avg, args.states)
    if l_phy is not None:
        inner = ConstrainedPhy(l_phy, args.no_min, args.np)
    elif args.np is not None:
        inner = FixedPolarLength(args.np, args.no_max)
    else:
        raise UsageError("fading needs --np or --lphy")
    return Fading(inner, spec)


def _options(args) -> SearchOptions:
    return SearchOptions(fsr_mode=args.fsr_mode, lift_t_bound=args.lift_t_bound,
                         all_betas=args.all_betas, record=bool(args.dump_candidates),
                         workers=args.workers)


def _design(args, snr, l_phy=None, l_mac=None):
    if args.decoder == "sc":
        if args.scenario != "phy" or args.np is None:
            raise UsageError("--decoder sc designs need --scenario phy and --np")
        budget = args.lphy if l_phy is None else l_phy
        if budget is None:
            raise UsageError("--lphy is required for phy")
        return design_sc_baseline(args.np, budget // args.np, snr)
    return find_optimal(_constraint(args, l_phy, l_mac, snr), snr, _options(args))


def _optimize_snr(args) -> float:
    if args.scenario == "fading":
        value = args.avg_snr_db if args.avg_snr_db is not None else args.snr_db
    else:
        value = args.snr_db
    if value is None:
        raise UsageError("--snr-db is required" if args.scenario != "fading" else "--avg-snr-db is required")
    return value


def _dump(path: str, candidates) -> None:
    fields = ("n_p", "k_p", "n_o", "k_o", "t_o", "beta", "L_PHY", "fsr", "T")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in candidates:
            w.writerow({k: _fmt(v) for k, v in row.items()})


def cmd_optimize(args) -> int:
    result = _design(args, _optimize_snr(args))
    if args.dump_candidates:
        _dump(args.dump_candidates, result.candidates)
    body = {"result": result.to_dict()}
    if not result.feasible:
        body["result"]["reason"] = "no candidate satisfies the constraint"
    _emit_json(args, body)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _measured_throughput_args(args, scheme, l_phy, l_mac):
    """(payload_len, l_phy_budget) matching the scenario's throughput definition."""
    if args.decoder == "sc" or args.scenario == "phy":
        return scheme.l_mac, l_phy
    if args.scenario in ("mac", "target-fsr"):
        return l_mac, scheme.l_phy
    return None, None


def cmd_sweep(args) -> int:
    grid = []
    if args.lphy_grid:
        grid = [(_optimize_snr(args), l, None) for l in args.lphy_grid]
    elif args.lmac_grid:
        grid = [(_optimize_snr(args), None, l) for l in args.lmac_grid]
    elif args.snr_grid:
        grid = [(s, None, None) for s in args.snr_grid]
    else:
        raise UsageError("give --snr-grid, --lphy-grid or --lmac-grid")
    rows, truncated, infeasible = [], False, False
    for snr, l_phy, l_mac in grid:
        l_phy = args.lphy if l_phy is None else l_phy
        l_mac = args.lmac if l_mac is None else l_mac
        result = _design(args, snr, l_phy, l_mac)
        row = {"snr_db": snr, "l_phy": l_phy, "l_mac": l_mac, "seed": args.seed}
        if not result.feasible:
            infeasible = True
            rows.append(row)
            continue
        scheme = result.scheme
        row.update(scheme.describe())
        row.update(fsr_analytic=result.fsr, throughput_analytic=result.throughput)
        if args.frames > 0:
            payload, budget = _measured_throughput_args(args, scheme, l_phy, l_mac)
            channel = discretize_rayleigh(snr, args.states) \
                if args.scenario == "fading" or args.channel == "rayleigh" else AwgnSpec(snr)
            plan = SimPlan(scheme, channel, args.decoder, args.frames, args.seed, args.stop,
                           args.ci_target, payload_len=payload, l_phy_budget=budget,
                           workers=args.workers)
            res = run_sim(plan)
            truncated |= res.truncated
            row.update(fsr=res.fsr, ci_lo=res.ci_lo, ci_hi=res.ci_hi,
                       throughput=res.throughput, frames=res.frames)
        rows.append(row)
    _emit_csv(args, SWEEP_FIELDS, rows)
    if truncated:
        return EXIT_TRUNCATED
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


# -- parser ----------------------------------------------------------------

def _add_common(p, seed):
    p.add_argument("--seed", type=int, default=seed, help="master seed (default: $POLARCAT_SEED or 0)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")


def _add_scheme(p):
    p.add_argument("--np", type=int, help="polar code length")
    p.add_argument("--kp", type=int, help="polar message length")
    p.add_argument("--no", type=int, help="outer BCH length 2^m - 1")
    p.add_argument("--to", type=int, help="outer BCH error-correction capability")
    p.add_argument("--lift-t-bound", action="store_true", help="admit t_o >= 2^(m-2)")


def _add_channel(p):
    p.add_argument("--channel", choices=("awgn", "rayleigh"), default="awgn")
    p.add_argument("--snr-db", type=float)
    p.add_argument("--avg-snr-db", type=float)
    p.add_argument("--states", type=int, default=64, help="fading states for design")
    p.add_argument("--snr-grid", type=_float_list)


def _add_sim(p):
    p.add_argument("--frames", type=int, default=10_000)
    p.add_argument("--decoder", choices=("fec", "sc"), default="fec")
    p.add_argument("--stop", choices=("fixed", "ci"), default="fixed")
    p.add_argument("--ci-target", type=float, default=0.05)


def _add_design(p):
    p.add_argument("--scenario", required=True, choices=("fixed-np", "phy", "mac", "target-fsr", "fading"))
    p.add_argument("--lphy", type=int)
    p.add_argument("--lmac", type=int)
    p.add_argument("--fsr-target", type=float)
    p.add_argument("--fsr-mode", choices=("exact", "bound"), default="exact")
    p.add_argument("--no-min", type=int, default=7)
    p.add_argument("--no-max", type=int, default=511)
    p.add_argument("--np-max", type=int, default=512)
    p.add_argument("--all-betas", action="store_true", help="phy: also evaluate smaller beta")
    p.add_argument("--dump-candidates", metavar="PATH", help="write every evaluated candidate as CSV")


def build_parser(seed: int = 0) -> argparse.ArgumentParser:
    parser = _Parser(prog="polarcat", description="Polar/BCH concatenated codes.")
    parser.add_argument("--version", action="version", version=f"polarcat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="describe a polar code and optional outer code")
    _add_scheme(p)
    p.add_argument("--snr-db", type=float)
    _add_common(p, seed)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo FSR of a fixed scheme")
    _add_scheme(p)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--ncw", type=int, default=511, help="blocks per frame for --decoder sc")
    p.add_argument("--design-snr-db", type=float, help="SNR used to pick the information set")
    _add_channel(p)
    _add_sim(p)
    _add_common(p, seed)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="exhaustive throughput-optimal design")
    _add_design(p)
    p.add_argument("--np", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--avg-snr-db", type=float)
    p.add_argument("--states", type=int, default=64)
    p.add_argument("--decoder", choices=("fec", "sc"), default="fec")
    p.add_argument("--lift-t-bound", action="store_true")
    _add_common(p, seed)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimize (and optionally simulate) over a grid")
    _add_design(p)
    p.add_argument("--np", type=int)
    p.add_argument("--lphy-grid", type=_int_list)
    p.add_argument("--lmac-grid", type=_int_list)
    p.add_argument("--lift-t-bound", action="store_true")
    _add_channel(p)
    _add_sim(p)
    p.set_defaults(frames=0)
    _add_common(p, seed)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser(_default_seed()).parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"polarcat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

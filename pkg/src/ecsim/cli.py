"""Command-line interface.

    ecsim steady    --net circuit.net [--tol X] [--max-nr N] [--out file]
    ecsim transient --net circuit.net [--dt S] [--tend S] [--tol X]
                    [--max-nr N] [--out file]
    ecsim compare   --net circuit.net [--dt S] [--tend S] [--tol X]
                    [--max-nr N] [--out file]

Netlist analysis directives supply defaults; flags override. Exit codes:
0 success, 1 solver failure, 2 parse/validation failure, 3 comparison
tolerance failure.
"""

import argparse
import sys

from .compare import format_report, run_compare
from .errors import EcsimError, NetlistError
from .linalg import NewtonConfig
from .netlist import load_netlist
from .output import write_waveforms
from .steady import solve_power_flow
from .transient import TimeGrid, run_transient

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_NETLIST = 2
EXIT_MISMATCH = 3


def _add_common(p, timed):
    p.add_argument("--net", required=True, help="netlist file")
    p.add_argument("--tol", type=float, help="Newton-Raphson tolerance")
    p.add_argument("--max-nr", type=int, dest="max_nr",
                   help="Newton-Raphson iteration cap (1 = single-solve mode)")
    p.add_argument("--out", help="output CSV file")
    if timed:
        p.add_argument("--dt", type=float, help="time step in seconds")
        p.add_argument("--tend", type=float, help="end time in seconds")


def _newton_config(args, spec):
    tol = args.tol if args.tol is not None else (spec.tol if spec else 1e-9)
    max_nr = args.max_nr if args.max_nr is not None else (spec.max_nr if spec else 50)
    return NewtonConfig(abs_tolerance=tol, max_iterations=max_nr)


def _grid(args, spec):
    dt = args.dt if args.dt is not None else (spec.dt if spec else 1e-4)
    t_end = args.tend if args.tend is not None else (spec.t_end if spec else None)
    if t_end is None:
        print("error: transient needs --tend or a netlist tend=", file=sys.stderr)
        return None
    t_start = spec.t_start if spec else 0.0
    return TimeGrid(t_start, t_end, dt)


def _steady_lines(netlist, sol):
    lines = []
    for name, v in sol.node_voltages.items():
        lines.append((f"v({name}).re", v.re))
        lines.append((f"v({name}).im", v.im))
    for name, i in sol.branch_currents.items():
        lines.append((f"i({name}).re", i.re))
        lines.append((f"i({name}).im", i.im))
    for name, q in sol.q_generators.items():
        lines.append((f"{name}.q", q))
    for name, m in sol.motors.items():
        for key in ("i_ds", "i_qs", "i_dr", "i_qr", "omega_r", "torque"):
            lines.append((f"{name}.{key}", m[key]))
    return lines


def cmd_steady(args):
    netlist = load_netlist(args.net)
    cfg = _newton_config(args, netlist.analysis)
    sol = solve_power_flow(netlist.circuit(), cfg)
    lines = _steady_lines(netlist, sol)
    width = max(len(k) for k, _ in lines)
    for key, val in lines:
        print(f"{key:<{width}}  {val:.9g}")
    print(f"converged in {sol.report.iterations_used} iterations "
          f"(residual {sol.report.final_residual_norm:.3e})")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("quantity,value\n")
            for key, val in lines:
                fh.write(f"{key},{val!r}\n")
    return EXIT_OK


def cmd_transient(args):
    netlist = load_netlist(args.net)
    cfg = _newton_config(args, netlist.analysis)
    grid = _grid(args, netlist.analysis)
    if grid is None:
        return EXIT_NETLIST
    waves = run_transient(netlist.circuit(), grid, cfg)
    if args.out:
        write_waveforms(waves, args.out)
        print(f"wrote {len(waves)} points x {len(waves.names)} signals to {args.out}")
    else:
        width = max(len(n) for n in waves.names)
        print(f"final values at t = {waves.time[-1]:g} s:")
        for name in waves.names:
            print(f"{name:<{width}}  {waves.final(name):.9g}")
    return EXIT_OK


def cmd_compare(args):
    netlist = load_netlist(args.net)
    report = run_compare(netlist, dt=args.dt, t_end=args.tend,
                         tol=args.tol, max_nr=args.max_nr)
    print(format_report(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("quantity,steady,transient,abs_diff,rel_diff\n")
            for r in report.rows:
                fh.write(f"{r.quantity},{r.steady!r},{r.transient!r},"
                         f"{r.abs_diff!r},{r.rel_diff!r}\n")
    return EXIT_OK if report.matched else EXIT_MISMATCH


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="ecsim",
        description="equivalent-circuit steady-state and transient simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("steady", help="phasor steady-state solve"), False)
    _add_common(sub.add_parser("transient", help="trapezoidal time-domain run"), True)
    _add_common(sub.add_parser("compare", help="steady vs transient agreement"), True)
    args = parser.parse_args(argv)

    handler = {"steady": cmd_steady, "transient": cmd_transient,
               "compare": cmd_compare}[args.command]
    try:
        return handler(args)
    except NetlistError as exc:
        print(f"netlist error: {exc}", file=sys.stderr)
        return EXIT_NETLIST
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NETLIST
    except EcsimError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

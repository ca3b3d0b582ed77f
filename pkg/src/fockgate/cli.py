"""Command-line front end: simulate, truth-table, design, sweep, check.

Exit statuses: 0 success, 2 configuration/input error, 3 netlist or
physics validation error, 4 acceptance-check failure in check mode.
All angles are radians; qubit amplitudes are complex pairs "re,im"
joined by ':' (alpha:beta).  Outputs are deterministic: identical
configurations produce byte-identical tables.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import acceptance
from .design import (
    DIMENSIONS,
    CouplerPhysics,
    enumerate_v_perfect_lengths,
    solve_coupler_length,
    tolerance_sweep,
)
from .gate import (
    BASIS_LABELS,
    Netlist,
    NetlistError,
    ProgramState,
    default_netlist,
    extract_gate,
    prepare_input,
    run_heralded,
)
from .io import (
    PhysicsError,
    format_complex,
    format_number,
    load_netlist,
    load_physics,
    render_csv,
    write_csv,
    write_svg_line_plot,
)


class ConfigError(Exception):
    """Bad invocation or unreadable input; maps to exit status 2."""


def parse_qubit(text: str) -> tuple[complex, complex]:
    """Parse 're,im:re,im' into (alpha, beta)."""
    try:
        parts = text.split(":")
        if len(parts) != 2:
            raise ValueError("expected two components separated by ':'")
        amps = []
        for part in parts:
            re_s, im_s = part.split(",")
            amps.append(complex(float(re_s), float(im_s)))
        return amps[0], amps[1]
    except ValueError as exc:
        raise ConfigError(f"cannot parse qubit amplitudes {text!r}: {exc}") from exc


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo_s, hi_s = text.split(":")
        return float(lo_s), float(hi_s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse range {text!r} (expected LO:HI)") from exc


def _load_netlist(path: str | None) -> Netlist:
    if path is None:
        return default_netlist()
    p = Path(path)
    try:
        text_exists = p.is_file()
    except OSError:
        text_exists = False
    if not text_exists:
        raise ConfigError(f"netlist file not readable: {path}")
    return load_netlist(p)


def _load_physics(path: str | None) -> CouplerPhysics:
    if path is None:
        return CouplerPhysics()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"physics file not readable: {path}")
    return load_physics(p)


def cmd_simulate(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    target = parse_qubit(args.target)
    control = parse_qubit(args.control)
    try:
        state = prepare_input(netlist, target, control, ProgramState(args.phi))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    branch, prob = run_heralded(netlist, state)
    result = extract_gate(netlist, args.phi)

    print(f"program phase phi = {format_number(args.phi)} rad")
    print(f"herald probability = {format_number(prob)}")
    print("heralded output state (sub-normalized):")
    mode_labels = [repr(m) for m in branch.modes]
    for vec, amp in branch.items():
        occupied = [
            f"{mode_labels[i]}" + (f"^{n}" if n > 1 else "")
            for i, n in enumerate(vec)
            if n > 0
        ]
        label = " ".join(occupied) if occupied else "vacuum"
        print(f"  {format_complex(amp):>32}  |{label}>")
    print(f"extracted controlled phase = {format_number(result.measured_phase)} rad")
    print(f"process fidelity vs ideal = {format_number(result.fidelity)}")

    if args.output:
        header = ["phi_rad", "herald_probability", "measured_phase_rad", "fidelity"]
        row = [args.phi, prob, result.measured_phase, result.fidelity]
        write_csv(args.output, header, [row])
        print(f"wrote {args.output}")
    return 0


def cmd_truth_table(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    result = extract_gate(netlist, args.phi)
    print(f"heralded operator columns (inputs |00>,|01>,|10>,|11>), phi = "
          f"{format_number(args.phi)} rad:")
    for i in range(4):
        row = "  ".join(f"{format_complex(result.operator[i, j]):>28}" for j in range(4))
        print(f"  |{BASIS_LABELS[i]}>  {row}")
    print("per-input herald probability:")
    rows = []
    for label in BASIS_LABELS:
        prob = result.herald_probability[label]
        print(f"  |{label}>  {format_number(prob)}")
        rows.append(
            [label, prob]
            + [result.operator[i, BASIS_LABELS.index(label)] for i in range(4)]
        )
    diag_ok = result.max_offdiagonal < 1e-10
    print(f"off-diagonal magnitudes < 1e-10: {'pass' if diag_ok else 'FAIL'} "
          f"(max {result.max_offdiagonal:.3e})")
    print(f"measured controlled phase = {format_number(result.measured_phase)} rad")
    print(f"process fidelity vs ideal = {format_number(result.fidelity)}")
    if args.output:
        header = [
            "input_basis",
            "herald_probability",
            "amp_out_00",
            "amp_out_01",
            "amp_out_10",
            "amp_out_11",
        ]
        write_csv(args.output, header, rows)
        print(f"wrote {args.output}")
    return 0


DESIGN_PRESETS = {
    # element: (bar_h target, bar_v target, weight_h, weight_v, default range)
    "pbs": (1.0, 0.0, 1.0, 1e6, (60.0, 80.0)),
    "ppbs": (1.0, 1.0 / 3.0, 1.0, 1.0, (30.0, 40.0)),
    "f1": (0.25, 0.0, 1.0, 0.0, (5.0, 20.0)),
}

NOMINAL_LENGTHS = {"pbs": 70.72, "ppbs": 35.90, "f1": 12.00, "f2": 83.20}


def cmd_design(args: argparse.Namespace) -> int:
    physics = _load_physics(args.physics)
    nominal = NOMINAL_LENGTHS[args.element]
    rows = []
    if args.element == "f2":
        length_range = parse_range(args.range) if args.range else (80.0, 90.0)
        candidates = enumerate_v_perfect_lengths(physics, length_range)
        print(f"V-preserving filter lengths in [{length_range[0]}, {length_range[1]}] um "
              f"(bar_H target 1/3):")
        for rank, sol in enumerate(candidates, start=1):
            print(
                f"  #{rank}  L = {format_number(sol.length_um)} um, "
                f"bar_H = {format_number(sol.bar_h)} "
                f"(residual vs 1/3: {format_number(sol.bar_h - 1/3)}), "
                f"bar_V = {format_number(sol.bar_v)}"
            )
            rows.append(
                [rank, sol.length_um, sol.bar_h, sol.bar_v, sol.residual,
                 nominal, sol.length_um - nominal]
            )
    else:
        t_h, t_v, w_h, w_v, default_range = DESIGN_PRESETS[args.element]
        length_range = parse_range(args.range) if args.range else default_range
        solutions = solve_coupler_length(
            physics,
            targets=(t_h, t_v),
            weights=(w_h, w_v),
            length_range=length_range,
            count=args.count,
        )
        print(
            f"ranked coupler lengths for {args.element} "
            f"(targets bar_H={format_number(t_h)}, bar_V={format_number(t_v)}, "
            f"range [{length_range[0]}, {length_range[1]}] um):"
        )
        for rank, sol in enumerate(solutions, start=1):
            delta = sol.length_um - nominal
            print(
                f"  #{rank}  L = {format_number(sol.length_um)} um, "
                f"bar_H = {format_number(sol.bar_h)}, "
                f"bar_V = {format_number(sol.bar_v)}, "
                f"residual = {format_number(sol.residual)}, "
                f"reference {format_number(nominal)} um "
                f"(delta {format_number(delta)} um)"
            )
            rows.append(
                [rank, sol.length_um, sol.bar_h, sol.bar_v, sol.residual,
                 nominal, delta]
            )
    if args.output:
        header = [
            "rank",
            "length_um",
            "bar_H_power",
            "bar_V_power",
            "residual",
            "reference_um",
            "delta_um",
        ]
        write_csv(args.output, header, rows)
        print(f"wrote {args.output}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    physics = _load_physics(args.physics)
    if not physics.configured(args.dimension):
        print(
            f"error: sensitivities for dimension {args.dimension!r} are all zero.\n"
            "Configure 'sensitivities_um_per_nm' in the physics JSON (um of "
            "beat-length shift per nm of geometry change) before sweeping.",
            file=sys.stderr,
        )
        return 2
    delta_range = parse_range(args.range) if args.range else (-10.0, 10.0)
    rows = tolerance_sweep(
        netlist, physics, args.dimension, delta_range, args.step, phi=args.phi
    )
    element_names = [name for name, _, _ in rows[0].element_bars]
    header = ["delta_nm"]
    for name in element_names:
        header += [f"{name}_bar_H", f"{name}_bar_V"]
    header += ["p_00", "p_01", "p_10", "p_11", "fidelity"]
    table = []
    for r in rows:
        row = [r.delta_nm]
        for _, bh, bv in r.element_bars:
            row += [bh, bv]
        row += list(r.herald_probabilities) + [r.fidelity]
        table.append(row)
    text = render_csv(header, table)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {args.output}")
    else:
        print(text, end="")
    if args.plot:
        deltas = [r.delta_nm for r in rows]
        write_svg_line_plot(
            args.plot,
            deltas,
            {
                "fidelity": [r.fidelity for r in rows],
                "herald probability (mean x 48)": [
                    48.0 * sum(r.herald_probabilities) / 4.0 for r in rows
                ],
            },
            title=f"gate response vs {args.dimension} deviation",
            xlabel="deviation (nm)",
            ylabel="fidelity / scaled probability",
        )
        print(f"wrote {args.plot}")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    results = acceptance.run_all(netlist, seed=args.seed)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failed += 1
    if failed:
        print(f"{failed} of {len(results)} acceptance criteria failed")
        return 4
    print(f"all {len(results)} acceptance criteria passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockgate",
        description=(
            "Heralded programmable-CPHASE gate workbench: Fock-state "
            "simulation plus directional-coupler design arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one heralded gate simulation")
    sim.add_argument("--phi", type=float, required=True, help="program phase (radians)")
    sim.add_argument("--target", required=True, help="target qubit 're,im:re,im'")
    sim.add_argument("--control", required=True, help="control qubit 're,im:re,im'")
    sim.add_argument("--netlist", help="netlist JSON (default: shipped circuit)")
    sim.add_argument("--output", help="write a result record CSV")
    sim.set_defaults(func=cmd_simulate)

    tt = sub.add_parser("truth-table", help="extract the heralded 4x4 operator")
    tt.add_argument("--phi", type=float, required=True)
    tt.add_argument("--netlist")
    tt.add_argument("--output", help="write per-input rows CSV")
    tt.set_defaults(func=cmd_truth_table)

    de = sub.add_parser("design", help="solve coupler lengths for an element")
    de.add_argument(
        "--element", required=True, choices=("pbs", "ppbs", "f1", "f2")
    )
    de.add_argument("--physics", help="physics JSON (default: shipped values)")
    de.add_argument("--range", help="length range LO:HI in um")
    de.add_argument("--count", type=int, default=3, help="solutions to report")
    de.add_argument("--output", help="write candidates CSV")
    de.set_defaults(func=cmd_design)

    sw = sub.add_parser("sweep", help="fabrication-tolerance sweep")
    sw.add_argument("--dimension", required=True, choices=DIMENSIONS)
    sw.add_argument("--physics", help="physics JSON with nonzero sensitivities")
    sw.add_argument("--netlist")
    sw.add_argument("--range", help="deviation range LO:HI in nm (default -10:10)")
    sw.add_argument("--step", type=float, default=1.0, help="grid step in nm")
    sw.add_argument("--phi", type=float, default=math.pi, help="program phase (radians)")
    sw.add_argument("--output", help="write sweep table CSV")
    sw.add_argument("--plot", help="write SVG line plot")
    sw.set_defaults(func=cmd_sweep)

    ck = sub.add_parser("check", help="run the acceptance suite")
    ck.add_argument("--netlist")
    ck.add_argument("--seed", type=int, default=7, help="seed for sampled diagnostics")
    ck.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NetlistError, PhysicsError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

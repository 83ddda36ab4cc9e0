"""Command-line front end: single energies, tables, convergence, Omega scans, wave functions.

Every command writes a CSV file and a JSON summary echoing its inputs into
``--out``.  Settings come from (lowest to highest priority) built-in
defaults, a JSON ``--config`` file with flag-named keys, and flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .hierarchy import GAUGES, MAX_ORDER, OscillatorSpec, solve_hierarchy, wavefunction
from .observables import QuadratureSettings, error_metric
from .oracle import compare_wavefunction, numerov_solve
from .pms import PmsError, pms_direct_orders, pms_variational_orders, resolve_bracket, scan_omega
from .reference import BLOCH_VALUES, CASES, POTENTIAL_NAMES, TABLE_ORDER, TABLE_VALUES, case_spec, lookup

log = logging.getLogger("anharmonic")

DEFAULTS = {
    "potential": 2,
    "mass": 0.5,
    "omega": 2.0,
    "mu": 8.0,
    "hbar": 1.0,
    "state": 0,
    "order": 15,
    "estimator": "variational",
    "bracket": "auto",
    "points": 64,
    "gauge": "origin",
    "dps": 32,
    "rel_tol": 1e-13,
    "out": "results",
}


@dataclass
class RunConfig:
    spec: OscillatorSpec
    state_n: int = 0
    order: int = 15
    estimator: str = "variational"
    omega_bracket: tuple[float, float] | str = "auto"
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    output_dir: Path = Path("results")
    points: int = 64
    gauge: str = "origin"
    dps: int = 32

    def __post_init__(self):
        if self.state_n not in (0, 1):
            raise ValueError(f"--state must be 0 or 1, got {self.state_n}")
        if not 0 <= self.order <= MAX_ORDER:
            raise ValueError(f"--order must lie in 0..{MAX_ORDER}, got {self.order}")
        if self.estimator not in ("direct", "variational"):
            raise ValueError(f"--estimator must be direct or variational, got {self.estimator!r}")
        if self.gauge not in GAUGES:
            raise ValueError(f"--gauge must be one of {GAUGES}, got {self.gauge!r}")
        if self.points < 16:
            raise ValueError("--points must be at least 16")
        self.omega_bracket = resolve_bracket(self.spec, self.omega_bracket)

    def echo(self) -> dict:
        d = asdict(self)
        d["output_dir"] = str(self.output_dir)
        d["omega_bracket"] = list(self.omega_bracket)
        return d


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_summary(path: Path, command: str, config: RunConfig, extra_inputs: dict, results: dict) -> None:
    payload = {"command": command, "inputs": {**config.echo(), **extra_inputs}, "results": results}
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_fmt)
        fh.write("\n")


def _parse_bracket(text):
    if text is None or text == "auto" or isinstance(text, (list, tuple)):
        return text
    try:
        lo, hi = (float(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bracket must be 'lo,hi' or 'auto', got {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with flag-named keys")
    common.add_argument("--potential", type=int, dest="potential", metavar="N", help="anharmonic power 2N")
    common.add_argument("--mass", type=float)
    common.add_argument("--omega", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--hbar", type=float)
    common.add_argument("--state", type=int)
    common.add_argument("--order", type=int)
    common.add_argument("--estimator", choices=["direct", "variational"])
    common.add_argument("--bracket", type=_parse_bracket, help="lo,hi or auto")
    common.add_argument("--points", type=int, help="Omega grid points")
    common.add_argument("--gauge", choices=list(GAUGES))
    common.add_argument("--dps", type=int, help="decimal digits of the coefficient arithmetic")
    common.add_argument("--rel-tol", type=float, dest="rel_tol")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="anharmonic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("energy", parents=[common], help="PMS energies (direct, variational) and the Numerov value")
    p = sub.add_parser("table", parents=[common], help="six-energy table for a published case set")
    p.add_argument("--case", choices=sorted(CASES), default="beta2")
    p = sub.add_parser("convergence", parents=[common], help="PMS energies and errors versus order")
    p.add_argument("--max-order", type=int, dest="max_order", default=15)
    p.add_argument("--reference", choices=["oracle", "bloch"], default="oracle")
    sub.add_parser("scan", parents=[common], help="both estimators on a uniform Omega grid")
    p = sub.add_parser("wavefn", parents=[common], help="approximate vs numerical wave function")
    p.add_argument("--self-compare", action="store_true", dest="self_compare")
    p.add_argument("--stride", type=int, default=10, help="write every k-th grid point")
    return parser


def resolve_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    settings["bracket"] = _parse_bracket(settings["bracket"])
    return settings


def config_from(settings: dict) -> RunConfig:
    spec = OscillatorSpec(
        mass=float(settings["mass"]),
        omega=float(settings["omega"]),
        mu=float(settings["mu"]),
        N=int(settings["potential"]),
        hbar=float(settings["hbar"]),
    )
    return RunConfig(
        spec=spec,
        state_n=int(settings["state"]),
        order=int(settings["order"]),
        estimator=settings["estimator"],
        omega_bracket=settings["bracket"],
        quadrature=QuadratureSettings(rel_tol=float(settings["rel_tol"])),
        output_dir=Path(settings["out"]),
        points=int(settings["points"]),
        gauge=settings["gauge"],
        dps=int(settings["dps"]),
    )


def _variational(config: RunConfig, spec: OscillatorSpec, n: int, orders: list[int]):
    return pms_variational_orders(
        spec,
        n,
        orders,
        config.omega_bracket if spec == config.spec else None,
        points=config.points,
        zoom_points=config.points,
        settings=config.quadrature,
        gauge=config.gauge,
        dps=config.dps,
    )


def cmd_energy(config: RunConfig) -> dict:
    spec, n, m = config.spec, config.state_n, config.order
    var = _variational(config, spec, n, [m])[m]
    record = {
        "state": n,
        "order": m,
        "E_variational": var.energy.value,
        "Omega_variational": var.Omega_star,
        "E_direct": None,
        "Omega_direct": None,
        "direct_kind": None,
    }
    if m >= 1:
        direct = pms_direct_orders(spec, n, m, config.omega_bracket, config.points, config.gauge, config.dps)[m]
        record.update(E_direct=direct.energy.value, Omega_direct=direct.Omega_star, direct_kind=direct.kind)
    oracle = numerov_solve(spec, n)
    record["E_oracle"] = oracle.energy
    record["delta_variational"] = error_metric(record["E_variational"], oracle.energy)
    record["delta_direct"] = None if record["E_direct"] is None else error_metric(record["E_direct"], oracle.energy)
    header = [
        "state", "order", "N", "mass", "omega", "mu", "hbar",
        "E_direct", "Omega_direct", "E_variational", "Omega_variational",
        "E_oracle", "delta_direct", "delta_variational",
    ]  # fmt: skip
    row = [
        n, m, spec.N, spec.mass, spec.omega, spec.mu, spec.hbar,
        record["E_direct"], record["Omega_direct"], record["E_variational"], record["Omega_variational"],
        record["E_oracle"], record["delta_direct"], record["delta_variational"],
    ]  # fmt: skip
    write_csv(config.output_dir / "energy.csv", header, [row])
    write_summary(config.output_dir / "energy.json", "energy", config, {}, record)
    return record


TABLE_HEADER = [
    "case", "potential", "N", "mu", "state", "order", "E_variational", "Omega_star",
    "published_value", "published_abs_diff", "reference_value", "E_oracle", "delta_vs_reference",
]  # fmt: skip


def table_rows(config: RunConfig, case: str) -> list[list]:
    rows = []
    for N, mu in CASES[case]:
        spec = case_spec(case, N)
        for n in (0, 1):
            res = _variational(config, spec, n, [config.order])[config.order]
            oracle = numerov_solve(spec, n)
            published = TABLE_VALUES[(case, N, n)]
            ref = BLOCH_VALUES[(case, N, n)]
            e = res.energy.value
            rows.append([
                case, POTENTIAL_NAMES[N], N, mu, n, config.order, e, res.Omega_star,
                published, abs(e - float(published)), ref, oracle.energy, error_metric(e, float(ref)),
            ])  # fmt: skip
            log.info("%s N=%d n=%d: E=%.10f (published %s)", case, N, n, e, published)
    return rows


def cmd_table(config: RunConfig, case: str) -> list[list]:
    rows = table_rows(config, case)
    write_csv(config.output_dir / f"table_{case}.csv", TABLE_HEADER, rows)
    results = {f"N{r[2]}_n{r[4]}": {"E_variational": r[6], "published_value": r[8], "E_oracle": r[11]} for r in rows}
    write_summary(config.output_dir / f"table_{case}.json", "table", config, {"case": case}, results)
    return rows


def cmd_convergence(config: RunConfig, max_order: int, reference: str = "oracle") -> list[list]:
    if not 1 <= max_order <= MAX_ORDER:
        raise ValueError(f"--max-order must lie in 1..{MAX_ORDER}")
    spec, n = config.spec, config.state_n
    if reference == "bloch":
        printed = lookup(spec, n)
        if printed is None:
            raise ValueError("no tabulated reference for this oscillator; use --reference oracle")
        e_ref = float(printed)
    else:
        e_ref = numerov_solve(spec, n).energy
    orders = list(range(1, max_order + 1))
    var = _variational(config, spec, n, orders)
    direct = pms_direct_orders(spec, n, max_order, config.omega_bracket, config.points, config.gauge, config.dps)
    rows = []
    for k in orders:
        ed, ev = direct[k].energy.value, var[k].energy.value
        rows.append([
            k, direct[k].Omega_star, ed, var[k].Omega_star, ev,
            error_metric(ed, e_ref), error_metric(ev, e_ref), direct[k].kind,
        ])  # fmt: skip
    header = [
        "order", "Omega_direct", "E_direct", "Omega_variational", "E_variational",
        "delta_direct", "delta_variational", "direct_kind",
    ]  # fmt: skip
    write_csv(config.output_dir / "convergence.csv", header, rows)
    write_summary(
        config.output_dir / "convergence.json",
        "convergence",
        config,
        {"max_order": max_order, "reference": reference},
        {"E_reference": e_ref, "final_delta_variational": rows[-1][6], "final_delta_direct": rows[-1][5]},
    )
    return rows


def cmd_scan(config: RunConfig) -> list[list]:
    spec, n, m = config.spec, config.state_n, config.order
    lo, hi = config.omega_bracket
    kw = dict(settings=config.quadrature, gauge=config.gauge, dps=config.dps)
    direct = scan_omega(spec, n, m, "direct", lo, hi, config.points, **kw)
    var = scan_omega(spec, n, m, "variational", lo, hi, config.points, **kw)
    rows = [[w, ed, ev] for (w, ed), (_, ev) in zip(direct, var)]
    write_csv(config.output_dir / "scan.csv", ["Omega", "E_direct", "E_variational"], rows)
    i = int(np.nanargmin([r[2] for r in rows]))
    write_summary(
        config.output_dir / "scan.json", "scan", config, {}, {"grid_min_Omega": rows[i][0], "grid_min_E": rows[i][2]}
    )
    return rows


def cmd_wavefn(config: RunConfig, self_compare: bool = False, stride: int = 10) -> list[list]:
    spec, n, m = config.spec, config.state_n, config.order
    res = _variational(config, spec, n, [m])[m]
    sol = solve_hierarchy(spec, n, res.Omega_star, m, dps=config.dps, gauge=config.gauge)
    oracle = numerov_solve(spec, n)
    x = oracle.grid
    approx = wavefunction(sol, x)
    approx = approx / np.sqrt(2 * np.trapezoid(approx * approx, x))
    if np.dot(approx, oracle.psi) < 0:
        approx = -approx
    if self_compare:
        # The approximation plays the role of the numerical solution.
        target = replace(oracle, psi=approx)
        ratios = dict(compare_wavefunction(sol, target))
    else:
        target = oracle
        ratios = dict(compare_wavefunction(sol, oracle))
    reference = target.psi
    rows = []
    for i in range(0, len(x), max(stride, 1)):
        xv = float(x[i])
        rows.append([xv, approx[i], reference[i], ratios.get(xv)])
    write_csv(config.output_dir / "wavefn.csv", ["x", "psi_approx", "psi_oracle", "R"], rows)
    dev = max((abs(r - 1.0) for r in ratios.values()), default=0.0)
    write_summary(
        config.output_dir / "wavefn.json",
        "wavefn",
        config,
        {"self_compare": self_compare, "stride": stride},
        {"Omega_star": res.Omega_star, "max_abs_R_minus_1": dev, "E_oracle": oracle.energy},
    )
    return rows


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from(resolve_settings(args))
        if args.command == "energy":
            rec = cmd_energy(config)
            print(
                f"E_variational={rec['E_variational']:.12g} (Omega*={rec['Omega_variational']:.8g})  "
                f"E_direct={_fmt(rec['E_direct'])}  E_oracle={rec['E_oracle']:.12g}  "
                f"delta_var={rec['delta_variational']:.3e}%"
            )
        elif args.command == "table":
            for r in cmd_table(config, args.case):
                print(f"{r[1]:8s} n={r[4]}  E={r[6]:.10f}  published={r[8]}  reference={r[10]}  oracle={r[11]:.10f}")
        elif args.command == "convergence":
            for r in cmd_convergence(config, args.max_order, args.reference):
                print(f"order {r[0]:2d}  E_direct={r[2]:.10f}  E_var={r[4]:.10f}  d_dir={r[5]:.3e}  d_var={r[6]:.3e}")
        elif args.command == "scan":
            rows = cmd_scan(config)
            print(f"wrote {len(rows)} rows to {config.output_dir / 'scan.csv'}")
        elif args.command == "wavefn":
            rows = cmd_wavefn(config, args.self_compare, args.stride)
            print(f"wrote {len(rows)} rows to {config.output_dir / 'wavefn.csv'}")
    except (ValueError, PmsError, RuntimeError, OSError) as exc:
        print(f"anharmonic: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: ``cliffordtori <command> [options]``.

Every command writes its result below ``--out`` (JSON reports with a schema tag, CSV tables
with a header row) and logs a one-line summary.
"""

import argparse
import logging
import time
from pathlib import Path
from typing import List, Optional, Sequence

from ._birkhoff import CrossSectionSpec
from ._config import SolverConfig
from ._errors import NonConvergedError
from ._experiments import (
    FIGURES,
    figure_data,
    table1_experiment,
    table2_experiment,
    volume_experiment,
)
from ._families import (
    family_fixed_points,
    family_intersections_analytic,
    family_sweep,
    interpolating_family,
)
from ._intersect import find_intersections, scan_section, torus_distance
from ._io import (
    index_report_to_dict,
    intersection_set_to_dict,
    matrix_to_dict,
    read_matrix_json,
    schema_tag,
    write_csv,
    write_json,
)
from ._topology import fourier_mub_index_table, index_report

logger = logging.getLogger("cliffordtori")


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",")]


def _int_pair(text: str):
    values = [int(x) for x in text.split(",")]
    if len(values) != 2:
        raise argparse.ArgumentTypeError("expected two comma separated integers")
    return tuple(values)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Master seed.")
    common.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count.")
    common.add_argument("--threads", type=int, default=1, help="Worker processes.")
    common.add_argument("--tol-residual", type=float, default=1e-12, help="Residual tolerance.")
    common.add_argument("--tol-dedup", type=float, default=1e-7, help="Deduplication distance.")
    common.add_argument(
        "--tol-jacobian", type=float, default=1e-8, help="Transversality tolerance."
    )
    common.add_argument("--out", type=Path, default=Path("out"), help="Output directory.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only.")
    return common


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="cliffordtori",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="Intersections of Clifford tori, unistochastic matrices and MUB indices.",
    )
    common = _common_options()
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return commands.add_parser(
            name,
            parents=[common],
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

    solve = add("solve", "Find the intersection points for a unitary.")
    solve.add_argument("--matrix", type=Path, required=True, help="Matrix JSON file.")
    solve.add_argument("--no-check", action="store_true", help="Skip the unitarity check.")

    indices = add("indices", "Intersection indices for a unitary.")
    indices.add_argument("--matrix", type=Path, required=True, help="Matrix JSON file.")
    indices.add_argument("--no-check", action="store_true", help="Skip the unitarity check.")

    scan = add("scan", "Count intersections over a cross section of Birkhoff's polytope.")
    scan.add_argument(
        "--section", choices=("facet", "triangle", "hexagon", "parabolic"), required=True
    )
    scan.add_argument("--p", type=_float_list, default=[1.0, 0.0, 0.0], help="Hexagon p.")
    scan.add_argument("--row", type=int, default=0, help="Facet row.")
    scan.add_argument("--col", type=int, default=0, help="Facet column.")
    scan.add_argument("--edge", type=_int_pair, default=(0, 1), help="Parabolic edge i,j.")
    scan.add_argument("--resolution", type=int, default=41, help="Grid points per axis.")

    mub = add("mub-indices", "Index table of the Fourier pair in prime dimension.")
    mub.add_argument("--prime", type=int, required=True, help="Odd prime p <= 17.")

    family = add("family", "One member of the interpolating family.")
    family.add_argument("--dim", type=int, default=3, help="Odd prime dimension.")
    family.add_argument("--sigma", type=float, required=True, help="Family parameter.")

    sweep = add("family-sweep", "Compare solver and closed form along the family.")
    sweep.add_argument("--dim", type=int, default=3, help="Odd prime dimension.")
    sweep.add_argument("--steps", type=int, default=50, help="Number of sigma values.")

    table1 = add("table1", "Fourier-pair counts for several dimensions.")
    table1.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 5])

    table2 = add("table2", "Counts for Haar-random unitaries.")
    table2.add_argument("--dim", type=int, choices=(3, 4), default=3)

    add("volume", "Relative volume of the unistochastic set.")

    figure = add("figure-data", "Data tables behind a figure.")
    figure.add_argument("--figure", choices=FIGURES, required=True)
    figure.add_argument("--resolution", type=int, default=41, help="Grid size or path steps.")

    return parser.parse_args(argv)


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        residual_tol=args.tol_residual,
        dedup_tol=args.tol_dedup,
        jacobian_tol=args.tol_jacobian,
        seed=args.seed,
    )


def _section(args: argparse.Namespace) -> CrossSectionSpec:
    if args.section == "facet":
        return CrossSectionSpec.facet(args.row, args.col)
    if args.section == "hexagon":
        return CrossSectionSpec.hexagon(args.p)
    if args.section == "parabolic":
        return CrossSectionSpec.parabolic(args.edge)
    return CrossSectionSpec.triangle()


def _report_payload(report) -> dict:
    # Runtimes go to the log so that reruns give byte-identical files
    return {
        "schema": schema_tag("experiment"),
        "experiment": report.experiment,
        "seed": report.seed,
        "samples": report.samples,
        "histogram": report.histogram,
        "statistics": report.statistics,
    }


def _run(args: argparse.Namespace) -> List[Path]:
    cfg = _solver_config(args)
    out = args.out
    command = args.command

    if command == "solve":
        U = read_matrix_json(args.matrix, check=not args.no_check)
        result = find_intersections(U, cfg)
        logger.info("%s: %s points", result.classification.value, result.count)
        return [write_json(out / "solve.json", intersection_set_to_dict(result))]

    if command == "indices":
        U = read_matrix_json(args.matrix, check=not args.no_check)
        report = index_report(U, find_intersections(U, cfg), cfg.jacobian_tol)
        logger.info("intersection number %d", report.total)
        return [write_json(out / "indices.json", index_report_to_dict(report))]

    if command == "scan":
        spec = _section(args)
        cells = scan_section(spec, args.resolution, cfg, args.threads)
        rows = [
            (c.u, c.v, c.margin, int(c.member), "" if c.count is None else c.count)
            for c in cells
        ]
        header = ("u", "v", "margin", "member", "count")
        return [write_csv(out / f"scan_{spec.kind}.csv", header, rows)]

    if command == "mub-indices":
        rows = fourier_mub_index_table(args.prime, cfg.jacobian_tol)
        header = ("z", "a", "det", "index", "analytic_det", "residue")
        return [write_csv(out / f"mub_indices_p{args.prime}.csv", header, rows)]

    if command == "family":
        U = interpolating_family(args.dim, args.sigma)
        result = find_intersections(U, cfg)
        if args.dim == 3:
            expected = family_intersections_analytic(args.sigma, cfg.dedup_tol)
        else:
            expected = family_fixed_points(args.dim)
        found = [
            bool(any(torus_distance(alpha, p.alpha) < cfg.merge_tol for p in result.points))
            for alpha in expected
        ]
        payload = {
            "schema": schema_tag("family"),
            "dim": args.dim,
            "sigma": args.sigma,
            "matrix": matrix_to_dict(U),
            "form": "interpolating family",
            "expected": expected,
            "expected_found": found,
            "intersections": intersection_set_to_dict(result),
        }
        return [write_json(out / f"family_N{args.dim}.json", payload)]

    if command == "family-sweep":
        rows = family_sweep(args.dim, args.steps, cfg)
        path = out / f"family_sweep_N{args.dim}.csv"
        return [write_csv(path, ("sigma", "count", "match"), rows)]

    if command == "table1":
        rows = []
        for N in args.dims:
            row = table1_experiment(N, cfg.replace(starts_per_round=128 * 2 ** max(0, N - 3)))
            rows.append(
                (
                    row.dim,
                    "" if row.count is None else row.count,
                    row.classification or "",
                    row.lower_bound,
                    "" if row.prime_count is None else row.prime_count,
                    " ".join(str(r) for r in row.rounds),
                    row.starts,
                )
            )
        header = ("N", "count", "classification", "lower_bound", "prime_count", "rounds", "starts")
        return [write_csv(out / "table1.csv", header, rows)]

    if command == "table2":
        samples = 10_000 if args.samples is None else args.samples
        report = table2_experiment(args.dim, samples, args.seed, cfg, args.threads)
        logger.info("table2 runtime %.1f s", report.runtime)
        return [write_json(out / f"table2_N{args.dim}.json", _report_payload(report))]

    if command == "volume":
        samples = 1_000_000 if args.samples is None else args.samples
        report = volume_experiment(samples, args.seed)
        logger.info(
            "unistochastic ratio %.4f +- %.4f",
            report.statistics["ratio"]["mean"],
            report.statistics["ratio"]["stderr"],
        )
        return [write_json(out / "volume.json", _report_payload(report))]

    # figure-data
    paths = []
    for table in figure_data(args.figure, args.resolution, cfg, args.threads):
        paths.append(write_csv(out / f"{args.figure}_{table.name}.csv", table.header, table.rows))
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    _configure_logging(args)
    start = time.perf_counter()
    try:
        paths = _run(args)
    except NonConvergedError as exc:
        logger.error("%s (round counts %s)", exc, exc.rounds)
        return 3
    except ValueError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2
    for path in paths:
        logger.info("wrote %s", path)
    logger.debug("%s finished in %.2f s", args.command, time.perf_counter() - start)
    return 0

import logging
import time
import warnings
from collections import Counter
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ._birkhoff import (
    PERMUTATIONS,
    CrossSectionSpec,
    bistochastic_distance,
    facet_vertices,
    is_unistochastic,
    polytope_edges,
    reconstruct_unitary,
    sample_birkhoff,
    section_boundary_trace,
    unistochastic_margin,
)
from ._config import SolverConfig
from ._errors import InvalidDimensionError, NonConvergedError, UnknownFigureError
from ._intersect import (
    CONTINUUM,
    Classification,
    count_intersections,
    find_intersections,
    scan_section,
    torus_distance,
)
from ._matcore import (
    fourier_matrix,
    haar_random_unitary,
    is_odd_prime,
    mub_circulant_vector,
    unistochastic_projection,
    van_der_waerden,
)
from ._topology import index_report

logger = logging.getLogger(__name__)

NONCONVERGED = "nonconverged"
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
# Endpoints (s, τ) of the radial paths in the parabolic section through the edge P0-P1
PARABOLIC_PATHS = {
    "a": (-0.5, 0.0),
    "b": (-1.0 / 3.0, 1.0 / 6.0),
    "c": (0.0, 1.0 / np.sqrt(12.0)),
    "d": (1.0, 0.0),
}


@dataclass
class ExperimentReport:
    """Outcome of a Monte Carlo experiment.

    Attributes:
        experiment (str): Experiment identifier.
        seed (int): Master seed.
        samples (int): Number of samples.
        histogram (dict): Outcome -> frequency; the frequencies sum to `samples`.
        statistics (dict): Derived quantities, each a value or {"mean", "stderr", ...}.
        runtime (float): Wall-clock seconds.
    """

    experiment: str
    seed: int
    samples: int
    histogram: Dict[str, int]
    statistics: Dict[str, Any] = field(default_factory=dict)
    runtime: float = 0.0


@dataclass
class Table1Row:
    """Fourier-pair intersection count in dimension N with its stabilization evidence."""

    dim: int
    count: Any
    classification: Optional[str]
    rounds: Tuple[int, ...]
    starts: int
    lower_bound: int
    prime_count: Optional[int]
    converged: bool = True


@dataclass
class FigureTable:
    name: str
    header: Tuple[str, ...]
    rows: List[tuple]


def _outcome_key(count) -> str:
    return count if isinstance(count, str) else str(int(count))


def table1_experiment(N: int, cfg: Optional[SolverConfig] = None) -> Table1Row:
    """Number of vectors unbiased to both the computational and the Fourier basis.

    Counts the intersections of the tori related by the Fourier matrix. The result is exact
    for N = 2, 3, 5 and a continuum for N = 4; for N ≥ 6 it is a best-effort count reported
    with its per-round history. The row also carries 2^{N-1}, the lower bound on the number
    of intersections of transversal tori, and N(N-1), the number of circulant MUB vectors
    when N is an odd prime.

    Args:
        N (int): Dimension, 2 ≤ N ≤ 7.
        cfg (SolverConfig, optional): Solver settings. Defaults to a configuration whose
            number of starts per round grows with N.

    Returns:
        Table1Row: Count (or CONTINUUM), classification, rounds and reference columns.

    Raises:
        InvalidDimensionError: If N is outside 2..7.

    """
    if int(N) != N or not 2 <= N <= 7:
        raise InvalidDimensionError(f"table1 covers 2 <= N <= 7, got {N}")
    N = int(N)
    if cfg is None:
        cfg = SolverConfig(starts_per_round=128 * 2 ** max(0, N - 3))
    prime_count = N * (N - 1) if N == 2 or is_odd_prime(N) else None
    if N >= 6:
        warnings.warn(
            f"the count for N={N} is best effort; check the per-round history",
            stacklevel=2,
        )
    try:
        result = find_intersections(fourier_matrix(N), cfg)
    except NonConvergedError as exc:
        logger.warning("N=%d did not stabilize: %s", N, exc.rounds)
        return Table1Row(
            N, None, None, tuple(exc.rounds), 0, 2 ** (N - 1), prime_count, converged=False
        )
    logger.info("N=%d: %s (rounds %s)", N, result.count, result.rounds)
    return Table1Row(
        N,
        result.count,
        result.classification.value,
        result.rounds,
        result.starts,
        2 ** (N - 1),
        prime_count,
    )


def _table2_sample(task):
    N, seed, cfg = task
    U = haar_random_unitary(N, seed)
    distance = None
    if N == 3:
        distance = float(bistochastic_distance(unistochastic_projection(U), van_der_waerden(3)))
    try:
        count = count_intersections(U, cfg)
    except NonConvergedError:
        count = NONCONVERGED
    return _outcome_key(count), distance


def table2_experiment(
    N: int,
    samples: int = 10_000,
    seed: int = 0,
    cfg: Optional[SolverConfig] = None,
    processes: int = 1,
) -> ExperimentReport:
    """Intersection counts for Haar-random unitaries.

    Every sample draws from its own stream spawned off `np.random.SeedSequence(seed)`, so the
    histogram is the same for any number of worker processes. Samples whose count does not
    stabilize are kept under the "nonconverged" key. For N = 3 the statistics also give the
    fraction of 6-point samples and the mean distance of the projected bistochastic matrix
    from the van der Waerden matrix per count.

    Args:
        N (int): Dimension, 3 or 4.
        samples (int, optional): Number of unitaries. Defaults to 10_000.
        seed (int, optional): Master seed. Defaults to 0.
        cfg (SolverConfig, optional): Solver settings. Defaults to SolverConfig().
        processes (int, optional): Worker processes. Defaults to 1.

    Returns:
        ExperimentReport: Histogram of counts and derived statistics.

    Raises:
        InvalidDimensionError: If N is not 3 or 4.

    """
    if N not in (3, 4):
        raise InvalidDimensionError(f"table2 covers N = 3 and N = 4, got {N}")
    cfg = SolverConfig() if cfg is None else cfg
    start = time.perf_counter()
    tasks = [(N, child, cfg) for child in np.random.SeedSequence(seed).spawn(samples)]
    if processes > 1:
        with Pool(processes) as pool:
            outcomes = pool.map(_table2_sample, tasks, chunksize=max(1, samples // (8 * processes)))
    else:
        outcomes = [_table2_sample(task) for task in tasks]

    histogram = Counter(key for key, _ in outcomes)
    statistics: Dict[str, Any] = {}
    if N == 3 and samples > 0:
        fraction = histogram.get("6", 0) / samples
        statistics["fraction_6"] = {
            "mean": fraction,
            "stderr": float(np.sqrt(fraction * (1 - fraction) / samples)),
        }
        for key in sorted(histogram):
            distances = np.array([d for k, d in outcomes if k == key])
            statistics[f"distance_{key}"] = {
                "mean": float(distances.mean()),
                "stderr": float(distances.std(ddof=1) / np.sqrt(distances.size))
                if distances.size > 1
                else 0.0,
                "n": int(distances.size),
            }
    if histogram.get(NONCONVERGED):
        warnings.warn(f"{histogram[NONCONVERGED]} samples did not converge", stacklevel=2)
    runtime = time.perf_counter() - start
    logger.info("table2, N=%d: %d samples in %.1f s", N, samples, runtime)
    return ExperimentReport(
        f"table2-N{N}", seed, samples, dict(sorted(histogram.items())), statistics, runtime
    )


def volume_experiment(
    samples: int = 1_000_000, seed: int = 0, batch: int = 100_000, bins: int = 50
) -> ExperimentReport:
    """Fraction of Birkhoff's polytope (N = 3) occupied by unistochastic matrices.

    Uniform samples are classified by the chain-links margin. The exact value is 8π²/105
    ≈ 0.752. The statistics include a histogram of the margin over the unistochastic samples.

    Args:
        samples (int, optional): Number of samples, at least 1000. Defaults to 1_000_000.
        seed (int, optional): Master seed. Defaults to 0.
        batch (int, optional): Samples drawn per vectorized batch. Defaults to 100_000.
        bins (int, optional): Bins of the margin histogram. Defaults to 50.

    Returns:
        ExperimentReport: Counts of members and non-members, ratio and binomial stderr.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> report = cliffordtori.volume_experiment(samples=20_000, seed=3)
        >>> abs(report.statistics["ratio"]["mean"] - 8 * np.pi**2 / 105) < 0.02
        True

    """
    if samples < 1000:
        raise ValueError("volume estimates need at least 1000 samples")
    start = time.perf_counter()
    sizes = [batch] * (samples // batch) + ([samples % batch] if samples % batch else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    members = 0
    margin_counts = np.zeros(bins, dtype=np.int64)
    edges = np.linspace(0.0, 1.0, bins + 1)
    for size, stream in zip(sizes, streams):
        margin = unistochastic_margin(sample_birkhoff(stream, size=size))
        inside = margin >= -1e-12
        members += int(inside.sum())
        margin_counts += np.histogram(np.clip(margin[inside], 0.0, 1.0), bins=edges)[0]

    ratio = members / samples
    runtime = time.perf_counter() - start
    return ExperimentReport(
        "volume",
        seed,
        samples,
        {"unistochastic": members, "not_unistochastic": samples - members},
        {
            "ratio": {"mean": ratio, "stderr": float(np.sqrt(ratio * (1 - ratio) / samples))},
            "exact": 8 * np.pi**2 / 105,
            "margin_histogram": {
                "edges": edges.tolist(),
                "counts": margin_counts.tolist(),
            },
        },
        runtime,
    )


def parabolic_chart(s: float, tau: float) -> Tuple[float, float]:
    """Chart coordinates of B★ + s(M - B★) + τ(P1 - P0), M the midpoint of the edge P0-P1.

    s runs from -1/2 (the facet centre) to 1 (the edge midpoint); the point is unistochastic
    when τ² ≤ (1 + 2s)/12.
    """
    return s / np.sqrt(2.0), tau * np.sqrt(2.0)


def _scan_table(spec, resolution, cfg, processes) -> FigureTable:
    cells = scan_section(spec, resolution, cfg, processes)
    rows = [
        (c.u, c.v, c.margin, int(c.member), "" if c.count is None else c.count) for c in cells
    ]
    return FigureTable("scan", ("u", "v", "margin", "member", "count"), rows)


def _boundary_table(spec, resolution) -> FigureTable:
    trace = section_boundary_trace(spec, resolution=max(4 * resolution, 64))
    return FigureTable("boundary", ("u", "v"), [tuple(point) for point in trace])


def _safe_count(B, cfg):
    try:
        return count_intersections(reconstruct_unitary(B), cfg)
    except NonConvergedError:
        return NONCONVERGED


def _fig1(resolution, cfg, processes):
    spec = CrossSectionSpec.facet(0, 0)
    labels = facet_vertices(0, 0)
    vertices = FigureTable(
        "vertices",
        ("label",) + tuple(f"b{i}{j}" for i in range(3) for j in range(3)),
        [(i,) + tuple(PERMUTATIONS[i].ravel()) for i in labels],
    )
    edges = FigureTable(
        "edges",
        ("i", "j", "length", "unistochastic"),
        [(i, j, length, int(uni)) for i, j, length, uni in polytope_edges(labels)],
    )
    grid = np.linspace(0.0, 1.0, resolution)
    patch = FigureTable(
        "patch",
        ("u", "v", "margin") + tuple(f"b{i}{j}" for i in range(3) for j in range(3)),
        [
            (u, v, float(unistochastic_margin(spec.matrix(u, v))))
            + tuple(spec.matrix(u, v).ravel())
            for u in grid
            for v in grid
        ],
    )
    return [vertices, edges, patch]


def _fig2(resolution, cfg, processes):
    spec = CrossSectionSpec.triangle()
    trace = section_boundary_trace(spec, resolution=max(4 * resolution, 64))
    samples = trace[:: max(1, len(trace) // 12)]
    boundary_counts = FigureTable(
        "boundary_counts",
        ("u", "v", "count"),
        [(u, v, _safe_count(spec.matrix(u, v).clip(0.0, None), cfg)) for u, v in samples],
    )
    corners = FigureTable(
        "corners",
        ("label", "u", "v"),
        [(0, 1.0, 0.0), (3, -0.5, np.sqrt(3) / 2), (4, -0.5, -np.sqrt(3) / 2)],
    )
    return [
        _scan_table(spec, resolution, cfg, processes),
        FigureTable("boundary", ("u", "v"), [tuple(point) for point in trace]),
        boundary_counts,
        corners,
    ]


def _hexagon_figure(p, resolution, cfg, processes):
    spec = CrossSectionSpec.hexagon(p)
    return [_scan_table(spec, resolution, cfg, processes), _boundary_table(spec, resolution)]


def _fig5(resolution, cfg, processes):
    spec = CrossSectionSpec.parabolic((0, 1))
    paths = FigureTable(
        "paths",
        ("path", "s", "tau", "u", "v"),
        [(name, s, tau) + parabolic_chart(s, tau) for name, (s, tau) in PARABOLIC_PATHS.items()],
    )
    return [
        _scan_table(spec, resolution, cfg, processes),
        _boundary_table(spec, resolution),
        paths,
    ]


def _mub_label(alpha, p: int = 3):
    for z in range(1, p):
        for a in range(p):
            vector = mub_circulant_vector(p, z, a)
            if torus_distance(alpha, np.angle(vector[1:])) < 1e-6:
                return z, a
    return "", ""


def _fig6(resolution, cfg, processes):
    F = fourier_matrix(3)
    report = index_report(F, find_intersections(F, cfg), cfg.jacobian_tol)
    rows = []
    for point, det, index in report.per_point:
        z, a = _mub_label(point.alpha)
        rows.append(
            (z, a, point.alpha[0], point.alpha[1])
            + (point.z[0].real, point.z[0].imag, point.z[1].real, point.z[1].imag)
            + (det, index)
        )
    header = ("z", "a", "alpha1", "alpha2", "re_z1", "im_z1", "re_z2", "im_z2", "det", "index")
    return [FigureTable("points", header, rows)]


def path_trajectory(name: str, steps: int = 21, cfg: Optional[SolverConfig] = None) -> List[tuple]:
    """Intersection points along one radial path of the parabolic section.

    Rows are (path, t, s, tau, count, alpha1, alpha2, index, form) for t = 0..1, one row per
    point; continuum steps list the witnesses with an empty index. Unitaries are
    reconstructed in dephased form, which `form` records.
    """
    cfg = SolverConfig() if cfg is None else cfg
    if name not in PARABOLIC_PATHS:
        raise ValueError(f"unknown path {name!r}, expected one of {sorted(PARABOLIC_PATHS)}")
    spec = CrossSectionSpec.parabolic((0, 1))
    s_end, tau_end = PARABOLIC_PATHS[name]
    rows = []
    for t in np.linspace(0.0, 1.0, steps):
        s, tau = t * s_end, t * tau_end
        B = spec.matrix(*parabolic_chart(s, tau)).clip(0.0, None)
        if not is_unistochastic(B).member:
            rows.append((name, t, s, tau, "", "", "", "", "dephased"))
            continue
        try:
            result = find_intersections(reconstruct_unitary(B), cfg)
        except NonConvergedError:
            rows.append((name, t, s, tau, NONCONVERGED, "", "", "", "dephased"))
            continue
        if result.classification is Classification.CONTINUUM:
            for alpha in result.continuum_witnesses:
                rows.append((name, t, s, tau, CONTINUUM, alpha[0], alpha[1], "", "dephased"))
            continue
        for point in result.points:
            alpha1, alpha2 = point.alpha
            rows.append((name, t, s, tau, result.count, alpha1, alpha2, point.index, "dephased"))
    return rows


def _fig7(resolution, cfg, processes):
    header = ("path", "t", "s", "tau", "count", "alpha1", "alpha2", "index", "form")
    rows = []
    for name in PARABOLIC_PATHS:
        rows.extend(path_trajectory(name, max(resolution, 3), cfg))
    return [FigureTable("trajectories", header, rows)]


_FIGURE_BUILDERS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": lambda r, c, p: _hexagon_figure((1.0, 0.0, 0.0), r, c, p),
    "fig4": lambda r, c, p: _hexagon_figure((1.0 / 3.0, 2.0 / 3.0, 0.0), r, c, p),
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
}


def figure_data(
    figure: str,
    resolution: int = 41,
    cfg: Optional[SolverConfig] = None,
    processes: int = 1,
) -> List[FigureTable]:
    """Data tables behind one figure.

    - fig1: the facet B_00 = 0, its vertices, edges and the ruled orthostochastic patch.
    - fig2: triangle section scan, boundary trace, counts on the boundary and corners.
    - fig3: hexagon section for p = (1, 0, 0), scan and boundary.
    - fig4: hexagon section for p = (1/3, 2/3, 0), a triangle with an empty boundary trace.
    - fig5: parabolic section scan, boundary and the endpoints of paths a-d.
    - fig6: the six Fourier-pair points with basis labels, determinants and indices.
    - fig7: intersection points in (α₁, α₂) along paths a-d, `resolution` steps each.

    Args:
        figure (str): One of "fig1".."fig7".
        resolution (int, optional): Grid points per axis, or steps per path. Defaults to 41.
        cfg (SolverConfig, optional): Solver settings. Defaults to SolverConfig().
        processes (int, optional): Worker processes for section scans. Defaults to 1.

    Returns:
        list[FigureTable]: Named tables with headers.

    Raises:
        UnknownFigureError: For any other figure id.

    """
    if figure not in _FIGURE_BUILDERS:
        raise UnknownFigureError(f"unknown figure {figure!r}, expected one of {FIGURES}")
    cfg = SolverConfig() if cfg is None else cfg
    return _FIGURE_BUILDERS[figure](resolution, cfg, processes)

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool
from typing import List, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._birkhoff import CrossSectionSpec, is_unistochastic, reconstruct_unitary
from ._config import SolverConfig
from ._errors import InvalidDimensionError, NonConvergedError
from ._matcore import check_unitary, torus_image
from ._topology import frame_determinant

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
# Returned by count_intersections when the tori meet along curves or coincide
CONTINUUM = "continuum"
# Relative cutoff of the pseudo-inverse in the Newton step
_PINV_RCOND = 1e-9

PhasePoint = NDArray[np.floating]


class Classification(Enum):
    FINITE_TRANSVERSAL = "FiniteTransversal"
    FINITE_DEGENERATE = "FiniteDegenerate"
    CONTINUUM = "Continuum"


@dataclass(frozen=True)
class IntersectionPoint:
    """One intersection of the computational torus T with its image U(T).

    Attributes:
        alpha (NDArray[np.floating]): Phases α in [0, 2π) with U·(1, e^{iα}) on T.
        z (NDArray[np.complexfloating]): Affine coordinates w_s/w_0 of the image w = U·e(α).
        residual (float): max_j |f_j| at alpha.
        jac_det (float): Frame determinant, see `TangentFrame.determinant`.
        index (int): -1 or +1 for transversal points, 0 for degenerate ones.
        multiplicity (int): Number of distinct solutions merged into this point.
    """

    alpha: PhasePoint
    z: NDArray[np.complexfloating]
    residual: float
    jac_det: float
    index: int
    multiplicity: int = 1


@dataclass(frozen=True)
class IntersectionSet:
    """Certified solver output.

    Attributes:
        classification (Classification): Transversal, degenerate or continuum.
        points (tuple): The intersection points, empty for a continuum.
        continuum_witnesses (NDArray[np.floating]): Solutions sampled on the continuum,
            shape (k, N-1); empty for finite sets.
        rounds (tuple): Point count after each solver round.
        starts (int): Total number of Newton starts.
    """

    classification: Classification
    points: Tuple[IntersectionPoint, ...] = ()
    continuum_witnesses: NDArray[np.floating] = field(
        default_factory=lambda: np.empty((0, 0)), repr=False
    )
    rounds: Tuple[int, ...] = ()
    starts: int = 0

    @property
    def count(self) -> Union[int, str]:
        if self.classification is Classification.CONTINUUM:
            return CONTINUUM
        return len(self.points)

    @property
    def index_sum(self) -> int:
        return int(sum(point.index for point in self.points))


@dataclass(frozen=True)
class ScanCell:
    """Result for one grid point of a cross section scan.

    `count` is an integer, CONTINUUM, or None for non-members and failed cells; a failed
    cell keeps the error message in `error`.
    """

    u: float
    v: float
    margin: float
    member: bool
    count: Optional[Union[int, str]] = None
    error: Optional[str] = None


def canonical_phases(alpha) -> PhasePoint:
    """Phases reduced to [0, 2π)."""
    alpha = np.mod(np.asarray(alpha, dtype=np.float64), TWO_PI)
    # mod can round up to exactly 2π
    alpha[alpha >= TWO_PI] = 0.0
    return alpha


def torus_distance(a, b) -> NDArray[np.floating]:
    """Toroidal max-metric distance between phase points; broadcasts over leading axes."""
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
    return np.abs(d).max(axis=-1)


def residual(U, alpha) -> NDArray[np.floating]:
    """Unbiasedness residual f_j = |(U·(1, e^{iα₁}, ..., e^{iα_{N-1}}))_j|² - 1.

    The components sum to zero for unitary U, so only N-1 of them are independent.
    `alpha` may carry leading batch dimensions.

    Args:
        U (NDArray[np.complexfloating]): N×N unitary.
        alpha (NDArray[np.floating]): Phases, shape (..., N-1).

    Returns:
        NDArray[np.floating]: Residuals, shape (..., N).

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> f = cliffordtori.residual(cliffordtori.fourier_matrix(3), [0.0, 0.0])
        >>> np.allclose(f, [2, -1, -1])
        True

    """
    w = torus_image(U, alpha)
    return w.real**2 + w.imag**2 - 1


def residual_jacobian(U, alpha) -> NDArray[np.floating]:
    """Derivatives ∂f_j/∂α_r = 2 Re(conj(w_j) i U_{j,r} e^{iα_r}), shape (..., N, N-1)."""
    U = np.asarray(U, dtype=np.complex128)
    alpha = np.asarray(alpha, dtype=np.float64)
    w = torus_image(U, alpha)
    dw = 1j * U[:, 1:] * np.exp(1j * alpha)[..., np.newaxis, :]
    return 2 * np.real(np.conj(w)[..., :, np.newaxis] * dw)


def _newton(U, starts: NDArray[np.floating], cfg: SolverConfig):
    """Damped Newton on the reduced system f_1..f_{N-1}, run on all starts at once.

    Each iteration halves the step until the residual norm decreases; a start that cannot
    decrease it any more has reached limiting precision (or a spurious local minimum) and
    is frozen.
    """
    X = np.array(starts, dtype=np.float64)
    f = residual(U, X)
    norm = np.linalg.norm(f[:, 1:], axis=1)
    active = np.ones(len(X), dtype=bool)

    for _ in range(cfg.max_newton_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        J = residual_jacobian(U, X[idx])[:, 1:, :]
        step = -np.einsum("mij,mj->mi", np.linalg.pinv(J, rcond=_PINV_RCOND), f[idx, 1:])

        scale = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        for _ in range(cfg.max_halvings):
            rows = np.flatnonzero(pending)
            trial = X[idx[rows]] + scale[rows, np.newaxis] * step[rows]
            f_trial = residual(U, trial)
            norm_trial = np.linalg.norm(f_trial[:, 1:], axis=1)
            better = norm_trial < norm[idx[rows]]

            accepted = idx[rows[better]]
            X[accepted] = trial[better]
            f[accepted] = f_trial[better]
            norm[accepted] = norm_trial[better]
            pending[rows[better]] = False
            if not pending.any():
                break
            scale[pending] *= 0.5
        active[idx[pending]] = False

    X = canonical_phases(X)
    return X, np.abs(residual(U, X)).max(axis=1)


def _lattice_starts(n: int, count: int) -> NDArray[np.floating]:
    m = max(2, math.ceil(count ** (1.0 / n)))
    axis = TWO_PI * (np.arange(m) + 0.5) / m
    grid = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


class _SolutionPool:
    """Distinct accepted solutions, grouped into points at the merge tolerance.

    Newton ends that stall near a singular root, with residual below √residual_tol, are kept
    apart as near solutions; with `points(include_near=True)` every group holding one is an
    index-0 point.
    """

    def __init__(self, U, cfg: SolverConfig):
        self.U = U
        self.cfg = cfg
        self.alphas = np.empty((0, U.shape[0] - 1))
        self.residuals = np.empty(0)
        self.near_alphas = np.empty((0, U.shape[0] - 1))
        self.near_residuals = np.empty(0)

    @staticmethod
    def _absorb(known, known_res, alphas, residuals, tol):
        for alpha, res in zip(alphas, residuals):
            if len(known) and torus_distance(known, alpha).min() <= tol:
                continue
            known = np.vstack([known, alpha])
            known_res = np.append(known_res, res)
        return known, known_res

    def absorb(self, alphas, residuals) -> None:
        self.alphas, self.residuals = self._absorb(
            self.alphas, self.residuals, alphas, residuals, self.cfg.dedup_tol
        )

    def absorb_near(self, alphas, residuals) -> None:
        self.near_alphas, self.near_residuals = self._absorb(
            self.near_alphas, self.near_residuals, alphas, residuals, self.cfg.dedup_tol
        )

    def points(self, include_near: bool = False) -> List[IntersectionPoint]:
        near = self.near_alphas if include_near else self.near_alphas[:0]
        alphas = np.vstack([self.alphas, near])
        if len(alphas) == 0:
            return []
        residuals = np.append(self.residuals, self.near_residuals[: len(near)])
        strict = np.arange(len(alphas)) < len(self.alphas)
        close = torus_distance(alphas[:, np.newaxis, :], alphas[np.newaxis, :, :])
        linked = close < self.cfg.merge_tol
        # A stalled start can end anywhere within ~residual_tol^(1/4) of its singular root
        near_radius = max(self.cfg.merge_tol, self.cfg.residual_tol**0.25)
        linked |= (close < near_radius) & ~strict[:, np.newaxis] & ~strict[np.newaxis, :]
        n_clusters, labels = connected_components(csr_matrix(linked), directed=False)
        points = []
        for label in range(n_clusters):
            members = np.flatnonzero(labels == label)
            exact = members[strict[members]]
            singular = exact.size < members.size
            if exact.size:
                best = exact[np.argmin(residuals[exact])]
                multiplicity = exact.size
            else:
                best = members[np.argmin(residuals[members])]
                multiplicity = members.size
            points.append(self._point(alphas[best], residuals[best], multiplicity, singular))
        points.sort(key=lambda point: tuple(point.alpha))
        return points

    def _point(self, alpha, res, multiplicity, singular=False) -> IntersectionPoint:
        w = torus_image(self.U, alpha)
        det, _ = frame_determinant(self.U, alpha)
        if singular or multiplicity > 1 or abs(det) <= self.cfg.jacobian_tol:
            index = 0
        else:
            index = int(np.sign(det))
        return IntersectionPoint(alpha, w[1:] / w[0], float(res), det, index, int(multiplicity))


def find_intersections(U, cfg: Optional[SolverConfig] = None) -> IntersectionSet:
    """All intersection points of the computational Clifford torus and its image under U.

    Solves |(U·e(α))_j|² = 1 by multistart damped Newton on the N-1 independent equations.
    The first round starts from a lattice on the torus, later rounds from seeded uniform
    points. Solutions are deduplicated at `cfg.dedup_tol` and grouped at `cfg.merge_tol`; a
    group with several members, or a point with a vanishing frame determinant, is a degenerate
    point of index 0. Rounds continue until the point count is unchanged over two consecutive
    rounds (after `cfg.min_rounds`) and, when every point is transversal, the indices sum to
    zero.

    Newton converges only linearly at a singular root and may stall just above
    `cfg.residual_tol`. Such ends with residual below √residual_tol are kept aside; when a
    stable transversal set has a nonzero index sum they are grouped and returned as index-0
    points of a FiniteDegenerate set.

    More than `cfg.continuum_min_points` degenerate points make the result a continuum. The
    test counts points and does not look at the spacing of neighbouring solutions: random
    starts spread the solutions of a curve far apart, so a nearest-neighbour spacing below
    10·dedup_tol is not what a continuum produces here.

    Args:
        U (NDArray[np.complexfloating]): N×N unitary.
        cfg (SolverConfig, optional): Solver settings. Defaults to SolverConfig().

    Returns:
        IntersectionSet: Classified points with the per-round counts.

    Raises:
        InvalidMatrixError: If U is not unitary within 1e-8.
        NonConvergedError: If the count does not stabilize within `cfg.max_rounds`.

    References:
        - I. Bengtsson, W. Bruzda, Å. Ericsson, J.-Å. Larsson, W. Tadej and K. Życzkowski,
          Mutually unbiased bases and Hadamard matrices of order six,
          J. Math. Phys. 48 (2007) 052106.

    Example:
        >>> import cliffordtori
        >>> result = cliffordtori.find_intersections(cliffordtori.fourier_matrix(3))
        >>> result.classification.value, result.count, result.index_sum
        ('FiniteTransversal', 6, 0)

    """
    cfg = SolverConfig() if cfg is None else cfg
    U = check_unitary(U)
    n = U.shape[0] - 1
    rng = np.random.default_rng(cfg.seed)
    pool = _SolutionPool(U, cfg)
    history: List[int] = []
    n_starts = 0

    for round_no in range(cfg.max_rounds):
        if round_no == 0:
            starts = _lattice_starts(n, cfg.starts_per_round)
        else:
            starts = rng.uniform(0.0, TWO_PI, (cfg.starts_per_round, n))
        n_starts += len(starts)
        alphas, residuals = _newton(U, starts, cfg)
        accepted = residuals < cfg.residual_tol
        pool.absorb(alphas[accepted], residuals[accepted])
        near = ~accepted & (residuals < math.sqrt(cfg.residual_tol))
        if near.any():
            # Runs still converging finish here; true singular stalls stay put
            polished, polished_res = _newton(U, alphas[near], cfg)
            done = polished_res < cfg.residual_tol
            pool.absorb(polished[done], polished_res[done])
            pool.absorb_near(polished[~done], polished_res[~done])

        points = pool.points()
        history.append(len(points))
        degenerate = sum(point.index == 0 for point in points)
        logger.debug(
            "round %d: %d/%d starts accepted, %d points (%d degenerate)",
            round_no,
            int(accepted.sum()),
            len(starts),
            len(points),
            degenerate,
        )

        if degenerate > cfg.continuum_min_points:
            return IntersectionSet(
                Classification.CONTINUUM,
                (),
                np.array([point.alpha for point in points]),
                tuple(history),
                n_starts,
            )

        stable = (
            len(history) >= max(2, cfg.min_rounds)
            and history[-1] == history[-2]
            and len(points) > 0
        )
        if not stable:
            continue
        if degenerate == 0:
            if sum(point.index for point in points) != 0:
                # Transversal indices cancel, so a nonzero sum means a singular root was missed
                completed = pool.points(include_near=True)
                singular = sum(point.index == 0 for point in completed)
                if singular == 0:
                    continue
                logger.debug(
                    "index sum %d: %d near-singular points",
                    sum(point.index for point in points),
                    singular,
                )
                points = completed
                classification = Classification.FINITE_DEGENERATE
            else:
                classification = Classification.FINITE_TRANSVERSAL
        else:
            classification = Classification.FINITE_DEGENERATE
        return IntersectionSet(
            classification, tuple(points), np.empty((0, n)), tuple(history), n_starts
        )

    raise NonConvergedError(
        f"point count did not stabilize in {cfg.max_rounds} rounds: {history}", history
    )


def count_intersections(U, cfg: Optional[SolverConfig] = None) -> Union[int, str]:
    """Number of distinct intersection points, or CONTINUUM.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> cliffordtori.count_intersections(np.eye(3))
        'continuum'

    """
    return find_intersections(U, cfg).count


def grid_count(U, resolution: int = 500, cfg: Optional[SolverConfig] = None) -> int:
    """Brute-force intersection count for N = 3.

    Marks every cell of a resolution × resolution grid on the 2-torus in which both f₁ and f₂
    change sign, refines the cell centres with Newton and counts the distinct solutions
    (grouped as in `find_intersections`). Independent of the multistart solver, so it serves
    as a cross-check for finite cases.

    Raises:
        InvalidDimensionError: If U is not 3×3.

    """
    cfg = SolverConfig() if cfg is None else cfg
    U = check_unitary(U)
    if U.shape[0] != 3:
        raise InvalidDimensionError("the grid oracle works on the 2-torus, N = 3")
    t = TWO_PI * np.arange(resolution) / resolution
    f1 = np.empty((resolution, resolution))
    f2 = np.empty((resolution, resolution))
    block = 256
    for first in range(0, resolution, block):
        rows = t[first : first + block]
        alpha = np.stack(np.meshgrid(rows, t, indexing="ij"), axis=-1)
        f = residual(U, alpha)
        f1[first : first + block] = f[..., 1]
        f2[first : first + block] = f[..., 2]

    def sign_change(f):
        corners = np.stack(
            [f, np.roll(f, -1, axis=0), np.roll(f, -1, axis=1), np.roll(f, (-1, -1), axis=(0, 1))]
        )
        return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)

    cells = np.argwhere(sign_change(f1) & sign_change(f2))
    starts = (cells + 0.5) * TWO_PI / resolution
    alphas, residuals = _newton(U, starts, cfg)
    pool = _SolutionPool(U, cfg)
    accepted = residuals < cfg.residual_tol
    pool.absorb(alphas[accepted], residuals[accepted])
    logger.debug("grid oracle: %d candidate cells, %d accepted", len(cells), int(accepted.sum()))
    return len(pool.points())


def _scan_cell(task) -> ScanCell:
    spec, u, v, cfg = task
    B = spec.matrix(u, v).clip(0.0, None)
    certificate = is_unistochastic(B)
    if not certificate.member:
        return ScanCell(u, v, certificate.margin, False)
    try:
        count = count_intersections(reconstruct_unitary(B), cfg)
    except NonConvergedError as exc:
        logger.warning("scan cell (%.4f, %.4f) did not converge", u, v)
        return ScanCell(u, v, certificate.margin, True, None, str(exc))
    return ScanCell(u, v, certificate.margin, True, count)


def scan_section(
    spec: CrossSectionSpec,
    resolution: int = 41,
    cfg: Optional[SolverConfig] = None,
    processes: int = 1,
) -> List[ScanCell]:
    """Intersection counts over a resolution × resolution grid of a cross section.

    Grid points outside the section are skipped. At every unistochastic point the dephased
    unitary is reconstructed and its intersections are counted; a cell whose solver fails
    keeps the error and the scan goes on.

    Args:
        spec (CrossSectionSpec): The section.
        resolution (int, optional): Grid points per axis over `spec.bounds`. Defaults to 41.
        cfg (SolverConfig, optional): Solver settings. Defaults to SolverConfig().
        processes (int, optional): Worker processes. Defaults to 1 (no pool).

    Returns:
        list[ScanCell]: Cells in grid order (u outer, v inner) for any number of workers.

    """
    cfg = SolverConfig() if cfg is None else cfg
    u_min, u_max, v_min, v_max = spec.bounds
    tasks = [
        (spec, float(u), float(v), cfg)
        for u in np.linspace(u_min, u_max, resolution)
        for v in np.linspace(v_min, v_max, resolution)
        if spec.contains(u, v)
    ]
    logger.info("scanning %d cells of the %s section", len(tasks), spec.kind)
    if processes > 1:
        with Pool(processes) as pool:
            return pool.map(_scan_cell, tasks)
    return [_scan_cell(task) for task in tasks]

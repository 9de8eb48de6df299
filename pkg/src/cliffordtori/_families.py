import logging
from typing import List, NamedTuple, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space, schur

from ._config import SolverConfig
from ._errors import ContinuumError, InvalidDimensionError
from ._intersect import (
    Classification,
    canonical_phases,
    find_intersections,
    torus_distance,
)
from ._matcore import _check_odd_prime, check_unitary, fourier_matrix, torus_image

logger = logging.getLogger(__name__)


class StandardFormParameters(NamedTuple):
    """Eigen-decomposition of a flat-fixing representative on the complement of the flat vector.

    Attributes:
        eigenphases (NDArray[np.floating]): N-1 eigenphases in (-π, π].
        eigenvectors (NDArray[np.complexfloating]): N×(N-1) orthonormal eigenvectors, all
            orthogonal to the flat vector.
    """

    eigenphases: NDArray[np.floating]
    eigenvectors: NDArray[np.complexfloating]


class FamilySweepRow(NamedTuple):
    sigma: float
    count: object
    match: bool


def standard_form(U, alpha=None, cfg: Optional[SolverConfig] = None) -> NDArray[np.complexfloating]:
    """Equivalent unitary that maps the flat vector to itself.

    For an intersection point α* with image w = U·e(α*), the representative is
    diag(w̄)·U·diag(e(α*)). It relates the same pair of tori up to the equivalence
    U → D·U·D′ and sends (1, ..., 1) to itself exactly.

    Args:
        U (NDArray[np.complexfloating]): N×N unitary.
        alpha (NDArray[np.floating], optional): A known intersection point. Defaults to None,
            in which case the solver supplies one.
        cfg (SolverConfig, optional): Solver settings. Defaults to SolverConfig().

    Returns:
        NDArray[np.complexfloating]: The flat-fixing representative.

    Raises:
        NonConvergedError: If the solver fails.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> V = cliffordtori.standard_form(cliffordtori.fourier_matrix(3))
        >>> np.allclose(V @ np.ones(3), np.ones(3))
        True

    """
    U = check_unitary(U)
    if alpha is None:
        result = find_intersections(U, cfg)
        if result.classification is Classification.CONTINUUM:
            alpha = result.continuum_witnesses[0]
        else:
            alpha = result.points[0].alpha
    alpha = np.asarray(alpha, dtype=np.float64)
    w = torus_image(U, alpha)
    e = np.concatenate([[1.0], np.exp(1j * alpha)])
    return (np.conj(w) / np.abs(w))[:, np.newaxis] * U * e[np.newaxis, :]


def standard_form_dimension(N: int) -> int:
    """Number of real parameters of flat-fixing representatives, (N-1)².

    It equals the dimension of Birkhoff's polytope, so the inequivalent pairs of Clifford
    tori form a set of the same dimension.
    """
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {N}")
    return (int(N) - 1) ** 2


def standard_form_parameters(V) -> StandardFormParameters:
    """Eigenphases and eigenbasis of a flat-fixing unitary V orthogonal to the flat vector.

    Raises:
        ValueError: If V does not fix the flat vector within 1e-10.

    """
    V = check_unitary(V)
    N = V.shape[0]
    flat = np.ones(N) / np.sqrt(N)
    if np.abs(V @ flat - flat).max() > 1e-10:
        raise ValueError("matrix does not fix the flat vector; use standard_form first")
    Q = null_space(flat[np.newaxis, :])
    T, Z = schur(Q.conj().T @ V @ Q, output="complex")
    return StandardFormParameters(np.angle(np.diag(T)), Q @ Z)


def interpolating_family(N: int, sigma: float) -> NDArray[np.complexfloating]:
    """Member U(σ) of the one-parameter family joining the identity and the Fourier pair.

    U_uv(σ) = (1/N) Σ_s e^{iσ (s² mod N)} ω^{(u-v)s}, that is F·diag(e^{iσ (s² mod N)})·F†.
    σ = 0 gives the identity, σ = 2π/3 (N = 3) a matrix whose projection is the van der
    Waerden matrix, and σ = π (N = 3) the real matrix -1 + 2J/3 on the orthostochastic
    boundary. The Fourier basis vectors are eigenvectors for every σ, so their intersection
    points stay fixed along the family.

    Args:
        N (int): Odd prime dimension.
        sigma (float): Family parameter, radians.

    Returns:
        NDArray[np.complexfloating]: The N×N unitary U(σ).

    Raises:
        InvalidDimensionError: If N is not an odd prime.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> U = cliffordtori.interpolating_family(3, np.pi)
        >>> np.allclose(U.imag, 0)
        True

    """
    N = _check_odd_prime(N)
    s = np.arange(N)
    F = fourier_matrix(N)
    return (F * np.exp(1j * sigma * ((s * s) % N))[np.newaxis, :]) @ F.conj().T


def _distinct(alphas: NDArray[np.floating], tol: float) -> NDArray[np.floating]:
    kept = []
    for alpha in alphas:
        if all(torus_distance(alpha, other) > tol for other in kept):
            kept.append(alpha)
    return np.array(kept)


def family_intersections_analytic(sigma: float, dedup_tol: float = 1e-7) -> NDArray[np.floating]:
    """Closed-form intersection points of U(σ) for N = 3.

    With ω = exp(2πi/3) and y = (1 + 2e^{iσ})/(2 + e^{iσ}), a unimodular number, the points
    (1, e^{iα₁}, e^{iα₂}) are

        (1, 1, 1), (1, ω, ω²), (1, ω², ω), (1, -y, -y), (1, -1/y, 1), (1, 1, -1/y).

    The first three are the fixed Fourier basis. U(σ) commutes with permutations of the
    coordinates, and the last three are the rescaled permutations of (1, -y, -y). At σ = π,
    y = -1 and the last three coincide with (1, 1, 1), leaving 3 distinct points.

    Args:
        sigma (float): Family parameter in (0, π].
        dedup_tol (float, optional): Points closer than this are reported once.
            Defaults to 1e-7.

    Returns:
        NDArray[np.floating]: Distinct phase points α, shape (k, 2), k = 6 or 3.

    Raises:
        ContinuumError: If σ = 0, where the tori coincide.

    """
    if abs(np.mod(sigma + np.pi, 2 * np.pi) - np.pi) < 1e-12:
        raise ContinuumError("U(0) is the identity; the tori coincide")
    omega = np.exp(2j * np.pi / 3)
    y = (1 + 2 * np.exp(1j * sigma)) / (2 + np.exp(1j * sigma))
    columns = np.array(
        [
            [1, 1],
            [omega, omega**2],
            [omega**2, omega],
            [-y, -y],
            [-1 / y, 1],
            [1, -1 / y],
        ]
    )
    return _distinct(canonical_phases(np.angle(columns)), dedup_tol)


def family_fixed_points(N: int) -> NDArray[np.floating]:
    """Phase points of the Fourier basis, α_r = 2πrk/N for k = 0..N-1; fixed for every σ."""
    N = _check_odd_prime(N)
    r = np.arange(1, N)
    return canonical_phases(2 * np.pi * np.outer(np.arange(N), r) / N)


def _all_found(targets, points, tol: float, degenerate_tol: float) -> bool:
    for target in targets:
        if not any(
            torus_distance(target, point.alpha) < (tol if point.index != 0 else degenerate_tol)
            for point in points
        ):
            return False
    return True


def family_sweep(
    N: int = 3, steps: int = 50, cfg: Optional[SolverConfig] = None, tol: float = 1e-8
) -> List[FamilySweepRow]:
    """Numerical intersections along U(σ) compared with the closed form.

    Uses `steps` values σ = kπ/steps, k = 1..steps. For N = 3 a row matches when the solver
    finds exactly the closed-form points, each within `tol` (degenerate points within
    `cfg.merge_tol`). For N ≥ 5 a row matches when the fixed Fourier points are all found.

    Returns:
        list[FamilySweepRow]: Rows (sigma, count, match).

    """
    cfg = SolverConfig() if cfg is None else cfg
    N = _check_odd_prime(N)
    rows = []
    for sigma in np.pi * np.arange(1, steps + 1) / steps:
        result = find_intersections(interpolating_family(N, sigma), cfg)
        if result.classification is Classification.CONTINUUM:
            rows.append(FamilySweepRow(float(sigma), result.count, False))
            continue
        if N == 3:
            expected = family_intersections_analytic(sigma, cfg.dedup_tol)
            match = len(expected) == result.count and _all_found(
                expected, result.points, tol, cfg.merge_tol
            )
        else:
            match = _all_found(family_fixed_points(N), result.points, tol, cfg.merge_tol)
        logger.info("sigma=%.4f: %s points, match=%s", sigma, result.count, match)
        rows.append(FamilySweepRow(float(sigma), result.count, bool(match)))
    return rows

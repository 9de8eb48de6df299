import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Set, Tuple

import numpy as np
from numpy.typing import NDArray

from ._errors import (
    ChartFailureError,
    ContinuumError,
    InvalidDimensionError,
    NotAnIntersectionError,
)
from ._matcore import (
    _check_odd_prime,
    check_unitary,
    fourier_matrix,
    modular_inverse,
    mub_circulant_vector,
    torus_image,
)

logger = logging.getLogger(__name__)

# The distinguished image component must exceed this modulus for a chart to be used
CHART_TOL = 1e-10
MAX_TABLE_PRIME = 17


@dataclass(frozen=True)
class TangentFrame:
    """Tangent vectors of both tori at an intersection point, in one affine chart.

    Attributes:
        point (NDArray[np.complexfloating]): Affine coordinates z_s = w_s/w_k of the image
            point w = U·e(α), s ≠ k.
        fixed_torus_vectors (NDArray[np.complexfloating]): Row r is the pushforward of ∂ν_r,
            the coordinate field of the computational torus.
        shifted_torus_vectors (NDArray[np.complexfloating]): Row r is ∂z/∂α_r, the
            coordinate field of the image torus U(T).
        chart (int): Index k of the component the coordinates are divided by.
    """

    point: NDArray[np.complexfloating]
    fixed_torus_vectors: NDArray[np.complexfloating]
    shifted_torus_vectors: NDArray[np.complexfloating]
    chart: int = 0

    def determinant(self) -> float:
        """Oriented volume of the frame [∂ν₁..∂ν_n, ∂α₁..∂α_n].

        The columns are written in real coordinates (Re z₁, Im z₁, ..., Re z_n, Im z_n) and the
        real determinant is multiplied by 2ⁿ, which for even n is the determinant in the basis
        (∂z₁..∂z_n, ∂z̄₁..∂z̄_n). In this normalization the six Fourier points for N = 3 have
        determinant ±3, positive on the basis labelled by the quadratic residue.
        """
        columns = np.concatenate([self.fixed_torus_vectors, self.shifted_torus_vectors])
        n = columns.shape[1]
        real = np.empty((2 * n, 2 * n))
        real[0::2, :] = columns.real.T
        real[1::2, :] = columns.imag.T
        return float(2.0**n * np.linalg.det(real))


class IndexedPoint(NamedTuple):
    point: object
    det: float
    index: int


@dataclass(frozen=True)
class IndexReport:
    """Intersection indices of a finite intersection set.

    Attributes:
        per_point (list): One IndexedPoint (point, det, index) per intersection point.
        total (int): Sum of the indices, the intersection number of the two tori. Zero when
            every point is transversal.
    """

    per_point: List[IndexedPoint]
    total: int


class MubIndexRow(NamedTuple):
    """One point |z, a⟩ of the Fourier-pair table."""

    z: int
    a: int
    det: float
    index: int
    analytic_det: float
    residue: bool


def tangent_frame(U, alpha, chart: int = 0) -> TangentFrame:
    """Tangent frame of the computational torus and its image under U at e(α).

    With w = U·e(α) and affine coordinates z_s = w_s/w_k, the fixed torus vectors are
    ∂z_s/∂ν_r = i z_s (δ_sr - δ_kr) and the shifted torus vectors are

        ∂z_s/∂α_r = i e^{iα_r} (U_sr - z_s U_kr) / w_k.

    Args:
        U (NDArray[np.complexfloating]): N×N unitary.
        alpha (NDArray[np.floating]): Phases α₁..α_{N-1}.
        chart (int, optional): Distinguished component k. Defaults to 0.

    Returns:
        TangentFrame: Point and both sets of tangent vectors.

    Raises:
        ChartFailureError: If |w_k| < 1e-10.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> frame = cliffordtori.tangent_frame(np.eye(3), [0.0, 0.0])
        >>> np.allclose(frame.fixed_torus_vectors, 1j * np.eye(2))
        True

    """
    U = np.asarray(U, dtype=np.complex128)
    alpha = np.asarray(alpha, dtype=np.float64)
    N = U.shape[0]
    if not 0 <= chart < N:
        raise ValueError(f"chart must lie in 0..{N - 1}, got {chart}")
    w = torus_image(U, alpha)
    if abs(w[chart]) < CHART_TOL:
        raise ChartFailureError(f"image component {chart} vanishes")

    others = np.array([s for s in range(N) if s != chart])
    z = w[others] / w[chart]

    # Row r corresponds to ν_r and α_r, r = 1..N-1
    phases = np.arange(1, N)
    delta = (others[np.newaxis, :] == phases[:, np.newaxis]).astype(float)
    delta -= (phases == chart)[:, np.newaxis]
    fixed = 1j * delta * z[np.newaxis, :]

    e_alpha = np.exp(1j * alpha)
    shifted = (
        1j
        * e_alpha[:, np.newaxis]
        * (U[others][:, phases].T - np.outer(U[chart, phases], z))
        / w[chart]
    )
    return TangentFrame(z, fixed, shifted, chart)


def frame_determinant(U, alpha) -> Tuple[float, int]:
    """Frame determinant in the first usable chart, with that chart's index."""
    N = np.shape(U)[0]
    for chart in range(N):
        try:
            return tangent_frame(U, alpha, chart).determinant(), chart
        except ChartFailureError:
            logger.debug("chart %d unusable at alpha=%s, trying the next one", chart, alpha)
    raise ChartFailureError("no affine chart is defined at this point")


def intersection_index(
    U, alpha, jacobian_tol: float = 1e-8, residual_tol: float = 1e-9
) -> Tuple[float, int]:
    """Frame determinant and intersection index at a solution of the unbiasedness equations.

    Args:
        U (NDArray[np.complexfloating]): N×N unitary.
        alpha (NDArray[np.floating]): Phases of the intersection point.
        jacobian_tol (float, optional): Determinants with smaller modulus give index 0.
            Defaults to 1e-8.
        residual_tol (float, optional): Largest accepted max |f_j|. Defaults to 1e-9.

    Returns:
        tuple: (det, index) with index in {-1, 0, +1}.

    Raises:
        NotAnIntersectionError: If e(α) is not mapped onto the computational torus.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> v = cliffordtori.mub_circulant_vector(3, 1, 0)
        >>> det, index = cliffordtori.intersection_index(
        ...     cliffordtori.fourier_matrix(3), np.angle(v[1:])
        ... )
        >>> round(det, 9), index
        (3.0, 1)

    """
    U = np.asarray(U, dtype=np.complex128)
    w = torus_image(U, alpha)
    residual = float(np.abs(np.abs(w) ** 2 - 1).max())
    if residual > residual_tol:
        raise NotAnIntersectionError(f"residual {residual:.3e} exceeds {residual_tol:.1e}")
    det, _ = frame_determinant(U, alpha)
    index = int(np.sign(det)) if abs(det) > jacobian_tol else 0
    return det, index


def index_report(U, intersection_set, jacobian_tol: float = 1e-8) -> IndexReport:
    """Indices of every point of a finite intersection set.

    Raises:
        ContinuumError: If the set is a continuum.

    """
    if intersection_set.classification.value == "Continuum":
        raise ContinuumError("a continuum of intersections has no index report")
    U = check_unitary(U)
    rows = []
    for point in intersection_set.points:
        det, index = intersection_index(U, point.alpha, jacobian_tol)
        if point.index == 0:
            # Merged clusters keep index 0 whatever the determinant at the representative
            index = 0
        rows.append(IndexedPoint(point, det, index))
    return IndexReport(rows, int(sum(row.index for row in rows)))


def quadratic_residues(p: int) -> Set[int]:
    """Nonzero squares modulo an odd prime p.

    Example:
        >>> import cliffordtori
        >>> sorted(cliffordtori.quadratic_residues(7))
        [1, 2, 4]

    """
    p = _check_odd_prime(p)
    return {(x * x) % p for x in range(1, p)}


def legendre_symbol(x: int, p: int) -> int:
    """(x/p) by Euler's criterion: 1 on residues, -1 on non-residues, 0 on multiples of p."""
    p = _check_odd_prime(p)
    value = pow(int(x) % p, (p - 1) // 2, p)
    return -1 if value == p - 1 else value


def gauss_sum(p: int) -> complex:
    """Quadratic Gauss sum Σ_x ω^{x²}, ω = exp(2πi/p), by direct summation.

    Equals √p for p = 1 mod 4 and i√p for p = 3 mod 4, and also 1 + 2 Σ_{x∈Q} ω^x with Q the
    quadratic residues.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> g = cliffordtori.gauss_sum(3)
        >>> np.isclose(g, 1j * np.sqrt(3))
        True

    """
    p = _check_odd_prime(p)
    x = np.arange(p)
    return complex(np.sum(np.exp(2j * np.pi * ((x * x) % p) / p)))


def _closed_form_gauss_sum(p: int) -> complex:
    return np.sqrt(p) if p % 4 == 1 else 1j * np.sqrt(p)


def mub_tangent_frame(p: int, z: int, a: int) -> TangentFrame:
    """Closed-form tangent frame at the Fourier-pair intersection point |z, a⟩.

    For U = F the image of |z, a⟩ has affine coordinates z_s = ω^{-s²z/2 + as}. Writing
    c = 1/(2z) and G for the Gauss sum, the shifted torus vectors are

        ∂z_s/∂α_r = i (c/p) ω^{c(r-a)²} (ω^{sr} - z_s) / G,

    and the fixed torus vectors are i z_s along coordinate s. All divisions are inverses
    modulo p. This agrees with `tangent_frame(fourier_matrix(p), alpha)` at the same point.

    Raises:
        InvalidDimensionError: If p is not an odd prime.
        InvalidLabelError: If z is divisible by p.

    """
    mub_circulant_vector(p, z, a)  # validates p and z
    inverse2 = modular_inverse(2, p)
    c = modular_inverse(2 * z, p)
    s = np.arange(1, p)
    omega = np.exp(2j * np.pi / p)

    point = omega ** ((-z * inverse2 * s * s + a * s) % p)
    fixed = np.diag(1j * point)
    prefactor = 1j * legendre_symbol(c, p) / _closed_form_gauss_sum(p)
    # Row r, column s
    shifted = (
        prefactor
        * omega ** ((c * (s - a) ** 2) % p)[:, np.newaxis]
        * (omega ** (np.outer(s, s) % p) - point[np.newaxis, :])
    )
    return TangentFrame(point, fixed, shifted, 0)


def fourier_mub_index_table(p: int, jacobian_tol: float = 1e-8) -> List[MubIndexRow]:
    """Index determinants at all p(p-1) intersection points of the Fourier pair, p ≤ 17.

    Each point |z, a⟩ is evaluated twice, with the generic numeric frame and with the closed
    form of `mub_tangent_frame`. Rows are ordered by basis label z, then by a. All points of
    one basis share the sign of their index, positive exactly on quadratic-residue labels.

    Args:
        p (int): Odd prime, at most 17.
        jacobian_tol (float, optional): Transversality tolerance. Defaults to 1e-8.

    Returns:
        list[MubIndexRow]: Rows (z, a, det, index, analytic_det, residue).

    Raises:
        InvalidDimensionError: If p is not an odd prime up to 17.

    Example:
        >>> import cliffordtori
        >>> rows = cliffordtori.fourier_mub_index_table(3)
        >>> sorted({(row.z, row.index) for row in rows})
        [(1, 1), (2, -1)]

    """
    p = _check_odd_prime(p)
    if p > MAX_TABLE_PRIME:
        raise InvalidDimensionError(f"index tables are limited to p <= {MAX_TABLE_PRIME}")
    F = fourier_matrix(p)
    residues = quadratic_residues(p)
    rows = []
    for z in range(1, p):
        for a in range(p):
            alpha = np.angle(mub_circulant_vector(p, z, a)[1:])
            det, index = intersection_index(F, alpha, jacobian_tol)
            analytic = mub_tangent_frame(p, z, a).determinant()
            rows.append(MubIndexRow(z, a, det, index, analytic, z in residues))
    logger.info("index table for p=%d: %d points", p, len(rows))
    return rows

from collections import namedtuple
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from numpy.typing import NDArray

from ._errors import (
    ChartFailureError,
    InvalidDimensionError,
    InvalidLabelError,
    InvalidMatrixError,
    InvalidProbabilityError,
)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

# Entries with smaller modulus count as zero when dephasing
_ZERO = 1e-12

ExtendedEuclidResult = namedtuple("ExtendedEuclidResult", ["gcd", "x", "y"])


class DephaseResult(NamedTuple):
    """Dephased matrix together with the degeneracy status.

    `degenerate` is True when the first row or column of the (possibly reordered) input held a
    zero entry; the phases of those entries are left untouched.
    """

    matrix: NDArray[np.complexfloating]
    degenerate: bool


@dataclass(frozen=True)
class CliffordTorusPoint:
    """Torus coordinates of a state vector: probabilities `p` and relative phases `nu`."""

    probabilities: NDArray[np.floating]
    phases: NDArray[np.floating]


def _check_dimension(N) -> int:
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {N}")
    return int(N)


def _as_square(U) -> NDArray[np.complexfloating]:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] < 2:
        raise InvalidMatrixError(f"expected a square matrix of size >= 2, got shape {U.shape}")
    return U


def fourier_matrix(N: int) -> NDArray[np.complexfloating]:
    """Fourier matrix with entries exp(2πi jk/N)/√N.

    Args:
        N (int): Dimension, at least 2.

    Returns:
        NDArray[np.complexfloating]: The N×N unitary Fourier matrix. Its columns form the
        Fourier basis, which is unbiased with respect to the computational basis.

    Raises:
        InvalidDimensionError: If N < 2.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> F = cliffordtori.fourier_matrix(3)
        >>> np.allclose(F @ F.conj().T, np.eye(3))
        True

    """
    N = _check_dimension(N)
    jk = np.outer(np.arange(N), np.arange(N))
    return np.exp(2j * np.pi * jk / N) / np.sqrt(N)


def haar_random_unitary(N: int, seed: SeedLike = None) -> NDArray[np.complexfloating]:
    """Haar-distributed random unitary.

    Fills an N×N matrix with independent standard complex Gaussians, orthonormalizes its
    columns with a QR decomposition and multiplies each column by the phase of the matching
    diagonal entry of the triangular factor, which makes the distribution exactly Haar.

    Args:
        N (int): Dimension, at least 2.
        seed (int, SeedSequence or Generator, optional): Source of randomness. The same integer
            seed always returns the same matrix. Defaults to None (fresh entropy).

    Returns:
        NDArray[np.complexfloating]: An N×N unitary matrix.

    References:
        - F. Mezzadri, How to generate random matrices from the classical compact groups,
          Notices of the AMS 54 (2007) 592.

    Example:
        >>> import cliffordtori
        >>> U = cliffordtori.haar_random_unitary(3, seed=42)
        >>> cliffordtori.is_unitary(U)
        True

    """
    N = _check_dimension(N)
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def is_unitary(U, tol: float = 1e-12) -> bool:
    """True if U†U equals the identity within `tol` (max-abs deviation)."""
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    deviation = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
    return bool(deviation < tol)


def check_unitary(U, tol: float = 1e-8) -> NDArray[np.complexfloating]:
    """Return U as a complex array, raising InvalidMatrixError if it is not unitary within tol."""
    U = _as_square(U)
    if not is_unitary(U, tol):
        deviation = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
        raise InvalidMatrixError(f"matrix is not unitary: max |U^†U - 1| = {deviation:.3e}")
    return U


def _unit_phase(x: NDArray[np.complexfloating]) -> NDArray[np.complexfloating]:
    modulus = np.abs(x)
    phase = np.ones_like(x)
    nonzero = modulus > _ZERO
    phase[nonzero] = x[nonzero] / modulus[nonzero]
    return phase


def _ordered(U: NDArray[np.complexfloating]) -> NDArray[np.complexfloating]:
    moduli = np.abs(U)
    i, j = np.unravel_index(np.argmin(moduli), moduli.shape)
    rows = np.arange(U.shape[0])
    cols = np.arange(U.shape[1])
    rows[[0, i]] = rows[[i, 0]]
    cols[[0, j]] = cols[[j, 0]]
    U = U[np.ix_(rows, cols)]
    # The smallest entry now sits at (0,0); sort the rest of the first column and row
    row_order = np.concatenate(([0], 1 + np.argsort(np.abs(U[1:, 0]), kind="stable")))
    col_order = np.concatenate(([0], 1 + np.argsort(np.abs(U[0, 1:]), kind="stable")))
    return U[np.ix_(row_order, col_order)]


def dephase(U, order: bool = False) -> DephaseResult:
    """Dephased form of a unitary.

    Multiplies U from both sides by diagonal unitaries so that its first row and first column
    become real and nonnegative. Matrices that differ only by such enphasing relate the same
    pair of Clifford tori, so the dephased matrix labels the equivalence class.

    Args:
        U (NDArray[np.complexfloating]): Square matrix.
        order (bool, optional): If True, first permute rows and columns so that the first row
            and the first column are nondecreasing in modulus (ordered dephased form).
            Defaults to False.

    Returns:
        DephaseResult: The dephased matrix and a `degenerate` flag. A zero entry in the first
        row or column cannot be made positive; such matrices lie on facets of Birkhoff's
        polytope and are returned with `degenerate=True` instead of being permuted silently.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> F = cliffordtori.fourier_matrix(3)
        >>> D = np.diag(np.exp(1j * np.array([0.3, 1.1, -2.0])))
        >>> result = cliffordtori.dephase(D @ F)
        >>> np.allclose(result.matrix, F), result.degenerate
        (True, False)

    """
    U = _as_square(U)
    if order:
        U = _ordered(U)

    degenerate = bool(np.any(np.abs(U[0, :]) <= _ZERO) or np.any(np.abs(U[:, 0]) <= _ZERO))

    V = U * np.conj(_unit_phase(U[0, :]))[np.newaxis, :]
    V = V * np.conj(_unit_phase(V[:, 0]))[:, np.newaxis]
    return DephaseResult(V, degenerate)


def unistochastic_projection(U) -> NDArray[np.floating]:
    """Entry-wise squared moduli |U_ij|², a bistochastic matrix when U is unitary.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> B = cliffordtori.unistochastic_projection(cliffordtori.fourier_matrix(3))
        >>> np.allclose(B, 1 / 3)
        True

    """
    U = np.asarray(U, dtype=np.complex128)
    return U.real**2 + U.imag**2


def van_der_waerden(N: int = 3) -> NDArray[np.floating]:
    """Bistochastic matrix with all entries 1/N, the centre of Birkhoff's polytope."""
    N = _check_dimension(N)
    return np.full((N, N), 1.0 / N)


def is_odd_prime(p) -> bool:
    if int(p) != p or p < 3 or p % 2 == 0:
        return False
    p = int(p)
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _check_odd_prime(p) -> int:
    if not is_odd_prime(p):
        raise InvalidDimensionError(f"p must be an odd prime, got {p}")
    return int(p)


def extended_euclid(a: int, b: int) -> ExtendedEuclidResult:
    """Extended Euclidean algorithm: gcd(a, b) together with x, y such that ax + by = gcd."""
    old_r, r = int(a), int(b)
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_x, x = x, old_x - quotient * x
        old_y, y = y, old_y - quotient * y
    return ExtendedEuclidResult(old_r, old_x, old_y)


def modular_inverse(a: int, p: int) -> int:
    """Inverse of a modulo p.

    Raises:
        ValueError: If a has no inverse modulo p.

    """
    result = extended_euclid(int(a) % int(p), int(p))
    if result.gcd != 1:
        raise ValueError(f"{a} has no inverse modulo {p}")
    return result.x % int(p)


def mub_circulant_vector(p: int, z: int, a: int) -> NDArray[np.complexfloating]:
    """Vector `a` of the circulant unbiased basis labelled `z` in odd prime dimension p.

    Component r equals ω^{(r² - 2ra)/(2z)} with ω = exp(2πi/p), all arithmetic in the exponent
    taken modulo p and 1/(2z) the modular inverse of 2z. The first component is 1, so the
    vector is already in the affine chart used by the solver; its phases are the angles α of
    an intersection point of the computational and Fourier Clifford tori.

    Args:
        p (int): Odd prime dimension.
        z (int): Basis label, 1 <= z <= p - 1.
        a (int): Vector label, 0 <= a <= p - 1.

    Returns:
        NDArray[np.complexfloating]: p unimodular components.

    Raises:
        InvalidDimensionError: If p is not an odd prime.
        InvalidLabelError: If z is divisible by p.

    References:
        - I. D. Ivanovic, Geometrical description of quantal state determination,
          J. Phys. A 14 (1981) 3241.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> v = cliffordtori.mub_circulant_vector(3, 1, 0)
        >>> w = np.exp(2j * np.pi / 3)
        >>> np.allclose(v, [1, w**2, w**2])
        True

    """
    p = _check_odd_prime(p)
    if int(z) % p == 0:
        raise InvalidLabelError(f"basis label z must be nonzero modulo {p}, got {z}")
    inverse = modular_inverse(2 * int(z), p)
    r = np.arange(p)
    exponents = ((r * r - 2 * r * int(a)) * inverse) % p
    return np.exp(2j * np.pi * exponents / p)


def torus_image(U, alpha) -> NDArray[np.complexfloating]:
    """Image U·(1, e^{iα₁}, ..., e^{iα_{N-1}}) of a point of the computational Clifford torus.

    `alpha` may carry leading batch dimensions, (..., N-1); the result then has shape (..., N).
    """
    U = np.asarray(U, dtype=np.complex128)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape[-1] != U.shape[0] - 1:
        raise ValueError(
            f"alpha must have {U.shape[0] - 1} components for a {U.shape[0]}x{U.shape[0]} matrix"
        )
    e = np.concatenate([np.ones(alpha.shape[:-1] + (1,)), np.exp(1j * alpha)], axis=-1)
    return e @ U.T


def clifford_torus_coordinates(psi) -> CliffordTorusPoint:
    """Probabilities p_i = |ψ_i|²/‖ψ‖² and phases ν_i = arg(ψ_i/ψ_0) in [0, 2π) of a state.

    Phases of vanishing components, and all phases when ψ_0 vanishes, are measured from 0.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    norm2 = np.sum(np.abs(psi) ** 2)
    if psi.ndim != 1 or psi.size < 2 or norm2 == 0:
        raise ValueError("psi must be a nonzero vector with at least two components")
    p = np.abs(psi) ** 2 / norm2
    reference = _unit_phase(psi[:1])[0]
    nu = np.where(np.abs(psi[1:]) > _ZERO, np.angle(psi[1:] / reference), 0.0)
    return CliffordTorusPoint(p, np.mod(nu, 2 * np.pi))


def _check_probability(p) -> NDArray[np.floating]:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise InvalidProbabilityError("p must be a 1D probability vector")
    if np.any(p < -1e-14) or abs(np.sum(p) - 1.0) > 1e-12:
        raise InvalidProbabilityError(
            "p must have nonnegative entries summing to 1, got " + np.array2string(p)
        )
    return p


def induced_metric(p) -> NDArray[np.floating]:
    """Flat metric induced on the Clifford torus with probability vector p.

    For N = 3 this is [[p₁(1-p₁), -p₁p₂], [-p₁p₂, p₂(1-p₂)]] in the phase coordinates
    (ν₁, ν₂); in general g_rs = p_r δ_rs - p_r p_s for r, s = 1..N-1.

    Args:
        p (NDArray[np.floating]): Probability vector.

    Returns:
        NDArray[np.floating]: The (N-1)×(N-1) metric tensor.

    Raises:
        InvalidProbabilityError: If p has negative entries or does not sum to 1.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> g = cliffordtori.induced_metric([1 / 3, 1 / 3, 1 / 3])
        >>> np.allclose(g, [[2 / 9, -1 / 9], [-1 / 9, 2 / 9]])
        True

    """
    p = _check_probability(p)
    q = p[1:]
    return np.diag(q) - np.outer(q, q)


def torus_area_density(p) -> float:
    """Volume density √det g of the torus with probability vector p, largest for the flat vector."""
    return float(np.sqrt(max(np.linalg.det(induced_metric(p)), 0.0)))


def affine_coordinates(w) -> NDArray[np.complexfloating]:
    """Affine coordinates w_s/w_0, s = 1..N-1, of a vector with nonvanishing first component."""
    w = np.asarray(w, dtype=np.complex128)
    if abs(w[0]) < 1e-10:
        raise ChartFailureError("first component vanishes, affine chart undefined")
    return w[1:] / w[0]

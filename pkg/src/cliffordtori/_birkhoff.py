from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from ._errors import (
    InvalidProbabilityError,
    NotBistochasticError,
    NotUnistochasticError,
    OutOfSectionError,
)
from ._matcore import SeedLike, dephase, van_der_waerden

# Position of each weight π_i in B = Σ π_i P_i; this fixes the labelling of the permutations
_LABELLING = (
    ((0, 1), (2, 3), (4, 5)),
    ((2, 4), (0, 5), (1, 3)),
    ((3, 5), (1, 4), (0, 2)),
)


def _build_permutations() -> NDArray[np.floating]:
    P = np.zeros((6, 3, 3))
    for r, row in enumerate(_LABELLING):
        for c, labels in enumerate(row):
            for i in labels:
                P[i, r, c] = 1.0
    P.setflags(write=False)
    return P


PERMUTATIONS = _build_permutations()
EVEN_PERMUTATIONS = (0, 3, 4)
# Even minus odd permutations: the one direction in which the weights are not unique
DECOMPOSITION_KERNEL = np.array([1.0, -1.0, -1.0, 1.0, 1.0, -1.0])

_DESIGN = PERMUTATIONS.reshape(6, 9).T
_SQRT2 = np.sqrt(2.0)
_MEMBER_TOL = 1e-12
# Entries below this are chart round-off and are treated as exact zeros
_ZERO_ENTRY = 1e-14


@dataclass(frozen=True)
class UnistochasticCertificate:
    """Outcome of the chain-links test.

    Attributes:
        member (bool): True if the matrix is unistochastic.
        links (NDArray[np.floating]): Link lengths L_k = √(B_0k B_1k).
        margin (float): Smallest slack L_i + L_j - L_k of the three triangle inequalities.
            Positive inside, zero on the orthostochastic boundary, negative outside.
    """

    member: bool
    links: NDArray[np.floating]
    margin: float


def _check_bistochastic(B, tol: float = 1e-10) -> NDArray[np.floating]:
    B = np.asarray(B, dtype=np.float64)
    if B.shape != (3, 3):
        raise NotBistochasticError(f"expected a 3x3 matrix, got shape {B.shape}")
    if (
        np.any(B < -tol)
        or np.abs(B.sum(axis=0) - 1).max() > tol
        or np.abs(B.sum(axis=1) - 1).max() > tol
    ):
        raise NotBistochasticError("rows and columns must be nonnegative and sum to 1")
    return B


def permutation_decomposition(B, tol: float = 1e-12) -> NDArray[np.floating]:
    """Weights π of a 3×3 bistochastic matrix over the six permutation matrices.

    The permutations are labelled so that

        B = [[π0+π1, π2+π3, π4+π5],
             [π2+π4, π0+π5, π1+π3],
             [π3+π5, π1+π4, π0+π2]].

    The weights are unique only up to multiples of (1,-1,-1,1,1,-1) (even minus odd
    permutations). The returned weights are the point of the feasible segment with the
    smallest Euclidean norm.

    Args:
        B (NDArray[np.floating]): 3×3 bistochastic matrix.
        tol (float, optional): Tolerance on negative weights. Defaults to 1e-12.

    Returns:
        NDArray[np.floating]: Six nonnegative weights summing to 1 with Σ π_i P_i = B.

    Raises:
        NotBistochasticError: If B is not bistochastic, so no nonnegative weights exist.

    References:
        - W. Tadej and K. Życzkowski, A concise guide to complex Hadamard matrices,
          Open Syst. Inf. Dyn. 13 (2006) 133.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> pi = cliffordtori.permutation_decomposition(np.full((3, 3), 1 / 3))
        >>> np.allclose(pi, 1 / 6)
        True

    """
    B = _check_bistochastic(B)
    # Minimum norm solution, orthogonal to the kernel direction
    pi, *_ = np.linalg.lstsq(_DESIGN, B.ravel(), rcond=None)

    even = DECOMPOSITION_KERNEL > 0
    lower = np.max(-pi[even])
    upper = np.min(pi[~even])
    if lower > upper + tol:
        raise NotBistochasticError("no nonnegative permutation weights reproduce B")
    t = float(np.clip(0.0, lower, upper)) if lower <= upper else 0.5 * (lower + upper)

    pi = pi + t * DECOMPOSITION_KERNEL
    pi[np.abs(pi) < tol] = 0.0
    return np.clip(pi, 0.0, None)


def bistochastic_distance(B1, B2) -> float:
    """Euclidean distance D = √(½ Tr[(B1 - B2)(B1 - B2)ᵀ]) between bistochastic matrices.

    In this normalization transpositions lie √2 and 3-cycles √3 from the identity, and every
    permutation matrix lies at distance 1 from the van der Waerden matrix.
    """
    d = np.asarray(B1, dtype=np.float64) - np.asarray(B2, dtype=np.float64)
    return np.sqrt(0.5 * np.sum(d * d, axis=(-2, -1)))


def unistochastic_margin(B) -> NDArray[np.floating]:
    """Chain-links margin of one matrix or of a (..., 3, 3) stack of bistochastic matrices."""
    B = np.asarray(B, dtype=np.float64)
    links = np.sqrt(np.clip(B[..., 0, :] * B[..., 1, :], 0.0, None))
    return links.sum(axis=-1) - 2.0 * links.max(axis=-1)


def is_unistochastic(B) -> UnistochasticCertificate:
    """Chain-links test for a 3×3 bistochastic matrix.

    B is unistochastic exactly when the link lengths L_k = √(B_0k B_1k) can close a triangle,
    since then the first two rows of a unitary can be made orthogonal. The triangle is
    degenerate precisely for orthostochastic matrices, which form the boundary of the
    unistochastic set.

    Args:
        B (NDArray[np.floating]): 3×3 bistochastic matrix.

    Returns:
        UnistochasticCertificate: Membership, link lengths and margin.

    Example:
        >>> import cliffordtori
        >>> P = cliffordtori.PERMUTATIONS
        >>> schur = 0.5 * (P[3] + P[4])
        >>> cliffordtori.is_unistochastic(schur).member
        False

    """
    B = _check_bistochastic(B)
    links = np.sqrt(np.clip(B[0] * B[1], 0.0, None))
    margin = float(links.sum() - 2.0 * links.max())
    return UnistochasticCertificate(margin >= -_MEMBER_TOL, links, margin)


def reconstruct_unitary(B) -> NDArray[np.complexfloating]:
    """Dephased unitary U with |U_ij|² = B_ij for a unistochastic 3×3 matrix.

    The first row is √B_0k. The second row is √B_1k e^{iθ_k}, where the angles θ_k close the
    triangle Σ_k L_k e^{iθ_k} = 0 formed by the links (law of cosines). The third row is the
    complex conjugate of the cross product of the first two. On the boundary the triangle is
    degenerate and the result is real. Entries below 1e-14 count as zeros.

    Args:
        B (NDArray[np.floating]): 3×3 unistochastic matrix.

    Returns:
        NDArray[np.complexfloating]: A dephased unitary.

    Raises:
        NotUnistochasticError: If the links violate a triangle inequality.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> U = cliffordtori.reconstruct_unitary(np.full((3, 3), 1 / 3))
        >>> np.allclose(np.abs(U) ** 2, 1 / 3)
        True

    """
    certificate = is_unistochastic(B)
    if not certificate.member:
        raise NotUnistochasticError(
            f"links {np.round(certificate.links, 6)} do not close a triangle "
            f"(margin {certificate.margin:.3e})"
        )
    B = np.asarray(B, dtype=np.float64).copy()
    B[B < _ZERO_ENTRY] = 0.0
    links = np.sqrt(B[0] * B[1])

    # The longest link closes the triangle
    small, mid, large = np.argsort(links, kind="stable")
    a, b, c = links[small], links[mid], links[large]
    phases = np.ones(3, dtype=np.complex128)
    if a * b > 0:
        cos_phi = np.clip((c * c - a * a - b * b) / (2 * a * b), -1.0, 1.0)
        phases[small] = np.exp(1j * np.arccos(cos_phi))
    partial = b + a * phases[small]
    if abs(partial) > 0:
        phases[large] = -partial / abs(partial)

    row0 = np.sqrt(B[0]).astype(np.complex128)
    row1 = np.sqrt(B[1]) * phases
    row2 = np.conj(np.cross(row0, row1))
    return dephase(np.vstack([row0, row1, row2])).matrix


def _complete_block(block: NDArray[np.floating]) -> NDArray[np.floating]:
    b00, b01, b10, b11 = np.moveaxis(block, -1, 0)
    B = np.empty(block.shape[:-1] + (3, 3))
    B[..., 0, 0], B[..., 0, 1], B[..., 0, 2] = b00, b01, 1 - b00 - b01
    B[..., 1, 0], B[..., 1, 1], B[..., 1, 2] = b10, b11, 1 - b10 - b11
    B[..., 2, 0], B[..., 2, 1] = 1 - b00 - b10, 1 - b01 - b11
    B[..., 2, 2] = b00 + b01 + b10 + b11 - 1
    return B


def sample_birkhoff(seed: SeedLike = None, size: Optional[int] = None) -> NDArray[np.floating]:
    """Uniform random point(s) of Birkhoff's polytope for N = 3.

    Draws the top-left 2×2 block uniformly from the unit box and keeps it when the completed
    matrix is nonnegative. The block entries are affine coordinates on the polytope, so the
    accepted samples are uniform with respect to its Euclidean volume.

    Args:
        seed (int, SeedSequence or Generator, optional): Source of randomness. Defaults to None.
        size (int, optional): Number of samples. Defaults to None (a single 3×3 matrix).

    Returns:
        NDArray[np.floating]: A 3×3 matrix, or a (size, 3, 3) stack.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> B = cliffordtori.sample_birkhoff(seed=1)
        >>> np.allclose(B.sum(axis=0), 1) and np.allclose(B.sum(axis=1), 1)
        True

    """
    rng = np.random.default_rng(seed)
    count = 1 if size is None else int(size)
    accepted = []
    n_accepted = 0
    while n_accepted < count:
        x = rng.random((max(4 * (count - n_accepted), 64), 4))
        b00, b01, b10, b11 = x.T
        keep = (
            (b00 + b01 <= 1)
            & (b10 + b11 <= 1)
            & (b00 + b10 <= 1)
            & (b01 + b11 <= 1)
            & (b00 + b01 + b10 + b11 >= 1)
        )
        accepted.append(x[keep])
        n_accepted += int(keep.sum())
    B = _complete_block(np.concatenate(accepted)[:count])
    return B[0] if size is None else B


def facet_vertices(row: int, col: int) -> Tuple[int, int, int, int]:
    """Labels of the four permutations spanning the facet B[row, col] = 0.

    The order alternates even and odd permutations, so consecutive vertices (cyclically) are
    joined by √2 edges and the two diagonals are the √3 edges.
    """
    if row not in (0, 1, 2) or col not in (0, 1, 2):
        raise ValueError("row and col must be 0, 1 or 2")
    labels = [i for i in range(6) if PERMUTATIONS[i, row, col] == 0]
    even = [i for i in labels if i in EVEN_PERMUTATIONS]
    odd = [i for i in labels if i not in EVEN_PERMUTATIONS]
    return (even[0], odd[0], even[1], odd[1])


def polytope_edges(vertices) -> list:
    """Edges between the given permutation labels: (i, j, length, unistochastic)."""
    edges = []
    vertices = list(vertices)
    for k, i in enumerate(vertices):
        for j in vertices[k + 1 :]:
            length = float(bistochastic_distance(PERMUTATIONS[i], PERMUTATIONS[j]))
            midpoint = 0.5 * (PERMUTATIONS[i] + PERMUTATIONS[j])
            edges.append((i, j, length, is_unistochastic(midpoint).member))
    return edges


@dataclass(frozen=True)
class CrossSectionSpec:
    """A two-dimensional slice of Birkhoff's polytope for N = 3.

    Use the constructors `facet`, `triangle`, `hexagon` and `parabolic`. Apart from the facet,
    every section is an affine plane through the van der Waerden matrix B★ with a frame that is
    orthonormal for the distance D, so (u, v) distances equal matrix distances. The facet
    section is the ruled patch of orthostochastic matrices spanned by the four √2 edges of the
    facet, charted bilinearly over the unit square.

    Attributes:
        kind (str): One of "facet", "triangle", "hexagon", "parabolic".
        row, col (int): Pinned zero entry of a facet.
        p (tuple): Probability vector of a hexagonal section B p = e.
        edge (tuple): Permutation labels of the √2 edge in a parabolic section.
    """

    kind: str
    row: int = 0
    col: int = 0
    p: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    edge: Tuple[int, int] = (0, 1)
    _frame: NDArray[np.floating] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "facet":
            frame = PERMUTATIONS[list(facet_vertices(self.row, self.col))]
        elif self.kind == "triangle":
            centre = van_der_waerden(3)
            frame = np.stack(
                [PERMUTATIONS[0] - centre, (PERMUTATIONS[3] - PERMUTATIONS[4]) / np.sqrt(3.0)]
            )
        elif self.kind == "hexagon":
            frame = _hexagon_frame(self.p)
        elif self.kind == "parabolic":
            frame = _parabolic_frame(self.edge)
        else:
            raise ValueError(f"unknown cross section kind {self.kind!r}")
        frame.setflags(write=False)
        object.__setattr__(self, "_frame", frame)

    @classmethod
    def facet(cls, row: int = 0, col: int = 0) -> "CrossSectionSpec":
        return cls("facet", row=row, col=col)

    @classmethod
    def triangle(cls) -> "CrossSectionSpec":
        return cls("triangle")

    @classmethod
    def hexagon(cls, p=(1.0, 0.0, 0.0)) -> "CrossSectionSpec":
        return cls("hexagon", p=tuple(float(x) for x in p))

    @classmethod
    def parabolic(cls, edge=(0, 1)) -> "CrossSectionSpec":
        return cls("parabolic", edge=tuple(int(i) for i in edge))

    @property
    def centre_uv(self) -> Tuple[float, float]:
        return (0.5, 0.5) if self.kind == "facet" else (0.0, 0.0)

    @property
    def centre(self) -> NDArray[np.floating]:
        return self.matrix(*self.centre_uv)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """Box (u_min, u_max, v_min, v_max) containing the section."""
        # Every bistochastic matrix lies within distance 1 of the centre
        return (0.0, 1.0, 0.0, 1.0) if self.kind == "facet" else (-1.0, 1.0, -1.0, 1.0)

    def matrix(self, u: float, v: float) -> NDArray[np.floating]:
        """Chart map without the domain check."""
        if self.kind == "facet":
            a, b, c, d = self._frame
            return (1 - u) * (1 - v) * a + u * (1 - v) * b + u * v * c + (1 - u) * v * d
        return van_der_waerden(3) + u * self._frame[0] + v * self._frame[1]

    def contains(self, u: float, v: float, tol: float = 1e-12) -> bool:
        if self.kind == "facet":
            return bool(-tol <= u <= 1 + tol and -tol <= v <= 1 + tol)
        return bool(self.matrix(u, v).min() >= -tol)

    def exit_distance(self, direction) -> float:
        """Distance from the centre to the section boundary along a unit (u, v) direction."""
        du, dv = direction
        if self.kind == "facet":
            steps = [0.5 / abs(x) for x in (du, dv) if abs(x) > 1e-15]
            return min(steps)
        X = du * self._frame[0] + dv * self._frame[1]
        negative = X < -1e-15
        return float(np.min(-van_der_waerden(3)[negative] / X[negative]))


def _hexagon_frame(p) -> NDArray[np.floating]:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (3,) or np.any(p < -1e-14) or abs(p.sum() - 1) > 1e-12:
        raise InvalidProbabilityError("hexagon sections need a probability 3-vector")
    q = p - 1.0 / 3.0
    if np.abs(q).max() < 1e-12:
        raise InvalidProbabilityError("the flat vector does not cut out a cross section")
    # Linear constraints on X = B - B★: zero row sums, zero column sums and X q = 0
    constraints = []
    for i in range(3):
        rows = np.zeros((3, 3))
        rows[i, :] = 1
        cols = np.zeros((3, 3))
        cols[:, i] = 1
        image = np.zeros((3, 3))
        image[i, :] = q
        constraints.extend([rows.ravel(), cols.ravel(), image.ravel()])
    basis = null_space(np.array(constraints))
    return _SQRT2 * basis.T.reshape(2, 3, 3)


def _parabolic_frame(edge) -> NDArray[np.floating]:
    i, j = edge
    Pi, Pj = PERMUTATIONS[i], PERMUTATIONS[j]
    if not np.isclose(bistochastic_distance(Pi, Pj), _SQRT2):
        raise ValueError(f"permutations {i} and {j} are not joined by a unistochastic edge")
    towards_edge = 0.5 * (Pi + Pj) - van_der_waerden(3)
    along_edge = Pj - Pi
    return np.stack(
        [
            towards_edge / bistochastic_distance(towards_edge, 0.0),
            along_edge / bistochastic_distance(along_edge, 0.0),
        ]
    )


def cross_section_point(spec: CrossSectionSpec, u: float, v: float) -> NDArray[np.floating]:
    """Bistochastic matrix at chart coordinates (u, v) of a cross section.

    Args:
        spec (CrossSectionSpec): The section.
        u (float): First chart coordinate.
        v (float): Second chart coordinate.

    Returns:
        NDArray[np.floating]: A 3×3 bistochastic matrix.

    Raises:
        OutOfSectionError: If (u, v) lies outside the section.

    Example:
        >>> import numpy as np
        >>> import cliffordtori
        >>> spec = cliffordtori.CrossSectionSpec.triangle()
        >>> np.allclose(cliffordtori.cross_section_point(spec, 0, 0), 1 / 3)
        True

    """
    if not spec.contains(u, v):
        raise OutOfSectionError(f"({u}, {v}) lies outside the {spec.kind} section")
    return np.clip(spec.matrix(u, v), 0.0, None)


def section_boundary_trace(
    spec: CrossSectionSpec, resolution: int = 360, tol: float = 1e-12
) -> NDArray[np.floating]:
    """Points (u, v) of the orthostochastic boundary inside a cross section.

    Casts `resolution` rays from the section centre and bisects the chain-links margin along
    each ray that leaves the unistochastic set before it leaves the section. The unistochastic
    set is star shaped about the centre, so each ray crosses at most once. Sections lying
    entirely in the unistochastic set give an empty trace. For a facet section the patch
    itself is orthostochastic and the trace is its outline, the four √2 edges.

    Args:
        spec (CrossSectionSpec): The section.
        resolution (int, optional): Number of rays. Defaults to 360.
        tol (float, optional): Width of the final bisection interval. Defaults to 1e-12.

    Returns:
        NDArray[np.floating]: Array of shape (k, 2), k <= resolution.

    """
    if spec.kind == "facet":
        s = 4.0 * np.arange(resolution) / resolution
        side, t = np.divmod(s, 1.0)
        u = np.select([side == 0, side == 1, side == 2], [t, 1.0, 1.0 - t], 0.0)
        v = np.select([side == 0, side == 1, side == 2], [0.0, t, 1.0], 1.0 - t)
        return np.column_stack([u, v])

    points = []
    u0, v0 = spec.centre_uv
    for angle in 2 * np.pi * np.arange(resolution) / resolution:
        direction = (np.cos(angle), np.sin(angle))
        hi = spec.exit_distance(direction) * (1 - 1e-9)

        def margin(t):
            return unistochastic_margin(
                spec.matrix(u0 + t * direction[0], v0 + t * direction[1])
            )

        if margin(hi) >= -_MEMBER_TOL:
            continue
        lo = 0.0
        for _ in range(200):
            if hi - lo < tol:
                break
            mid = 0.5 * (lo + hi)
            if margin(mid) >= -_MEMBER_TOL:
                lo = mid
            else:
                hi = mid
        points.append((u0 + lo * direction[0], v0 + lo * direction[1]))
    return np.array(points).reshape(-1, 2)

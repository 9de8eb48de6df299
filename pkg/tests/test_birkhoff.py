import itertools

import cliffordtori
import numpy as np
import pytest

P = cliffordtori.PERMUTATIONS
B_STAR = np.full((3, 3), 1 / 3)


def test_permutation_labelling():
    # 1. Six distinct permutation matrices
    for k in range(6):
        np.testing.assert_array_equal(P[k].sum(axis=0), 1)
        np.testing.assert_array_equal(P[k].sum(axis=1), 1)
    assert len({P[k].tobytes() for k in range(6)}) == 6

    # 2. P0 is the identity; the even labels are the identity and the two 3-cycles
    np.testing.assert_array_equal(P[0], np.eye(3))
    for k in range(6):
        parity = round(np.linalg.det(P[k]))
        assert (parity == 1) == (k in cliffordtori.EVEN_PERMUTATIONS)

    # 3. The kernel direction leaves the weighted sum unchanged
    kernel = cliffordtori.DECOMPOSITION_KERNEL
    np.testing.assert_allclose(np.tensordot(kernel, P, axes=1), 0)

    # 4. The table is read-only
    with pytest.raises(ValueError):
        P[0, 0, 0] = 2.0


def test_bistochastic_distance():
    # 1. Edge lengths: √2 between permutations of opposite parity, √3 otherwise
    even = cliffordtori.EVEN_PERMUTATIONS
    for i, j in itertools.combinations(range(6), 2):
        expected = np.sqrt(3) if ((i in even) == (j in even)) else np.sqrt(2)
        assert abs(cliffordtori.bistochastic_distance(P[i], P[j]) - expected) < 1e-12

    # 2. Outsphere radius 1
    for k in range(6):
        assert abs(cliffordtori.bistochastic_distance(B_STAR, P[k]) - 1) < 1e-12

    # 3. Broadcasting over a stack
    d = cliffordtori.bistochastic_distance(P, B_STAR)
    np.testing.assert_allclose(d, 1, atol=1e-12)


def test_distance_is_a_metric():
    # 1. Triangle inequality on sampled triples
    samples = cliffordtori.sample_birkhoff(seed=8, size=3000).reshape(1000, 3, 3, 3)
    A, B, C = np.moveaxis(samples, 1, 0)
    ab = cliffordtori.bistochastic_distance(A, B)
    bc = cliffordtori.bistochastic_distance(B, C)
    ac = cliffordtori.bistochastic_distance(A, C)
    assert np.all(ac <= ab + bc + 1e-12)

    # 2. Symmetric and zero only on the diagonal
    np.testing.assert_allclose(ab, cliffordtori.bistochastic_distance(B, A), atol=1e-15)
    assert np.all(ab > 0)
    np.testing.assert_allclose(cliffordtori.bistochastic_distance(A, A), 0, atol=1e-15)


def test_unistochastic_set_is_star_shaped():
    # 1. Along a thousand rays from B★ membership switches off at most once
    rng = np.random.default_rng(5)
    X = rng.standard_normal((1000, 3, 3))
    X -= X.mean(axis=2, keepdims=True)
    X -= X.mean(axis=1, keepdims=True)
    # Largest step keeping every entry of B★ + t X nonnegative
    ratio = np.where(X < 0, (1 / 3) / np.maximum(-X, 1e-300), np.inf)
    t_max = ratio.min(axis=(1, 2))
    t = np.linspace(0.0, 1.0, 200)[np.newaxis, :] * t_max[:, np.newaxis]
    B = B_STAR + t[..., np.newaxis, np.newaxis] * X[:, np.newaxis]
    member = cliffordtori.unistochastic_margin(B) >= -1e-12
    assert member[:, 0].all()
    switches = np.count_nonzero(member[:, :-1] & ~member[:, 1:], axis=1)
    returns = np.count_nonzero(~member[:, :-1] & member[:, 1:], axis=1)
    assert switches.max() <= 1
    assert returns.max() == 0


def test_permutation_decomposition():
    # 1. Van der Waerden matrix
    np.testing.assert_allclose(cliffordtori.permutation_decomposition(B_STAR), 1 / 6, atol=1e-12)

    # 2. Vertices decompose onto themselves
    for k in range(6):
        pi = cliffordtori.permutation_decomposition(P[k])
        np.testing.assert_allclose(pi, np.eye(6)[k], atol=1e-12)

    # 3. Random points: nonnegative weights summing to one that reproduce B
    for B in cliffordtori.sample_birkhoff(seed=4, size=200):
        pi = cliffordtori.permutation_decomposition(B)
        assert np.all(pi >= 0)
        assert abs(pi.sum() - 1) < 1e-10
        np.testing.assert_allclose(np.tensordot(pi, P, axes=1), B, atol=1e-10)

    # 4. Not bistochastic
    with pytest.raises(cliffordtori.NotBistochasticError):
        cliffordtori.permutation_decomposition(np.eye(3) * 0.9)
    with pytest.raises(cliffordtori.NotBistochasticError):
        cliffordtori.permutation_decomposition(np.ones((2, 2)) / 2)


def test_is_unistochastic():
    # 1. Van der Waerden matrix is inside, with links 1/3
    certificate = cliffordtori.is_unistochastic(B_STAR)
    assert certificate.member
    np.testing.assert_allclose(certificate.links, 1 / 3)
    assert abs(certificate.margin - 1 / 3) < 1e-15

    # 2. Permutations and midpoints of √2 edges lie on the boundary
    for i, j, length, member in cliffordtori.polytope_edges(range(6)):
        midpoint = 0.5 * (P[i] + P[j])
        margin = cliffordtori.is_unistochastic(midpoint).margin
        if abs(length - np.sqrt(2)) < 1e-12:
            assert member and abs(margin) < 1e-15
        else:
            assert not member and margin < -0.4

    # 3. Vectorized margin agrees with the scalar test
    samples = cliffordtori.sample_birkhoff(seed=9, size=300)
    margins = cliffordtori.unistochastic_margin(samples)
    assert margins.shape == (300,)
    for B, margin in zip(samples[:20], margins[:20]):
        assert abs(cliffordtori.is_unistochastic(B).margin - margin) < 1e-15

    # 4. Projections of unitaries are always members
    for seed in range(50):
        B = cliffordtori.unistochastic_projection(cliffordtori.haar_random_unitary(3, seed))
        assert cliffordtori.is_unistochastic(B).member


def test_reconstruct_unitary():
    # 1. Round trip on random unistochastic points
    samples = cliffordtori.sample_birkhoff(seed=2, size=300)
    members = [B for B in samples if cliffordtori.is_unistochastic(B).member]
    assert len(members) > 150
    for B in members:
        U = cliffordtori.reconstruct_unitary(B)
        assert cliffordtori.is_unitary(U, tol=1e-12)
        np.testing.assert_allclose(cliffordtori.unistochastic_projection(U), B, atol=1e-10)
        np.testing.assert_allclose(U[0].imag, 0, atol=1e-14)
        np.testing.assert_allclose(U[:, 0].imag, 0, atol=1e-14)

    # 2. Boundary points give real (orthogonal) matrices
    U = cliffordtori.reconstruct_unitary(0.5 * (P[0] + P[1]))
    np.testing.assert_allclose(U.imag, 0, atol=1e-12)

    # 3. Chart round-off on the same edge midpoint leaves the result unitary and block diagonal
    spec = cliffordtori.CrossSectionSpec.parabolic((0, 1))
    B = spec.matrix(*cliffordtori.parabolic_chart(1.0, 0.0)).clip(0.0, None)
    U = cliffordtori.reconstruct_unitary(B)
    assert cliffordtori.is_unitary(U, tol=1e-12)
    np.testing.assert_allclose(np.abs(U[0, 1:]), 0, atol=1e-12)
    np.testing.assert_allclose(np.abs(U[1:, 0]), 0, atol=1e-12)

    # 4. The Schur matrix of the two 3-cycles is not unistochastic
    with pytest.raises(cliffordtori.NotUnistochasticError):
        cliffordtori.reconstruct_unitary(0.5 * (P[3] + P[4]))


def test_sample_birkhoff():
    # 1. Reproducible, bistochastic and nonnegative
    B1 = cliffordtori.sample_birkhoff(seed=3, size=5000)
    B2 = cliffordtori.sample_birkhoff(seed=3, size=5000)
    assert np.array_equal(B1, B2)
    assert B1.shape == (5000, 3, 3)
    assert B1.min() >= 0
    np.testing.assert_allclose(B1.sum(axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(B1.sum(axis=2), 1, atol=1e-12)

    # 2. The mean is the centre of the polytope
    np.testing.assert_allclose(B1.mean(axis=0), B_STAR, atol=0.02)

    # 3. Single sample
    assert cliffordtori.sample_birkhoff(seed=3).shape == (3, 3)


def test_facet_vertices():
    for row, col in itertools.product(range(3), range(3)):
        vertices = cliffordtori.facet_vertices(row, col)
        # 1. All four vertices vanish at the pinned entry
        assert all(P[k][row, col] == 0 for k in vertices)
        # 2. Cyclic neighbours are √2 apart, diagonals √3
        for k in range(4):
            a, b = vertices[k], vertices[(k + 1) % 4]
            assert abs(cliffordtori.bistochastic_distance(P[a], P[b]) - np.sqrt(2)) < 1e-12
        for a, b in ((vertices[0], vertices[2]), (vertices[1], vertices[3])):
            assert abs(cliffordtori.bistochastic_distance(P[a], P[b]) - np.sqrt(3)) < 1e-12

    # 3. Invalid entry
    with pytest.raises(ValueError):
        cliffordtori.facet_vertices(3, 0)


def test_triangle_section():
    spec = cliffordtori.CrossSectionSpec.triangle()

    # 1. Centre and corners
    np.testing.assert_allclose(spec.centre, B_STAR, atol=1e-15)
    np.testing.assert_allclose(spec.matrix(1, 0), P[0], atol=1e-14)
    np.testing.assert_allclose(spec.matrix(-0.5, np.sqrt(3) / 2), P[3], atol=1e-14)
    np.testing.assert_allclose(spec.matrix(-0.5, -np.sqrt(3) / 2), P[4], atol=1e-14)

    # 2. Chart distances equal matrix distances
    d = cliffordtori.bistochastic_distance(spec.matrix(0.1, 0.2), spec.matrix(-0.3, 0.5))
    assert abs(d - np.hypot(0.4, 0.3)) < 1e-14

    # 3. Domain
    assert spec.contains(0, 0) and not spec.contains(-0.6, 0)
    assert abs(spec.exit_distance((-1.0, 0.0)) - 0.5) < 1e-14
    with pytest.raises(cliffordtori.OutOfSectionError):
        cliffordtori.cross_section_point(spec, 2, 0)

    # 4. Insphere radius of the unistochastic set and outsphere radius
    boundary = cliffordtori.section_boundary_trace(spec, resolution=360)
    radii = np.hypot(boundary[:, 0], boundary[:, 1])
    assert abs(radii.min() - 1 / 3) < 1e-4
    corners = [(1, 0), (-0.5, np.sqrt(3) / 2), (-0.5, -np.sqrt(3) / 2)]
    assert abs(max(np.hypot(u, v) for u, v in corners) - 1) < 1e-12

    # 5. Traced points lie on the boundary and can be reconstructed
    for u, v in boundary[::30]:
        B = cliffordtori.cross_section_point(spec, u, v)
        assert abs(cliffordtori.unistochastic_margin(B)) < 1e-8
        U = cliffordtori.reconstruct_unitary(B)
        assert cliffordtori.is_unitary(U, tol=1e-12)


def test_other_sections():
    # 1. Facet patch: corners are the four vertices, every point has the pinned zero
    spec = cliffordtori.CrossSectionSpec.facet(1, 2)
    vertices = cliffordtori.facet_vertices(1, 2)
    for (u, v), k in zip([(0, 0), (1, 0), (1, 1), (0, 1)], vertices):
        np.testing.assert_allclose(spec.matrix(u, v), P[k])
    B = cliffordtori.cross_section_point(spec, 0.3, 0.8)
    assert B[1, 2] == 0
    assert cliffordtori.is_unistochastic(B).member
    outline = cliffordtori.section_boundary_trace(spec, resolution=40)
    assert outline.shape == (40, 2)
    on_edge = np.isclose(outline, 0) | np.isclose(outline, 1)
    assert np.all(on_edge.any(axis=1))

    # 2. Hexagon: every point maps p to the flat vector / 3, frame orthonormal
    p = np.array([1.0, 0.0, 0.0])
    spec = cliffordtori.CrossSectionSpec.hexagon(p)
    for u, v in [(0, 0), (0.2, -0.1), (-0.3, 0.25)]:
        np.testing.assert_allclose(spec.matrix(u, v) @ p, 1 / 3, atol=1e-14)
    e1 = spec.matrix(1, 0) - B_STAR
    e2 = spec.matrix(0, 1) - B_STAR
    assert abs(cliffordtori.bistochastic_distance(e1, 0) - 1) < 1e-12
    assert abs(0.5 * np.sum(e1 * e2)) < 1e-12

    # 3. The flat vector does not define a section
    with pytest.raises(cliffordtori.InvalidProbabilityError):
        cliffordtori.CrossSectionSpec.hexagon((1 / 3, 1 / 3, 1 / 3))

    # 4. Parabolic sections need a √2 edge
    spec = cliffordtori.CrossSectionSpec.parabolic((0, 1))
    np.testing.assert_allclose(spec.centre, B_STAR, atol=1e-15)
    with pytest.raises(ValueError):
        cliffordtori.CrossSectionSpec.parabolic((0, 3))

    # 5. Unknown kind
    with pytest.raises(ValueError):
        cliffordtori.CrossSectionSpec("square")


if __name__ == "__main__":
    test_permutation_labelling()
    test_bistochastic_distance()
    test_distance_is_a_metric()
    test_unistochastic_set_is_star_shaped()
    test_permutation_decomposition()
    test_is_unistochastic()
    test_reconstruct_unitary()
    test_sample_birkhoff()
    test_facet_vertices()
    test_triangle_section()
    test_other_sections()

    print("All birkhoff tests passed!!")

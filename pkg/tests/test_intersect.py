import itertools

import cliffordtori
import numpy as np
import pytest


def _matched(expected, points, tol):
    """True if every expected phase point has a solver point within tol."""
    return all(
        any(cliffordtori.torus_distance(alpha, point.alpha) < tol for point in points)
        for alpha in expected
    )


def test_residual():
    F = cliffordtori.fourier_matrix(3)

    # 1. Flat vector maps to (√3, 0, 0)
    np.testing.assert_allclose(cliffordtori.residual(F, [0.0, 0.0]), [2, -1, -1], atol=1e-14)

    # 2. Identity: every point solves
    alpha = np.random.default_rng(0).uniform(0, 2 * np.pi, (10, 2))
    np.testing.assert_allclose(cliffordtori.residual(np.eye(3), alpha), 0, atol=1e-15)

    # 3. A MUB vector solves the Fourier equations
    v = cliffordtori.mub_circulant_vector(3, 1, 0)
    assert np.abs(cliffordtori.residual(F, np.angle(v[1:]))).max() < 1e-13

    # 4. Components sum to zero
    U = cliffordtori.haar_random_unitary(4, seed=1)
    f = cliffordtori.residual(U, np.random.default_rng(1).uniform(0, 2 * np.pi, (20, 3)))
    np.testing.assert_allclose(f.sum(axis=-1), 0, atol=1e-13)


def test_residual_jacobian():
    rng = np.random.default_rng(2)
    h = 1e-6

    # 1. Central finite differences
    for seed in range(5):
        U = cliffordtori.haar_random_unitary(4, seed)
        alpha = rng.uniform(0, 2 * np.pi, 3)
        J = cliffordtori.residual_jacobian(U, alpha)
        assert J.shape == (4, 3)
        for r in range(3):
            step = np.zeros(3)
            step[r] = h
            forward = cliffordtori.residual(U, alpha + step)
            backward = cliffordtori.residual(U, alpha - step)
            fd = (forward - backward) / (2 * h)
            np.testing.assert_allclose(J[:, r], fd, atol=1e-6)
        # 2. Columns sum to zero since Σ f_j vanishes identically
        np.testing.assert_allclose(J.sum(axis=0), 0, atol=1e-12)

    # 3. Identity
    J = cliffordtori.residual_jacobian(np.eye(3), [0.3, 2.0])
    np.testing.assert_allclose(J, 0, atol=1e-15)


def test_phase_helpers():
    # 1. Reduction to [0, 2π)
    alpha = cliffordtori.canonical_phases([-0.5, 2 * np.pi, 7.0])
    np.testing.assert_allclose(alpha, [2 * np.pi - 0.5, 0.0, 7.0 - 2 * np.pi])
    assert np.all((alpha >= 0) & (alpha < 2 * np.pi))

    # 2. Toroidal distance wraps around
    assert abs(cliffordtori.torus_distance([0.01, 0.0], [2 * np.pi - 0.01, 0.0]) - 0.02) < 1e-14
    d = cliffordtori.torus_distance(np.zeros((3, 2)), [np.pi, 0.1])
    np.testing.assert_allclose(d, np.pi)


def test_fourier_n3():
    F = cliffordtori.fourier_matrix(3)
    result = cliffordtori.find_intersections(F)

    # 1. Six transversal points with cancelling indices
    assert result.classification is cliffordtori.Classification.FINITE_TRANSVERSAL
    assert result.count == 6
    assert result.index_sum == 0
    for point in result.points:
        assert abs(point.index) == 1
        assert abs(abs(point.jac_det) - 3) < 1e-8

    # 2. The points are the six circulant MUB vectors
    expected = [
        np.angle(cliffordtori.mub_circulant_vector(3, z, a)[1:])
        for z, a in itertools.product((1, 2), range(3))
    ]
    assert _matched(expected, result.points, 1e-8)

    # 3. Their images have the affine coordinates listed for the Fourier pair
    w = np.exp(2j * np.pi / 3)
    images = [(w**2, w**2), (1, w), (w, 1), (w, w), (w**2, 1), (1, w**2)]
    for target in images:
        assert any(np.abs(point.z - np.array(target)).max() < 1e-8 for point in result.points)

    # 4. Each point re-evaluates to a small residual; history is recorded
    for point in result.points:
        assert np.abs(cliffordtori.residual(F, point.alpha)).max() < 1e-12
        assert np.all((point.alpha >= 0) & (point.alpha < 2 * np.pi))
    assert len(result.rounds) >= 3 and result.rounds[-1] == result.rounds[-2] == 6
    assert result.starts >= 3 * 128


def test_fourier_small_dimensions():
    # 1. N = 2: two points
    result = cliffordtori.find_intersections(cliffordtori.fourier_matrix(2))
    assert result.count == 2
    assert result.index_sum == 0
    assert _matched([[np.pi / 2], [3 * np.pi / 2]], result.points, 1e-8)

    # 2. N = 4: the tori meet along curves
    count = cliffordtori.count_intersections(cliffordtori.fourier_matrix(4))
    assert count == cliffordtori.CONTINUUM


def test_continuum():
    # 1. Identity and every permutation matrix
    for k in range(6):
        result = cliffordtori.find_intersections(cliffordtori.PERMUTATIONS[k])
        assert result.classification is cliffordtori.Classification.CONTINUUM
        assert result.count == cliffordtori.CONTINUUM
        assert result.points == ()
        witnesses = result.continuum_witnesses
        assert len(witnesses) > 50
        assert np.abs(cliffordtori.residual(cliffordtori.PERMUTATIONS[k], witnesses)).max() < 1e-12


def test_facet_centre():
    # 1. The centre of a facet relates tori meeting in four points
    spec = cliffordtori.CrossSectionSpec.facet(0, 0)
    U = cliffordtori.reconstruct_unitary(cliffordtori.cross_section_point(spec, 0.5, 0.5))
    result = cliffordtori.find_intersections(U)
    assert result.classification is cliffordtori.Classification.FINITE_TRANSVERSAL
    assert result.count == 4
    assert result.index_sum == 0


def test_enphasing_invariance():
    rng = np.random.default_rng(3)
    U = cliffordtori.haar_random_unitary(3, seed=21)
    base = cliffordtori.find_intersections(U)
    for _ in range(3):
        left = rng.uniform(0, 2 * np.pi, 3)
        right = rng.uniform(0, 2 * np.pi, 3)
        V = np.diag(np.exp(1j * left)) @ U @ np.diag(np.exp(1j * right))
        result = cliffordtori.find_intersections(V)
        # 1. Same count; points translate by the right-hand phases
        assert result.count == base.count
        shift = right[1:] - right[0]
        moved = [cliffordtori.canonical_phases(point.alpha - shift) for point in base.points]
        assert _matched(moved, result.points, 1e-7)
        # 2. The indices do not change
        assert sorted(p.index for p in result.points) == sorted(p.index for p in base.points)


def test_haar_counts():
    # 1. Counts are 4, 5 or 6; transversal sets have an even count and cancelling indices
    for seed in range(10):
        result = cliffordtori.find_intersections(cliffordtori.haar_random_unitary(3, seed))
        assert result.count in (4, 5, 6)
        if result.classification is cliffordtori.Classification.FINITE_TRANSVERSAL:
            assert result.count % 2 == 0
            assert result.index_sum == 0


def test_solver_errors():
    # 1. Non-unitary input
    with pytest.raises(cliffordtori.InvalidMatrixError):
        cliffordtori.find_intersections(2 * np.eye(3))

    # 2. A one-round budget cannot show a stable count
    cfg = cliffordtori.SolverConfig(min_rounds=1, max_rounds=1)
    with pytest.raises(cliffordtori.NonConvergedError) as info:
        cliffordtori.find_intersections(cliffordtori.fourier_matrix(3), cfg)
    assert len(info.value.rounds) == 1

    # 3. Inconsistent settings
    with pytest.raises(ValueError):
        cliffordtori.SolverConfig(dedup_tol=1e-3, merge_tol=1e-4)
    with pytest.raises(ValueError):
        cliffordtori.SolverConfig(residual_tol=0)


def test_grid_count():
    # 1. Brute-force count agrees with the multistart solver
    F = cliffordtori.fourier_matrix(3)
    assert cliffordtori.grid_count(F, resolution=200) == 6
    U = cliffordtori.haar_random_unitary(3, seed=4)
    assert cliffordtori.grid_count(U, resolution=400) == cliffordtori.count_intersections(U)

    # 2. Only N = 3
    with pytest.raises(cliffordtori.InvalidDimensionError):
        cliffordtori.grid_count(cliffordtori.fourier_matrix(4))


def test_scan_section():
    # 1. Small triangle scan: 6 points at interior grid points
    spec = cliffordtori.CrossSectionSpec.triangle()
    cells = cliffordtori.scan_section(spec, resolution=5)
    assert all(spec.contains(cell.u, cell.v) for cell in cells)
    centre = [cell for cell in cells if cell.u == 0 and cell.v == 0]
    assert len(centre) == 1 and centre[0].count == 6
    interior = [cell for cell in cells if cell.member and cell.margin > 1e-3]
    assert interior and all(cell.count == 6 for cell in interior)
    outside = [cell for cell in cells if not cell.member]
    assert outside and all(cell.count is None for cell in outside)


def test_triangle_boundary():
    # 1. On the deltoid four of the six points merge: three points, one of them singular
    spec = cliffordtori.CrossSectionSpec.triangle()
    trace = cliffordtori.section_boundary_trace(spec, resolution=24)
    # Stay away from the cusps at the permutation matrices
    samples = [(u, v) for u, v in trace if np.hypot(u, v) < 0.5]
    assert len(samples) >= 3
    for u, v in samples:
        U = cliffordtori.reconstruct_unitary(cliffordtori.cross_section_point(spec, u, v))
        result = cliffordtori.find_intersections(U)
        assert result.classification is cliffordtori.Classification.FINITE_DEGENERATE
        assert result.count == 3
        assert sum(point.index == 0 for point in result.points) == 1


def test_edge_midpoint_circles():
    # 1. The midpoint of a √2 edge relates tori meeting in two circles
    spec = cliffordtori.CrossSectionSpec.parabolic((0, 1))
    B = spec.matrix(*cliffordtori.parabolic_chart(1.0, 0.0)).clip(0.0, None)
    U = cliffordtori.reconstruct_unitary(B)
    result = cliffordtori.find_intersections(U)
    assert result.classification is cliffordtori.Classification.CONTINUUM
    witnesses = result.continuum_witnesses
    assert np.abs(cliffordtori.residual(U, witnesses)).max() < 1e-12

    # 2. The witnesses lie on the two circles α1 - α2 = π/2 and 3π/2
    gap = np.mod(witnesses[:, 0] - witnesses[:, 1], 2 * np.pi)
    on_circle = np.minimum(np.abs(gap - np.pi / 2), np.abs(gap - 3 * np.pi / 2)) < 1e-6
    assert on_circle.all()
    assert (gap < np.pi).any() and (gap > np.pi).any()


def test_hexagon_regions():
    # 1. The hexagon through the first column splits into a central 6 region and a 4 region
    spec = cliffordtori.CrossSectionSpec.hexagon((1.0, 0.0, 0.0))
    cells = cliffordtori.scan_section(spec, resolution=7)
    counted = [cell for cell in cells if isinstance(cell.count, int)]
    assert {cell.count for cell in counted} <= {4, 5, 6}
    centre = [cell for cell in counted if abs(cell.u) < 1e-12 and abs(cell.v) < 1e-12]
    assert len(centre) == 1 and centre[0].count == 6
    six = [np.hypot(cell.u, cell.v) for cell in counted if cell.count == 6]
    four = [np.hypot(cell.u, cell.v) for cell in counted if cell.count == 4]
    assert four and np.mean(six) < np.mean(four)


@pytest.mark.slow
def test_fourier_n5():
    # 1. N = 5: twenty transversal points, the circulant MUB vectors
    cfg = cliffordtori.SolverConfig(starts_per_round=512)
    result = cliffordtori.find_intersections(cliffordtori.fourier_matrix(5), cfg)
    assert result.classification is cliffordtori.Classification.FINITE_TRANSVERSAL
    assert result.count == 20
    expected = [
        np.angle(cliffordtori.mub_circulant_vector(5, z, a)[1:])
        for z, a in itertools.product(range(1, 5), range(5))
    ]
    assert _matched(expected, result.points, 1e-8)


@pytest.mark.slow
def test_grid_oracle_agreement():
    # 1. Brute-force grid and multistart solver agree on seeded cases
    for seed in range(50):
        U = cliffordtori.haar_random_unitary(3, seed=1000 + seed)
        assert cliffordtori.grid_count(U, resolution=2000) == cliffordtori.count_intersections(U)


@pytest.mark.slow
def test_haar_index_sums():
    # 1. A thousand Haar draws: transversal sets have 4 or 6 points and cancelling indices
    for seed in range(1000):
        result = cliffordtori.find_intersections(cliffordtori.haar_random_unitary(3, seed))
        if result.classification is cliffordtori.Classification.FINITE_TRANSVERSAL:
            assert result.count in (4, 6)
            assert result.index_sum == 0


@pytest.mark.slow
def test_more_starts_never_lose_points():
    # 1. Doubling the starts per round does not decrease the count
    cfg = cliffordtori.SolverConfig()
    for seed in range(100):
        U = cliffordtori.haar_random_unitary(3, seed=2000 + seed)
        base = cliffordtori.count_intersections(U, cfg)
        doubled = cliffordtori.count_intersections(U, cfg.replace(starts_per_round=256))
        assert doubled >= base


if __name__ == "__main__":
    test_residual()
    test_residual_jacobian()
    test_phase_helpers()
    test_fourier_n3()
    test_fourier_small_dimensions()
    test_continuum()
    test_facet_centre()
    test_enphasing_invariance()
    test_haar_counts()
    test_solver_errors()
    test_grid_count()
    test_scan_section()
    test_triangle_boundary()
    test_edge_midpoint_circles()
    test_hexagon_regions()

    print("All intersect tests passed!!")

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfnitsche import geometry as geo
from surfnitsche.errors import DegenerateInputError

from conftest import fd_laplace_beltrami, newton_closest_point, random_tube_points

TWO_PI = 2.0 * np.pi


class TestTorusBasics:
    def test_embed_values(self, torus):
        np.testing.assert_allclose(geo.torus_embed(0.0, 0.0, torus), [1.4, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(geo.torus_embed(np.pi, 0.0, torus), [0.6, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(
            geo.torus_embed(np.pi / 2, np.pi / 2, torus), [0.0, 1.0, 0.4], atol=1e-15
        )

    def test_signed_distance_values(self, torus):
        assert geo.signed_distance([2.0, 0.0, 0.0], torus) == pytest.approx(0.6, abs=1e-15)
        assert geo.signed_distance([1.4, 0.0, 0.0], torus) == pytest.approx(0.0, abs=1e-15)
        assert geo.signed_distance([1.0, 0.0, 0.0], torus) == pytest.approx(-0.4, abs=1e-15)

    def test_degenerate_axis(self, torus):
        with pytest.raises(DegenerateInputError):
            geo.signed_distance([0.0, 0.0, 0.3], torus)
        with pytest.raises(DegenerateInputError):
            geo.closest_point([0.0, 0.0, 0.3], torus)

    def test_degenerate_center_circle(self, torus):
        with pytest.raises(DegenerateInputError):
            geo.closest_point([1.0, 0.0, 0.0], torus)

    def test_invalid_radii(self):
        with pytest.raises(ValueError):
            geo.TorusParams(major_radius=0.4, minor_radius=1.0)


class TestClosestPoint:
    def test_symmetry_example(self, torus):
        np.testing.assert_allclose(
            geo.closest_point([2.0, 0.0, 0.0], torus), [1.4, 0.0, 0.0], atol=1e-14
        )

    def test_identity_on_surface(self, torus):
        rng = np.random.default_rng(0)
        theta = rng.uniform(0.0, TWO_PI, 50)
        phi = rng.uniform(0.0, TWO_PI, 50)
        pts = geo.torus_embed(theta, phi, torus)
        np.testing.assert_allclose(geo.closest_point(pts, torus), pts, atol=1e-14)

    def test_against_stationarity_oracle(self, torus):
        # frozen from the oracle: the point above the center circle projects
        # to the top of the tube
        np.testing.assert_allclose(
            geo.closest_point([1.0, 0.0, 0.1], torus), [1.0, 0.0, 0.4], atol=1e-10
        )
        rng = np.random.default_rng(1)
        for x in random_tube_points(rng, torus, 10):
            oracle = newton_closest_point(x, torus)
            np.testing.assert_allclose(geo.closest_point(x, torus), oracle, atol=1e-10)

    def test_distance_identity_and_idempotency(self, torus):
        rng = np.random.default_rng(2)
        pts = random_tube_points(rng, torus, 1000)
        projected = geo.closest_point(pts, torus)
        gap = np.linalg.norm(pts - projected, axis=-1)
        np.testing.assert_allclose(
            gap, np.abs(geo.signed_distance(pts, torus)), atol=1e-12
        )
        np.testing.assert_allclose(geo.closest_point(projected, torus), projected, atol=1e-12)


class TestSurfaceNormal:
    def test_values(self):
        np.testing.assert_allclose(geo.surface_normal(0.0, 0.0), [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(
            geo.surface_normal(np.pi / 2, 0.0), [0.0, 0.0, 1.0], atol=1e-15
        )

    def test_unit_length(self):
        rng = np.random.default_rng(3)
        n = geo.surface_normal(rng.uniform(0, TWO_PI, 200), rng.uniform(0, TWO_PI, 200))
        np.testing.assert_allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-14)

    def test_matches_distance_gradient(self, torus):
        rng = np.random.default_rng(4)
        pts = random_tube_points(rng, torus, 20)
        analytic = geo.surface_normal(*geo.toroidal_angles(geo.closest_point(pts, torus), torus))
        step = 1e-6
        fd = np.zeros_like(pts)
        for axis in range(3):
            offset = np.zeros(3)
            offset[axis] = step
            fd[:, axis] = (
                geo.signed_distance(pts + offset, torus)
                - geo.signed_distance(pts - offset, torus)
            ) / (2 * step)
        np.testing.assert_allclose(fd, analytic, atol=1e-6)


class TestBoundary:
    def test_boundary_phi_values(self):
        waves = geo.BoundarySpec()
        assert geo.boundary_phi("lower", 0.0, waves) == pytest.approx(0.2)
        assert geo.boundary_phi("upper", 0.0, waves) == pytest.approx(0.2 + 1.2 * np.pi)
        flat = geo.BoundarySpec(waves_lower=0, waves_upper=0)
        theta = np.linspace(0, TWO_PI, 17)
        np.testing.assert_allclose(geo.boundary_phi("lower", theta, flat), 0.2)

    def test_unknown_side(self):
        with pytest.raises(ValueError):
            geo.boundary_phi("inner", 0.0, geo.BoundarySpec())

    def test_empty_band_rejected(self):
        with pytest.raises(ValueError):
            geo.BoundarySpec(amplitude=0.3, offset=0.1)

    def test_projection_identity_on_curve(self, torus_problem):
        rng = np.random.default_rng(5)
        theta = rng.uniform(0.0, TWO_PI, 40)
        for side in ("lower", "upper"):
            on_curve = geo.boundary_curve_point(
                side, theta, torus_problem.boundary, torus_problem.torus
            )
            projected = torus_problem.project_to_boundary(on_curve, side)
            np.testing.assert_allclose(projected, on_curve, atol=1e-10)

    def test_projection_constant_curve(self, simple_problem):
        rng = np.random.default_rng(6)
        theta = rng.uniform(0.0, TWO_PI, 20)
        pts = geo.torus_embed(theta, 0.27, simple_problem.torus)
        projected = simple_problem.project_to_boundary(pts, "lower")
        _, phi = geo.toroidal_angles(projected, simple_problem.torus)
        np.testing.assert_allclose(phi, 0.2, atol=1e-10)

    def test_projection_beats_dense_polyline(self, torus_problem):
        rng = np.random.default_rng(7)
        theta_dense = np.linspace(0.0, TWO_PI, 1_000_000, endpoint=False)
        for side in ("lower", "upper"):
            curve = geo.boundary_curve_point(
                side, theta_dense, torus_problem.boundary, torus_problem.torus
            )
            theta = rng.uniform(0.0, TWO_PI, 5)
            near = geo.boundary_curve_point(
                side, theta, torus_problem.boundary, torus_problem.torus
            )
            near += rng.uniform(-0.05, 0.05, (5, 3))
            near = geo.closest_point(near, torus_problem.torus)
            projected = torus_problem.project_to_boundary(near, side)
            for x, p in zip(near, projected):
                dense_min = np.min(np.linalg.norm(curve - x, axis=-1))
                assert np.linalg.norm(x - p) <= dense_min + 1e-12


class TestManufacturedSolution:
    def test_solution_values(self):
        assert geo.exact_solution(0.0, 1.234) == pytest.approx(0.0, abs=1e-15)
        assert geo.exact_solution(np.pi / 4, 0.0) == pytest.approx(-np.sqrt(2) / 2)

    def test_load_matches_fd_oracle(self, torus):
        rng = np.random.default_rng(8)
        theta = rng.uniform(0.0, TWO_PI, 50)
        phi = rng.uniform(0.0, TWO_PI, 50)
        oracle = -fd_laplace_beltrami(theta, phi, torus)
        np.testing.assert_allclose(geo.load(theta, phi, torus), oracle, atol=1e-5)

    def test_gradient_tangential(self, torus):
        rng = np.random.default_rng(9)
        theta = rng.uniform(0.0, TWO_PI, 100)
        phi = rng.uniform(0.0, TWO_PI, 100)
        grad = geo.exact_surface_gradient(theta, phi, torus)
        normal = geo.surface_normal(theta, phi)
        np.testing.assert_allclose(np.sum(grad * normal, axis=-1), 0.0, atol=1e-12)

    def test_extension_gradient_on_surface(self, torus_problem):
        rng = np.random.default_rng(10)
        theta = rng.uniform(0.0, TWO_PI, 50)
        phi = rng.uniform(0.0, TWO_PI, 50)
        pts = geo.torus_embed(theta, phi, torus_problem.torus)
        ambient = torus_problem.solution_gradient_at(pts)
        chart = geo.exact_surface_gradient(theta, phi, torus_problem.torus)
        np.testing.assert_allclose(ambient, chart, atol=1e-12)

    def test_dirichlet_matches_solution_on_boundary(self, torus_problem):
        theta = np.linspace(0.0, TWO_PI, 9)
        pts = geo.boundary_curve_point(
            "lower", theta, torus_problem.boundary, torus_problem.torus
        )
        lower_phi = geo.boundary_phi("lower", theta, torus_problem.boundary)
        np.testing.assert_allclose(
            torus_problem.dirichlet_at(pts),
            geo.exact_solution(theta, lower_phi),
            atol=1e-12,
        )


@settings(max_examples=50, deadline=None)
@given(
    theta=st.floats(0.0, TWO_PI, exclude_max=True),
    phi=st.floats(0.0, TWO_PI, exclude_max=True),
)
def test_angle_round_trip(theta, phi):
    torus = geo.TorusParams()
    point = geo.torus_embed(theta, phi, torus)
    theta_back, phi_back = geo.toroidal_angles(point, torus)
    np.testing.assert_allclose(
        geo.torus_embed(theta_back, phi_back, torus), point, atol=1e-12
    )


@settings(max_examples=50, deadline=None)
@given(
    theta=st.floats(0.0, TWO_PI, exclude_max=True),
    phi=st.floats(0.0, TWO_PI, exclude_max=True),
    offset=st.floats(-0.2, 0.2),
)
def test_projection_recovers_offset_point(theta, phi, offset):
    torus = geo.TorusParams()
    surface = geo.torus_embed(theta, phi, torus)
    shifted = surface + offset * geo.surface_normal(theta, phi)
    np.testing.assert_allclose(geo.closest_point(shifted, torus), surface, atol=1e-12)
    assert geo.signed_distance(shifted, torus) == pytest.approx(offset, abs=1e-12)


class TestFlatSquare:
    def test_solution_and_load(self):
        problem = geo.FlatSquareProblem(2)
        pts = np.array([[0.3, 0.4, 0.0], [0.9, 0.1, 0.2]])
        expected = 0.3**2 + 3 * 0.3 * 0.4 - 2 * 0.4**2 + 0.3 + 2 * 0.4
        assert problem.solution_at(pts)[0] == pytest.approx(expected)
        np.testing.assert_allclose(problem.load_at(pts), 2.0)

    def test_load_matches_fd(self):
        problem = geo.FlatSquareProblem(3)
        rng = np.random.default_rng(11)
        xy = rng.uniform(0.2, 0.8, (20, 2))
        pts = np.column_stack([xy, np.zeros(20)])
        step = 1e-5

        def u(x, y):
            return problem.solution_at(np.stack([x, y, np.zeros_like(x)], axis=-1))

        x, y = xy[:, 0], xy[:, 1]
        lap = (
            u(x + step, y) + u(x - step, y) + u(x, y + step) + u(x, y - step) - 4 * u(x, y)
        ) / step**2
        np.testing.assert_allclose(problem.load_at(pts), -lap, atol=1e-5)

    def test_perimeter_projection(self):
        problem = geo.FlatSquareProblem(1)
        pts = np.array([[0.5, -0.1, 0.02], [1.2, 0.5, 0.0], [0.5, 0.5, 0.0]])
        projected = problem.project_to_boundary(pts, "lower")
        np.testing.assert_allclose(projected[0], [0.5, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(projected[1], [1.0, 0.5, 0.0], atol=1e-15)
        assert np.min(np.abs([projected[2][0], projected[2][1], 1 - projected[2][0], 1 - projected[2][1]])) < 1e-12

    def test_boundary_points_fixed(self):
        problem = geo.FlatSquareProblem(1)
        pts = np.array([[0.25, 0.0, 0.0], [1.0, 0.75, 0.0]])
        np.testing.assert_allclose(problem.project_to_boundary(pts, "lower"), pts, atol=1e-15)

    def test_unknown_degree(self):
        with pytest.raises(ValueError):
            geo.FlatSquareProblem(4)

"""Analytic geometry of the computational surfaces and manufactured data.

The torus of revolution with major radius R and minor radius r is
parameterized by angles (theta, phi),

    x = (R + r cos(theta)) cos(phi)
    y = (R + r cos(theta)) sin(phi)
    z = r sin(theta)

The computational domain is the band phi_lower(theta) <= phi <=
phi_upper(theta) between two closed curves winding once around the tube,

    phi_lower(theta) = A cos(W1 theta)
    phi_upper(theta) = A cos(W2 theta) + offset

A trigonometric exact solution is manufactured on the band and its load
follows from the intrinsic Laplacian of the induced metric
ds^2 = r^2 dtheta^2 + w^2 dphi^2 with w = R + r cos(theta):

    lap u = u_tt / r^2 - sin(theta) u_t / (r w) + u_pp / w^2

A unit square embedded in the z = 0 plane provides the degenerate flat
case (exact geometry, polynomial solutions) used for patch tests.  Both
geometries expose the same point-based interface consumed by the mesh
builder, the assembler, and the error norms: closest-point projection,
signed distance, oriented normals, boundary projection, and manufactured
solution / gradient / load / Dirichlet data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ProjectionError

TWO_PI = 2.0 * np.pi

# Points closer than this to a degeneracy set (the symmetry axis, the
# center circle of the tube) are rejected rather than silently projected.
_DEGENERATE_EPS = 1e-12


def normalize_angle(angle):
    """Reduce an angle into [0, 2*pi)."""
    return np.mod(angle, TWO_PI)


@dataclass(frozen=True)
class TorusParams:
    """Radii of the torus of revolution; requires 0 < minor < major."""

    major_radius: float = 1.0
    minor_radius: float = 0.4

    def __post_init__(self):
        if not 0.0 < self.minor_radius < self.major_radius:
            raise ValueError(
                "torus radii must satisfy 0 < minor_radius < major_radius, "
                f"got minor={self.minor_radius}, major={self.major_radius}"
            )


@dataclass(frozen=True)
class BoundarySpec:
    """Wavy boundary curves of the band, phi = A cos(W theta) (+ offset).

    ``waves_lower``/``waves_upper`` are the integer wave counts of the two
    curves; zero waves give constant-phi circles.  The band must be
    nonempty: phi_lower(theta) < phi_upper(theta) for every theta.
    """

    amplitude: float = 0.2
    waves_lower: int = 4
    waves_upper: int = 3
    offset: float = 0.6 * TWO_PI

    def __post_init__(self):
        theta = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        gap = boundary_phi("upper", theta, self) - boundary_phi("lower", theta, self)
        if not np.all(gap > 0.0):
            raise ValueError("boundary curves cross; the band is empty somewhere")


def torus_embed(theta, phi, torus: TorusParams):
    """Map toroidal angles to Cartesian points, shape (..., 3)."""
    theta, phi = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    )
    w = torus.major_radius + torus.minor_radius * np.cos(theta)
    return np.stack(
        [w * np.cos(phi), w * np.sin(phi), torus.minor_radius * np.sin(theta)],
        axis=-1,
    )


def toroidal_angles(points, torus: TorusParams):
    """Toroidal angles (theta, phi) of points near the torus, each in [0, 2*pi).

    theta is measured in the (radial, z) half-plane around the center
    circle, phi is the azimuth.  Points on the symmetry axis have no
    azimuth and are rejected.
    """
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    d = np.hypot(x, y)
    if np.any(d < _DEGENERATE_EPS):
        raise DegenerateInputError("point on the symmetry axis has no azimuth")
    theta = normalize_angle(np.arctan2(z, d - torus.major_radius))
    phi = normalize_angle(np.arctan2(y, x))
    return theta, phi


def signed_distance(points, torus: TorusParams):
    """Signed distance to the torus surface; negative inside the tube."""
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    d = np.hypot(x, y)
    if np.any(d < _DEGENERATE_EPS):
        raise DegenerateInputError("signed distance undefined on the symmetry axis")
    return np.hypot(d - torus.major_radius, z) - torus.minor_radius


def closest_point(points, torus: TorusParams):
    """Project points onto the torus surface.

    The projection is analytic: project radially onto the center circle,
    then move distance r toward the point within the (radial, z) plane.
    Points on the symmetry axis or on the center circle itself have no
    unique nearest surface point and are rejected.
    """
    pts = np.asarray(points, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    d = np.hypot(x, y)
    if np.any(d < _DEGENERATE_EPS):
        raise DegenerateInputError("closest point not unique on the symmetry axis")
    zeta = d - torus.major_radius
    ell = np.hypot(zeta, z)
    if np.any(ell < _DEGENERATE_EPS):
        raise DegenerateInputError("closest point not unique on the center circle")
    w = torus.major_radius + torus.minor_radius * zeta / ell
    return np.stack(
        [w * x / d, w * y / d, torus.minor_radius * z / ell],
        axis=-1,
    )


def surface_normal(theta, phi):
    """Exterior unit normal of the torus at toroidal angles (theta, phi).

    n = (cos(theta) cos(phi), cos(theta) sin(phi), sin(theta)); this is the
    gradient of the signed distance, so it is independent of the radii.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct = np.cos(theta)
    return np.stack([ct * np.cos(phi), ct * np.sin(phi), np.sin(theta)], axis=-1)


def boundary_phi(side, theta, boundary: BoundarySpec):
    """Evaluate the phi level of one boundary curve at angle theta."""
    theta = np.asarray(theta, dtype=float)
    if side == "lower":
        return boundary.amplitude * np.cos(boundary.waves_lower * theta)
    if side == "upper":
        return boundary.amplitude * np.cos(boundary.waves_upper * theta) + boundary.offset
    raise ValueError(f"unknown boundary side {side!r}")


def boundary_curve_point(side, theta, boundary: BoundarySpec, torus: TorusParams):
    """Point of the 3-space boundary curve theta -> embed(theta, phi_side(theta))."""
    return torus_embed(theta, boundary_phi(side, theta, boundary), torus)


def project_to_boundary_curve(points, side, boundary: BoundarySpec, torus: TorusParams):
    """Nearest point of one boundary curve, per input point.

    Coarse sampling of the closed curve (64 samples per boundary wave, at
    least 64) brackets the minimizer of the squared distance; golden
    section refines the bracket below 1e-12 in theta.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not np.all(np.isfinite(pts)):
        raise ProjectionError("non-finite point passed to boundary projection")
    waves = boundary.waves_lower if side == "lower" else boundary.waves_upper
    n_samples = 64 * max(1, abs(int(waves)))
    theta_samples = np.arange(n_samples) * (TWO_PI / n_samples)
    curve = boundary_curve_point(side, theta_samples, boundary, torus)

    def sqdist(theta):
        c = boundary_curve_point(side, theta, boundary, torus)
        return np.sum((pts - c) ** 2, axis=-1)

    d2 = np.sum((pts[:, None, :] - curve[None, :, :]) ** 2, axis=-1)
    best = np.argmin(d2, axis=1)
    coarse_min = d2[np.arange(len(pts)), best]
    step = TWO_PI / n_samples
    a = theta_samples[best] - step
    b = theta_samples[best] + step

    # Golden section with a fixed iteration count: the bracket of width
    # 2*step shrinks by 1/phi per step, far below the 1e-12 target in 60.
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    for _ in range(60):
        c1 = b - invphi * (b - a)
        c2 = a + invphi * (b - a)
        take_left = sqdist(c1) < sqdist(c2)
        a = np.where(take_left, a, c1)
        b = np.where(take_left, c2, b)
    theta_min = 0.5 * (a + b)
    final = sqdist(theta_min)
    if not np.all(np.isfinite(final)) or np.any(final > coarse_min + 1e-12):
        raise ProjectionError("golden-section refinement failed to improve on sampling")
    result = boundary_curve_point(side, theta_min, boundary, torus)
    return result.reshape(np.shape(points))


def exact_solution(theta, phi):
    """Manufactured solution u = cos(3 phi + 5 theta) sin(2 theta)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.cos(3.0 * phi + 5.0 * theta) * np.sin(2.0 * theta)


def _solution_partials(theta, phi):
    """First partials (u_theta, u_phi) of the manufactured solution."""
    c = np.cos(3.0 * phi + 5.0 * theta)
    s = np.sin(3.0 * phi + 5.0 * theta)
    s2 = np.sin(2.0 * theta)
    c2 = np.cos(2.0 * theta)
    return -5.0 * s * s2 + 2.0 * c * c2, -3.0 * s * s2


def exact_surface_gradient(theta, phi, torus: TorusParams):
    """Tangential gradient of the manufactured solution in ambient coordinates.

    With unit frame vectors e_theta, e_phi of the toroidal chart:
    grad u = u_theta / r * e_theta + u_phi / w * e_phi.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    u_t, u_p = _solution_partials(theta, phi)
    r = torus.minor_radius
    w = torus.major_radius + r * np.cos(theta)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    e_theta = np.stack([-st * cp, -st * sp, ct], axis=-1)
    e_phi = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return (u_t / r)[..., None] * e_theta + (u_p / w)[..., None] * e_phi


def laplace_beltrami_of_solution(theta, phi, torus: TorusParams):
    """Intrinsic Laplacian of the manufactured solution on the torus."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(3.0 * phi + 5.0 * theta)
    s = np.sin(3.0 * phi + 5.0 * theta)
    s2 = np.sin(2.0 * theta)
    c2 = np.cos(2.0 * theta)
    u_t = -5.0 * s * s2 + 2.0 * c * c2
    u_tt = -29.0 * c * s2 - 20.0 * s * c2
    u_pp = -9.0 * c * s2
    r = torus.minor_radius
    w = torus.major_radius + r * np.cos(theta)
    return u_tt / r**2 - np.sin(theta) * u_t / (r * w) + u_pp / w**2


def load(theta, phi, torus: TorusParams):
    """Load f = -lap u consistent with the manufactured solution."""
    return -laplace_beltrami_of_solution(theta, phi, torus)


class TorusProblem:
    """Dirichlet problem for the surface Laplacian on a wavy torus band.

    Bundles the torus radii, the boundary curves, and the manufactured
    solution into the interface the discretization consumes.  All methods
    are pure and vectorized over a leading batch of points.
    """

    name = "torus"
    periodic = True
    boundary_sides = ("lower", "upper")

    def __init__(self, torus: TorusParams | None = None, boundary: BoundarySpec | None = None):
        self.torus = torus if torus is not None else TorusParams()
        if boundary is None:
            boundary = BoundarySpec(offset=0.6 * TWO_PI * self.torus.major_radius)
        self.boundary = boundary

    @classmethod
    def simplified(cls, torus: TorusParams | None = None):
        """Variant with constant-phi boundary circles (zero boundary waves)."""
        torus = torus if torus is not None else TorusParams()
        boundary = BoundarySpec(
            waves_lower=0, waves_upper=0, offset=0.6 * TWO_PI * torus.major_radius
        )
        return cls(torus, boundary)

    @property
    def chart_aspect(self):
        """Physical band length over tube circumference; sizes the cell grid."""
        return (self.boundary.offset * self.torus.major_radius) / (
            TWO_PI * self.torus.minor_radius
        )

    def chart(self, t, s):
        """Map the unit parameter square onto the band.

        t in [0, 1] runs once around the tube (theta = 2 pi t), s in [0, 1]
        interpolates between the two boundary curves.
        """
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        theta = TWO_PI * t
        lo = boundary_phi("lower", theta, self.boundary)
        hi = boundary_phi("upper", theta, self.boundary)
        return torus_embed(theta, lo + s * (hi - lo), self.torus)

    def closest_point(self, points):
        return closest_point(points, self.torus)

    def signed_distance(self, points):
        return signed_distance(points, self.torus)

    def normal_at_closest(self, points):
        """Exterior surface normal at the closest surface point."""
        return surface_normal(*toroidal_angles(self.closest_point(points), self.torus))

    def project_to_boundary(self, points, side):
        return project_to_boundary_curve(points, side, self.boundary, self.torus)

    def correct_to_boundary(self, points, side):
        """Move near-boundary surface points onto a boundary curve at fixed theta.

        Unlike the Euclidean projection this never slides nodes along the
        curve, which keeps coarse high-order boundary elements from folding
        when the mesh builder corrects its boundary nodes.
        """
        theta, _ = toroidal_angles(points, self.torus)
        return boundary_curve_point(side, theta, self.boundary, self.torus)

    def solution_at(self, points):
        """Closest-point extension of the exact solution, u(p(x))."""
        return exact_solution(*toroidal_angles(self.closest_point(points), self.torus))

    def solution_gradient_at(self, points):
        """Ambient gradient of the closest-point extension of the solution.

        u(p(x)) depends on x only through the toroidal angles, so the
        gradient is u_theta grad(theta) + u_phi grad(phi) with the exact
        ambient gradients of the angle fields.
        """
        pts = np.asarray(points, dtype=float)
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        d = np.hypot(x, y)
        if np.any(d < _DEGENERATE_EPS):
            raise DegenerateInputError("gradient undefined on the symmetry axis")
        zeta = d - self.torus.major_radius
        ell2 = zeta**2 + z**2
        if np.any(ell2 < _DEGENERATE_EPS**2):
            raise DegenerateInputError("gradient undefined on the center circle")
        theta = np.arctan2(z, zeta)
        phi = np.arctan2(y, x)
        u_t, u_p = _solution_partials(theta, phi)
        grad_theta = np.stack([-z * x / d, -z * y / d, zeta], axis=-1) / ell2[..., None]
        grad_phi = np.stack([-y / d**2, x / d**2, np.zeros_like(d)], axis=-1)
        return u_t[..., None] * grad_theta + u_p[..., None] * grad_phi

    def load_at(self, points):
        """Closest-point extension of the load, f(p(x))."""
        return load(*toroidal_angles(self.closest_point(points), self.torus), self.torus)

    def dirichlet_at(self, points):
        """Dirichlet data at points assumed to lie on the boundary curves."""
        return self.solution_at(points)


# Fixed polynomial solutions of total degree 1..3 for the flat patch test.
_FLAT_SOLUTIONS = {
    1: {(1, 0): 1.0, (0, 1): 2.0, (0, 0): -0.5},
    2: {(2, 0): 1.0, (1, 1): 3.0, (0, 2): -2.0, (1, 0): 1.0, (0, 1): 2.0},
    3: {
        (3, 0): 1.0,
        (2, 1): -2.0,
        (1, 2): 1.0,
        (0, 3): 1.0,
        (2, 0): -1.0,
        (1, 1): 2.0,
        (1, 0): 1.0,
        (0, 1): -1.0,
    },
}

_SQUARE_CORNERS = np.array(
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
)


def _poly_eval(coeffs, x, y):
    total = np.zeros(np.broadcast(x, y).shape)
    for (a, b), c in coeffs.items():
        total = total + c * x**a * y**b
    return total


def _poly_dx(coeffs):
    return {(a - 1, b): a * c for (a, b), c in coeffs.items() if a > 0}


def _poly_dy(coeffs):
    return {(a, b - 1): b * c for (a, b), c in coeffs.items() if b > 0}


class FlatSquareProblem:
    """Unit square in the z = 0 plane with a polynomial exact solution.

    The full surface pipeline runs with zero geometric error, which makes
    this the patch-test configuration: with elements of order >= the
    polynomial degree the discrete solution must reproduce the polynomial
    to solver accuracy.
    """

    name = "flat-square"
    periodic = False
    boundary_sides = ("lower", "right", "upper", "left")

    def __init__(self, degree: int = 1, coefficients: dict | None = None):
        if coefficients is None:
            if degree not in _FLAT_SOLUTIONS:
                raise ValueError(f"no built-in flat solution of degree {degree}")
            coefficients = _FLAT_SOLUTIONS[degree]
        self.degree = degree
        self.coefficients = dict(coefficients)
        self._dx = _poly_dx(self.coefficients)
        self._dy = _poly_dy(self.coefficients)
        self._lap = {}
        for (a, b), c in list(_poly_dx(self._dx).items()) + list(_poly_dy(self._dy).items()):
            self._lap[(a, b)] = self._lap.get((a, b), 0.0) + c

    chart_aspect = 1.0

    def chart(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        t, s = np.broadcast_arrays(t, s)
        return np.stack([t, s, np.zeros_like(t)], axis=-1)

    def closest_point(self, points):
        pts = np.array(points, dtype=float)
        pts[..., 2] = 0.0
        return pts

    def signed_distance(self, points):
        return np.asarray(points, dtype=float)[..., 2]

    def normal_at_closest(self, points):
        pts = np.asarray(points, dtype=float)
        normal = np.zeros_like(pts)
        normal[..., 2] = 1.0
        return normal

    def project_to_boundary(self, points, side):
        """Nearest point of the square's perimeter (side tag not needed)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        best = None
        best_d2 = None
        for i in range(4):
            a = _SQUARE_CORNERS[i]
            b = _SQUARE_CORNERS[(i + 1) % 4]
            ab = b - a
            t = np.clip((pts - a) @ ab / (ab @ ab), 0.0, 1.0)
            cand = a + t[:, None] * ab
            d2 = np.sum((pts - cand) ** 2, axis=-1)
            if best is None:
                best, best_d2 = cand, d2
            else:
                closer = d2 < best_d2
                best = np.where(closer[:, None], cand, best)
                best_d2 = np.where(closer, d2, best_d2)
        return best.reshape(np.shape(points))

    def correct_to_boundary(self, points, side):
        """Clamp points onto one side line of the square."""
        pts = self.closest_point(points)
        fixed = {"lower": (1, 0.0), "upper": (1, 1.0), "left": (0, 0.0), "right": (0, 1.0)}
        axis, value = fixed[side]
        pts[..., axis] = value
        pts[..., 1 - axis] = np.clip(pts[..., 1 - axis], 0.0, 1.0)
        return pts

    def solution_at(self, points):
        pts = np.asarray(points, dtype=float)
        return _poly_eval(self.coefficients, pts[..., 0], pts[..., 1])

    def solution_gradient_at(self, points):
        pts = np.asarray(points, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return np.stack(
            [_poly_eval(self._dx, x, y), _poly_eval(self._dy, x, y), np.zeros_like(x)],
            axis=-1,
        )

    def load_at(self, points):
        pts = np.asarray(points, dtype=float)
        return -_poly_eval(self._lap, pts[..., 0], pts[..., 1])

    def dirichlet_at(self, points):
        return self.solution_at(points)

"""Isoparametric element geometry on parametric surface meshes.

Each element maps the reference triangle into 3-space through its order-k
nodal coordinates.  The 3x2 Jacobian J yields the first fundamental form
G = J^T J, the area factor sqrt(det G), the unit normal (oriented to agree
with the exact surface normal at the closest point), tangential gradients
J G^{-1} grad_ref, and on boundary edges the exterior unit conormal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DegenerateElementError
from .reference import (
    edge_opposite_corner,
    edge_ref_direction,
    edge_ref_points,
    reference_element,
)

if TYPE_CHECKING:  # pragma: no cover
    from .mesh import ParametricMesh


@dataclass(frozen=True)
class ElementFrame:
    """Pointwise geometry of one element at one reference point."""

    position: np.ndarray
    jacobian: np.ndarray
    metric: np.ndarray
    area_factor: float
    normal: np.ndarray


class FrameBundle:
    """Vectorized frames for a batch of elements at shared reference points.

    Arrays are indexed (element, quad point, ...):
    position (e,q,3), jacobian (e,q,3,2), metric/inv_metric (e,q,2,2),
    area_factor (e,q), normal (e,q,3).  ``signed_area`` is the raw cross
    product projected on the exact surface normal; its sign exposes folds.
    """

    def __init__(self, coords, values, grads, normal_at_closest):
        self.position = np.einsum("qn,end->eqd", values, coords)
        self.jacobian = np.einsum("qnr,end->eqdr", grads, coords)
        g = np.einsum("eqdr,eqds->eqrs", self.jacobian, self.jacobian)
        det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
        if np.any(det <= 0.0):
            raise DegenerateElementError("singular first fundamental form")
        self.metric = g
        inv = np.empty_like(g)
        inv[..., 0, 0] = g[..., 1, 1]
        inv[..., 1, 1] = g[..., 0, 0]
        inv[..., 0, 1] = -g[..., 0, 1]
        inv[..., 1, 0] = -g[..., 1, 0]
        self.inv_metric = inv / det[..., None, None]
        self.area_factor = np.sqrt(det)
        raw = np.cross(self.jacobian[..., 0], self.jacobian[..., 1])
        raw_norm = np.linalg.norm(raw, axis=-1)
        unit = raw / raw_norm[..., None]
        exact = normal_at_closest(self.position)
        orient = np.sum(unit * exact, axis=-1)
        if np.any(orient == 0.0):
            raise DegenerateElementError("element normal perpendicular to the surface")
        self.normal = unit * np.sign(orient)[..., None]
        self.signed_area = raw_norm * np.sign(orient)

    def basis_tangent_gradients(self, grads):
        """Tangential gradients of all basis functions; shape (e,q,n,3)."""
        return np.einsum(
            "eqdr,eqrs,qns->eqnd", self.jacobian, self.inv_metric, grads
        )

    def project_tangent(self, vectors):
        """Project ambient vectors (e,q,3) onto the discrete tangent plane."""
        covariant = np.einsum("eqds,eqd->eqs", self.jacobian, vectors)
        return np.einsum("eqdr,eqrs,eqs->eqd", self.jacobian, self.inv_metric, covariant)


def frames(mesh: "ParametricMesh", problem, element_ids, ref_points) -> FrameBundle:
    """FrameBundle for the listed elements at shared reference points."""
    ref = reference_element(mesh.order)
    pts = np.atleast_2d(np.asarray(ref_points, dtype=float))
    values, grads = ref.tabulate(pts)
    coords = mesh.nodes[mesh.elements[np.asarray(element_ids, dtype=int)]]
    return FrameBundle(coords, values, grads, problem.normal_at_closest)


def element_frame(mesh: "ParametricMesh", problem, element: int, ref_point) -> ElementFrame:
    """Frame of a single element at a single reference point."""
    bundle = frames(mesh, problem, [element], [ref_point])
    return ElementFrame(
        position=bundle.position[0, 0],
        jacobian=bundle.jacobian[0, 0],
        metric=bundle.metric[0, 0],
        area_factor=float(bundle.area_factor[0, 0]),
        normal=bundle.normal[0, 0],
    )


def tangent_gradient(frame: ElementFrame, ref_gradients, coeffs) -> np.ndarray:
    """Tangential gradient J G^{-1} grad_ref(v) of v = sum coeffs_i phi_i."""
    ref_grad = np.asarray(coeffs, dtype=float) @ np.asarray(ref_gradients, dtype=float)
    try:
        return frame.jacobian @ np.linalg.solve(frame.metric, ref_grad)
    except np.linalg.LinAlgError:
        raise DegenerateElementError("singular first fundamental form") from None


class EdgeBundle:
    """Vectorized boundary-edge geometry at shared edge parameters.

    Extends the element frames restricted to one local edge with the edge
    tangent, the arc-length factor of the edge parameterization, and the
    exterior unit conormal (tangent to the element, normal to the edge,
    pointing away from the opposite corner).
    """

    def __init__(self, mesh: "ParametricMesh", problem, element_ids, local_edge, t_points):
        ref = reference_element(mesh.order)
        t = np.asarray(t_points, dtype=float)
        ref_pts = edge_ref_points(local_edge, t)
        self.values, self.grads = ref.tabulate(ref_pts)
        coords = mesh.nodes[mesh.elements[np.asarray(element_ids, dtype=int)]]
        self.frame = FrameBundle(coords, self.values, self.grads, problem.normal_at_closest)
        tangent = np.einsum(
            "eqdr,r->eqd", self.frame.jacobian, edge_ref_direction(local_edge)
        )
        self.line_factor = np.linalg.norm(tangent, axis=-1)
        if np.any(self.line_factor <= 0.0):
            raise DegenerateElementError("degenerate boundary edge")
        unit_tangent = tangent / self.line_factor[..., None]
        conormal = np.cross(unit_tangent, self.frame.normal)
        conormal /= np.linalg.norm(conormal, axis=-1, keepdims=True)
        opposite = coords[:, ref.corner_ids[edge_opposite_corner(local_edge)], :]
        inward = opposite[:, None, :] - self.frame.position
        flip = np.sum(conormal * inward, axis=-1) > 0.0
        self.conormal = np.where(flip[..., None], -conormal, conormal)
        self.tangent = unit_tangent


def boundary_conormal(mesh: "ParametricMesh", problem, boundary_edge, edge_t: float):
    """(position, exterior unit conormal, arc-length factor) at one edge point."""
    element, local_edge = boundary_edge[0], boundary_edge[1]
    bundle = EdgeBundle(mesh, problem, [element], local_edge, [edge_t])
    return (
        bundle.frame.position[0, 0],
        bundle.conormal[0, 0],
        float(bundle.line_factor[0, 0]),
    )

"""Assembly of the symmetric Nitsche system for the surface Poisson problem.

The bilinear and linear forms on the discrete surface are

    a(v, w) = (grad v, grad w)  - (nu.grad v, w)_b - (v, nu.grad w)_b
              + beta/h (v, w)_b
    l(w)    = (f(p(x)), w) - (g(q(x)), nu.grad w)_b + beta/h (g(q(x)), w)_b

with tangential gradients, nu the exterior conormal of the boundary
edges, p the closest-point map onto the surface, q the closest-point map
onto the boundary curve, and a single global mesh size h in the penalty
weight.  All terms are integrated with rules of exactness degree 2k + 2
by default (overridable for sensitivity studies).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidPenaltyError, NotPositiveDefiniteError
from .fem import EdgeBundle, frames
from .mesh import ParametricMesh, grouped_boundary_edges
from .reference import edge_rule, reference_element, triangle_rule

_CHUNK = 4096


@dataclass
class SparseSystem:
    """Assembled symmetric system A x = b with its penalty bookkeeping."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    beta: float
    h_used: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class _Parts:
    """Penalty-independent split A(beta) = core + beta/h * penalty."""

    core: sp.csr_matrix
    penalty: sp.csr_matrix
    rhs_core: np.ndarray
    rhs_penalty: np.ndarray
    h: float


def _assemble_parts(
    mesh: ParametricMesh,
    problem,
    quad_degree=None,
    edge_quad_degree=None,
    boundary_terms=True,
) -> _Parts:
    k = mesh.order
    if quad_degree is None:
        quad_degree = 2 * k + 2
    if edge_quad_degree is None:
        edge_quad_degree = 2 * k + 2
    ref = reference_element(k)
    rule = triangle_rule(quad_degree)
    grads = ref.grad(rule.points)
    values = ref.eval(rule.points)

    n = mesh.num_nodes
    rows, cols, vals = [], [], []
    rhs_core = np.zeros(n)
    rhs_penalty = np.zeros(n)

    for start in range(0, mesh.num_elements, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, mesh.num_elements))
        bundle = frames(mesh, problem, ids, rule.points)
        scale = rule.weights[None, :] * bundle.area_factor
        tg = bundle.basis_tangent_gradients(grads)
        local = np.einsum("eq,eqid,eqjd->eij", scale, tg, tg)
        conn = mesh.elements[ids]
        rows.append(np.repeat(conn, conn.shape[1], axis=1).ravel())
        cols.append(np.tile(conn, (1, conn.shape[1])).ravel())
        vals.append(local.ravel())
        f_vals = problem.load_at(bundle.position)
        np.add.at(rhs_core, conn.ravel(), np.einsum("eq,eq,qj->ej", scale, f_vals, values).ravel())

    pen_rows, pen_cols, pen_vals = [], [], []
    if boundary_terms:
        erule = edge_rule(edge_quad_degree)
        for (local_edge, side), element_ids in grouped_boundary_edges(mesh).items():
            ebundle = EdgeBundle(mesh, problem, element_ids, local_edge, erule.points)
            scale = erule.weights[None, :] * ebundle.line_factor
            tg = ebundle.frame.basis_tangent_gradients(ebundle.grads)
            flux = np.einsum("eqd,eqid->eqi", ebundle.conormal, tg)
            conn = mesh.elements[element_ids]
            r = np.repeat(conn, conn.shape[1], axis=1).ravel()
            c = np.tile(conn, (1, conn.shape[1])).ravel()

            consistency = np.einsum("eq,eqi,qj->eij", scale, flux, ebundle.values)
            rows.append(r)
            cols.append(c)
            vals.append(-(consistency + consistency.transpose(0, 2, 1)).ravel())

            pen = np.einsum("eq,qi,qj->eij", scale, ebundle.values, ebundle.values)
            pen_rows.append(r)
            pen_cols.append(c)
            pen_vals.append(pen.ravel())

            qpts = ebundle.frame.position.reshape(-1, 3)
            g_vals = problem.dirichlet_at(problem.project_to_boundary(qpts, side))
            g_vals = g_vals.reshape(scale.shape)
            np.add.at(
                rhs_core,
                conn.ravel(),
                -np.einsum("eq,eq,eqj->ej", scale, g_vals, flux).ravel(),
            )
            np.add.at(
                rhs_penalty,
                conn.ravel(),
                np.einsum("eq,eq,qj->ej", scale, g_vals, ebundle.values).ravel(),
            )

    def build(rr, cc, vv):
        if not rr:
            return sp.csr_matrix((n, n))
        mat = sp.coo_matrix(
            (np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))), shape=(n, n)
        )
        return mat.tocsr()

    return _Parts(
        core=build(rows, cols, vals),
        penalty=build(pen_rows, pen_cols, pen_vals),
        rhs_core=rhs_core,
        rhs_penalty=rhs_penalty,
        h=mesh.h,
    )


def assemble(
    mesh: ParametricMesh,
    beta: float,
    problem,
    quad_degree=None,
    edge_quad_degree=None,
    boundary_terms=True,
) -> SparseSystem:
    """Assemble the Nitsche system with penalty weight beta / h."""
    if beta <= 0.0:
        raise InvalidPenaltyError(f"penalty must be positive, got beta={beta}")
    parts = _assemble_parts(mesh, problem, quad_degree, edge_quad_degree, boundary_terms)
    weight = beta / parts.h
    matrix = (parts.core + weight * parts.penalty).tocsr()
    rhs = parts.rhs_core + weight * parts.rhs_penalty
    return SparseSystem(matrix=matrix, rhs=rhs, beta=beta, h_used=parts.h)


def is_positive_definite(matrix) -> bool:
    """Dense Cholesky probe; intended for desk-scale matrices."""
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    if dense.shape[0] > 4000:
        raise ValueError("positive-definiteness probe limited to dim <= 4000")
    try:
        np.linalg.cholesky(dense)
        return True
    except np.linalg.LinAlgError:
        return False


def min_stable_beta_probe(mesh: ParametricMesh, beta_grid, problem, **assemble_kwargs):
    """Tabulate (beta, positive definite?) over a grid of penalty values.

    The penalty matrix is positive semidefinite, so the success set is
    upward closed in beta; the probe records the table without asserting
    where the threshold sits.
    """
    betas = np.asarray(beta_grid, dtype=float)
    if betas.size == 0 or np.any(betas <= 0.0):
        raise InvalidPenaltyError("beta grid must be nonempty and positive")
    parts = _assemble_parts(mesh, problem, **assemble_kwargs)
    table = []
    for beta in betas:
        matrix = parts.core + (beta / parts.h) * parts.penalty
        table.append((float(beta), is_positive_definite(matrix)))
    return table


def require_positive_definite(system: SparseSystem):
    """Raise :class:`NotPositiveDefiniteError` unless the system passes the probe."""
    if not is_positive_definite(system.matrix):
        raise NotPositiveDefiniteError(
            f"system of dimension {system.dim} failed the Cholesky probe"
        )

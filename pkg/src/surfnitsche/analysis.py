"""Error norms against the manufactured solution and refinement studies.

The discrete error e = u(p(x)) - u_h is measured in the L2 norm and in
the mesh-dependent energy norm

    |||e|||^2 = ||grad e||^2  +  h ||nu.grad e||^2_b  +  1/h ||e||^2_b

whose three parts are kept separate.  Error quadrature runs two degrees
above assembly (2k + 4) so measurement error stays below the observed
rates.  Refinement studies double the grid resolution per level and
report estimated orders of convergence as log2 of consecutive error
ratios.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .assembly import assemble
from .fem import EdgeBundle, frames
from .mesh import ParametricMesh, build_mesh, grouped_boundary_edges
from .reference import edge_rule, reference_element, triangle_rule
from .solve import solve_spd

_CHUNK = 4096


@dataclass(frozen=True)
class ErrorMeasures:
    """L2 and energy error of a coefficient vector, with the energy parts.

    ``boundary_mismatch`` is the weak-boundary diagnostic
    1/h ||u_h - g(q(x))||^2_b (q the closest point on the boundary curve),
    which is not part of the energy norm.
    """

    l2_error: float
    energy_error: float
    grad_part: float
    flux_part: float
    jump_part: float
    boundary_mismatch: float


@dataclass(frozen=True)
class ConvergenceRecord:
    order: int
    level: int
    h: float
    dof: int
    l2_error: float
    energy_error: float
    eoc_l2: float | None
    eoc_energy: float | None


def error_measures(
    mesh: ParametricMesh,
    coefficients,
    problem,
    quad_degree=None,
    edge_quad_degree=None,
) -> ErrorMeasures:
    """Measure u(p(x)) - u_h in the L2 and energy norms."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (mesh.num_nodes,):
        raise ValueError("coefficient vector does not match mesh nodes")
    k = mesh.order
    if quad_degree is None:
        quad_degree = 2 * k + 4
    if edge_quad_degree is None:
        edge_quad_degree = 2 * k + 4
    ref = reference_element(k)
    rule = triangle_rule(quad_degree)
    values = ref.eval(rule.points)
    grads = ref.grad(rule.points)

    l2_sq = 0.0
    grad_sq = 0.0
    for start in range(0, mesh.num_elements, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, mesh.num_elements))
        bundle = frames(mesh, problem, ids, rule.points)
        scale = rule.weights[None, :] * bundle.area_factor
        coeff = coefficients[mesh.elements[ids]]
        u_h = np.einsum("qn,en->eq", values, coeff)
        grad_u_h = np.einsum("eqnd,en->eqd", bundle.basis_tangent_gradients(grads), coeff)
        u_exact = problem.solution_at(bundle.position)
        grad_exact = bundle.project_tangent(problem.solution_gradient_at(bundle.position))
        diff = u_exact - u_h
        l2_sq += float(np.sum(scale * diff**2))
        grad_sq += float(np.sum(scale * np.sum((grad_exact - grad_u_h) ** 2, axis=-1)))

    flux_sq = 0.0
    jump_sq = 0.0
    mismatch_sq = 0.0
    erule = edge_rule(edge_quad_degree)
    for (local_edge, side), element_ids in grouped_boundary_edges(mesh).items():
        ebundle = EdgeBundle(mesh, problem, element_ids, local_edge, erule.points)
        scale = erule.weights[None, :] * ebundle.line_factor
        coeff = coefficients[mesh.elements[element_ids]]
        u_h = np.einsum("qn,en->eq", ebundle.values, coeff)
        tg = ebundle.frame.basis_tangent_gradients(ebundle.grads)
        grad_u_h = np.einsum("eqnd,en->eqd", tg, coeff)
        u_exact = problem.solution_at(ebundle.frame.position)
        grad_exact = ebundle.frame.project_tangent(
            problem.solution_gradient_at(ebundle.frame.position)
        )
        flux_diff = np.sum(ebundle.conormal * (grad_exact - grad_u_h), axis=-1)
        jump_diff = u_exact - u_h
        flux_sq += float(np.sum(scale * flux_diff**2))
        jump_sq += float(np.sum(scale * jump_diff**2))
        qpts = ebundle.frame.position.reshape(-1, 3)
        g_vals = problem.dirichlet_at(problem.project_to_boundary(qpts, side))
        g_diff = u_h - g_vals.reshape(u_h.shape)
        mismatch_sq += float(np.sum(scale * g_diff**2))

    h = mesh.h
    grad_part = grad_sq
    flux_part = h * flux_sq
    jump_part = jump_sq / h
    return ErrorMeasures(
        l2_error=float(np.sqrt(l2_sq)),
        energy_error=float(np.sqrt(grad_part + flux_part + jump_part)),
        grad_part=grad_part,
        flux_part=flux_part,
        jump_part=jump_part,
        boundary_mismatch=mismatch_sq / h,
    )


def convergence_study(
    order: int,
    levels: int,
    beta: float,
    problem,
    base_divisions: int = 8,
    rel_tol: float = 1e-12,
    quad_degree=None,
    edge_quad_degree=None,
    node_placement: str = "chart",
) -> list[ConvergenceRecord]:
    """Solve on a sequence of meshes n_div = base * 2^level and record errors."""
    if levels < 3:
        raise ValueError("a study needs at least three levels")
    records: list[ConvergenceRecord] = []
    previous = None
    for level in range(levels):
        mesh = build_mesh(base_divisions * 2**level, order, problem, node_placement)
        system = assemble(
            mesh, beta, problem, quad_degree=quad_degree, edge_quad_degree=edge_quad_degree
        )
        report = solve_spd(system, rel_tol=rel_tol)
        err = error_measures(mesh, report.solution, problem)
        eoc_l2 = eoc_energy = None
        if previous is not None:
            eoc_l2 = float(np.log2(previous.l2_error / err.l2_error))
            eoc_energy = float(np.log2(previous.energy_error / err.energy_error))
        records.append(
            ConvergenceRecord(
                order=order,
                level=level,
                h=mesh.h,
                dof=mesh.num_nodes,
                l2_error=err.l2_error,
                energy_error=err.energy_error,
                eoc_l2=eoc_l2,
                eoc_energy=eoc_energy,
            )
        )
        previous = err
    return records


CSV_HEADER = "k,level,h,dof,energy_error,l2_error,eoc_energy,eoc_l2"


def records_to_csv(records) -> str:
    """Serialize study records with a fixed schema and float formatting."""
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for rec in records:
        eoc_e = "" if rec.eoc_energy is None else f"{rec.eoc_energy:.6f}"
        eoc_l = "" if rec.eoc_l2 is None else f"{rec.eoc_l2:.6f}"
        out.write(
            f"{rec.order},{rec.level},{rec.h:.12e},{rec.dof},"
            f"{rec.energy_error:.12e},{rec.l2_error:.12e},{eoc_e},{eoc_l}\n"
        )
    return out.getvalue()


def records_table(records) -> str:
    """Fixed-width text table of a study, mirroring the CSV contents."""
    lines = [
        f"{'k':>2} {'level':>5} {'h':>12} {'dof':>8} "
        f"{'energy_error':>14} {'l2_error':>14} {'eoc_energy':>10} {'eoc_l2':>8}"
    ]
    for rec in records:
        eoc_e = "-" if rec.eoc_energy is None else f"{rec.eoc_energy:.2f}"
        eoc_l = "-" if rec.eoc_l2 is None else f"{rec.eoc_l2:.2f}"
        lines.append(
            f"{rec.order:>2} {rec.level:>5} {rec.h:>12.6f} {rec.dof:>8} "
            f"{rec.energy_error:>14.6e} {rec.l2_error:>14.6e} {eoc_e:>10} {eoc_l:>8}"
        )
    return "\n".join(lines) + "\n"

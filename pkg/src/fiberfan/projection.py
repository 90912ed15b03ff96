"""Surjective projections, their dual data, and fiber machinery."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotSurjective, PointOutsideQ
from .linalg import (
    Matrix,
    Vector,
    ZERO,
    dot,
    mat,
    matvec,
    nullspace,
    rank,
    solve,
    sub,
    vec,
)
from .polytopes import Polytope, polytope_from_H


@dataclass(frozen=True)
class ProjectionPair:
    """A surjective linear map with its kernel and induced dual projection.

    dual maps a covector on V (coefficient tuple) to its restriction to
    ker(forward), written in coordinates dual to kernel_basis; its rows are
    therefore the kernel basis vectors themselves.
    """

    forward: Matrix
    kernel_basis: tuple[Vector, ...]
    dual: Matrix

    @property
    def source_dim(self) -> int:
        return len(self.forward[0]) if self.forward else 0

    @property
    def target_dim(self) -> int:
        return len(self.forward)

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_basis)

    def project_point(self, x: Vector) -> Vector:
        return matvec(self.forward, x)

    def restrict_covector(self, psi: Vector) -> Vector:
        return matvec(self.dual, psi)

    def lift_kernel_covector(self, psi_k: Vector) -> Vector:
        """Some ambient covector restricting to psi_k on the kernel."""
        if len(psi_k) != self.kernel_dim:
            raise ValueError("covector not in kernel-dual coordinates")
        if not self.kernel_basis:
            return tuple(ZERO for _ in range(self.source_dim))
        sol = solve(self.kernel_basis, psi_k)
        if sol is None:
            raise ValueError("kernel basis is degenerate")
        return sol


def make_projection(forward) -> ProjectionPair:
    m = mat(forward)
    if not m:
        raise NotSurjective("empty projection matrix")
    if rank(m) != len(m):
        raise NotSurjective("projection matrix is row-rank deficient")
    kernel = nullspace(m, ncols=len(m[0]))
    return ProjectionPair(m, kernel, kernel)


def fiber_vertices(P: Polytope, pp: ProjectionPair, q: Vector) -> list[Vector]:
    """Vertices of the fiber of P over q; empty if q lies outside pi(P)."""
    ineqs = [(a, b) for a, b, _ in P.facets]
    eqs = list(P.equations) + [(row, qi) for row, qi in zip(pp.forward, q)]
    return polytope_from_H(P.ambient_dim, ineqs, eqs)


def fiber_in_kernel_coords(
    P: Polytope, pp: ProjectionPair, q: Vector
) -> tuple[Polytope, Vector, list[Vector]]:
    """Fiber over q as a polytope in kernel coordinates.

    Returns (fiber polytope in R^kernel_dim, base point, ambient vertices in
    the same order).  Raises PointOutsideQ on an empty fiber.
    """
    verts = fiber_vertices(P, pp, q)
    if not verts:
        raise PointOutsideQ(f"no fiber over {q}")
    base = verts[0]
    if not pp.kernel_basis:
        return Polytope([()]), base, verts
    basis_cols = tuple(zip(*pp.kernel_basis))
    coords = []
    for v in verts:
        t = solve(basis_cols, sub(v, base))
        if t is None:
            raise PointOutsideQ("fiber direction escapes the kernel")
        coords.append(t)
    return Polytope(coords), base, verts


def minimal_face_over(P: Polytope, pp: ProjectionPair, q, psi) -> frozenset:
    """Smallest face of P containing the psi-maximal face of the fiber over q."""
    q = vec(q)
    psi = vec(psi)
    verts = fiber_vertices(P, pp, q)
    if not verts:
        raise PointOutsideQ(f"{q} is outside the projected polytope")
    lifted = pp.lift_kernel_covector(psi)
    vals = [dot(lifted, v) for v in verts]
    top = max(vals)
    arg = [v for v, t in zip(verts, vals) if t == top]
    return P.minimal_face_labels(arg)

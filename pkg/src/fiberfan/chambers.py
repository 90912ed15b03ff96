"""Chamber complexes of polytope projections and the fiber fan.

The cell complex is computed by slicing Q with every supporting hyperplane of
every projected face and then merging slice regions whose sets of defining
faces coincide; that turns the point-wise definition of a cell into a finite
exact computation with certificates (the defining-face signatures).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import Cone, Fan, pointwise_refinement
from .errors import CellNotInComplex, NotFullDimensional, PointOutsideQ
from .linalg import Vector, ZERO, dot, is_zero, neg, primitive_signed, vec
from .polytopes import NormalFan, Polytope, convex_hull, polytope_from_H
from .projection import ProjectionPair, fiber_in_kernel_coords


def _canonical_hyperplane(a: Vector, b: Fraction):
    joint = primitive_signed(tuple(a) + (b,))
    return joint[:-1], joint[-1]


def projected_faces(P: Polytope, pp: ProjectionPair) -> dict[frozenset, Polytope]:
    """Images of all nonempty faces of P, as hull polytopes in W."""
    out = {}
    for f in P.face_lattice().nonempty_faces():
        pts = [pp.project_point(P.vertices[i]) for i in sorted(f.labels)]
        out[f.labels] = convex_hull(pts)
    return out


@dataclass(frozen=True)
class Cell:
    """Cell of the chamber complex, identified by its defining faces."""

    polytope: Polytope
    defining_faces: frozenset
    dim: int

    @cached_property
    def key(self):
        return tuple(sorted(tuple(sorted(f)) for f in self.defining_faces))

    @cached_property
    def _hash(self):
        return hash(self.key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Cell) and self.key == other.key

    def relint_point(self) -> Vector:
        return self.polytope.relint_point()


class CellComplex:
    """All cells of the projection with the inclusion order."""

    def __init__(self, P: Polytope, pp: ProjectionPair, Q: Polytope, cells: list[Cell]):
        self.P = P
        self.pp = pp
        self.Q = Q
        self.cells = sorted(cells, key=lambda c: (c.dim, c.key))
        self._by_key = {c.key: c for c in self.cells}
        self.chambers = [c for c in self.cells if c.dim == Q.dim]

    def __len__(self):
        return len(self.cells)

    def __contains__(self, cell: Cell) -> bool:
        return cell.key in self._by_key

    def leq(self, a: Cell, b: Cell) -> bool:
        """a <= b in the face order of the complex (a is contained in b)."""
        return a.defining_faces >= b.defining_faces

    def cells_below(self, cell: Cell) -> list[Cell]:
        return [c for c in self.cells if self.leq(c, cell)]


def _piece_sign_ok(z, signed):
    for (a, b), s in signed:
        v = dot(a, z) - b
        if (s == 1 and v <= 0) or (s == -1 and v >= 0) or (s == 0 and v != 0):
            return False
    return True


def chamber_complex(P: Polytope, pp: ProjectionPair) -> CellComplex:
    images = projected_faces(P, pp)
    all_labels = frozenset(range(len(P.vertices)))
    Q = images[all_labels]
    if Q.dim != pp.target_dim:
        raise NotFullDimensional("projected polytope must span the target space")
    hyps = {}
    for img in images.values():
        for a, b in img.equations:
            hyps[_canonical_hyperplane(a, b)] = True
        for a, b, _ in img.facets:
            hyps[_canonical_hyperplane(a, b)] = True
    hyperplanes = sorted(hyps)
    n = pp.target_dim

    q_ineqs = [(a, b) for a, b, _ in Q.facets]
    pieces = [(q_ineqs, [], [])]  # (ineqs, eqs, signed hyperplanes)
    for h in hyperplanes:
        a, b = h
        nxt = []
        for ineqs, eqs, signed in pieces:
            for s in (1, 0, -1):
                if s == 1:
                    cand = (ineqs + [(neg(a), -b)], eqs, signed + [(h, 1)])
                elif s == -1:
                    cand = (ineqs + [(a, b)], eqs, signed + [(h, -1)])
                else:
                    cand = (ineqs, eqs + [(a, b)], signed + [(h, 0)])
                verts = polytope_from_H(n, cand[0], cand[1])
                if not verts:
                    continue
                z = verts[0]
                if len(verts) > 1:
                    acc = list(verts[0])
                    for v in verts[1:]:
                        acc = [x + y for x, y in zip(acc, v)]
                    z = tuple(x / len(verts) for x in acc)
                if _piece_sign_ok(z, cand[2]):
                    nxt.append(cand)
        pieces = nxt

    by_sig: dict[frozenset, None] = {}
    witnesses: dict[frozenset, Vector] = {}
    for ineqs, eqs, signed in pieces:
        verts = polytope_from_H(n, ineqs, eqs)
        acc = list(verts[0])
        for v in verts[1:]:
            acc = [x + y for x, y in zip(acc, v)]
        z = tuple(x / len(verts) for x in acc)
        sig = frozenset(labels for labels, img in images.items() if img.contains(z))
        if sig and sig not in by_sig:
            by_sig[sig] = None
            witnesses[sig] = z
    cells = []
    for sig in by_sig:
        ineqs = []
        eqs = []
        for labels in sig:
            img = images[labels]
            ineqs.extend((a, b) for a, b, _ in img.facets)
            eqs.extend(img.equations)
        verts = polytope_from_H(n, ineqs, eqs)
        poly = Polytope(verts)
        cells.append(Cell(poly, sig, poly.dim))
    return CellComplex(P, pp, Q, cells)


def cell_of(P: Polytope, pp: ProjectionPair, q) -> Cell:
    """The cell containing q: intersection of projected faces through q."""
    q = vec(q)
    images = projected_faces(P, pp)
    sig = frozenset(labels for labels, img in images.items() if img.contains(q))
    if not sig:
        raise PointOutsideQ(f"{q} is outside the projected polytope")
    ineqs = []
    eqs = []
    for labels in sig:
        img = images[labels]
        ineqs.extend((a, b) for a, b, _ in img.facets)
        eqs.extend(img.equations)
    verts = polytope_from_H(pp.target_dim, ineqs, eqs)
    poly = Polytope(verts)
    return Cell(poly, sig, poly.dim)


@dataclass
class FiberFan:
    """Fan in kernel-dual coordinates with a relint witness per cone."""

    fan: Fan
    witnesses: dict

    def __len__(self):
        return len(self.fan)

    def maximal_cones(self) -> list[Cone]:
        return self.fan.maximal_cones()


def image_cones(P: Polytope, pp: ProjectionPair) -> dict[frozenset, Cone]:
    """pi-dual images of all normal cones, indexed by face labels."""
    nf = NormalFan(P)
    return {
        labels: cone.image(pp.dual) if pp.kernel_dim else Cone.zero(0)
        for labels, cone in nf.cone_of_face.items()
    }


def fiber_fan(P: Polytope, pp: ProjectionPair) -> FiberFan:
    """Common refinement of the projected normal cones (the fiber fan)."""
    members = list(image_cones(P, pp).values())
    cells = pointwise_refinement(members, pp.kernel_dim)
    fan = Fan.from_cones([c for c, _ in cells])
    return FiberFan(fan, {c.key: w for c, w in cells})


def cone_of(P: Polytope, pp: ProjectionPair, psi) -> Cone:
    """Minimal fiber-fan cone containing psi (kernel-dual coordinates)."""
    psi = vec(psi)
    ineqs = []
    eqs = []
    for cone in image_cones(P, pp).values():
        if cone.contains(psi):
            ineqs.extend(cone.facets)
            eqs.extend(cone.equations)
    return Cone.from_inequalities(pp.kernel_dim, ineqs, eqs)


def fiber_normal_fan(P: Polytope, pp: ProjectionPair, cell: Cell) -> NormalFan:
    """Normal fan of the fiber over a relative-interior point of the cell."""
    q = cell.relint_point()
    fiber, _, _ = fiber_in_kernel_coords(P, pp, q)
    return NormalFan(fiber)


def local_cone(P: Polytope, pp: ProjectionPair, cell: Cell, psi) -> Cone:
    """Minimal cone of the fiber normal fan over the cell containing psi."""
    psi = vec(psi)
    fiber, _, _ = fiber_in_kernel_coords(P, pp, cell.relint_point())
    vals = [dot(psi, v) for v in fiber.vertices]
    top = max(vals)
    arg = [i for i, t in enumerate(vals) if t == top]
    face = fiber.minimal_face_labels([fiber.vertices[i] for i in arg])
    idx = sorted(face)
    base = fiber.vertices[idx[0]]
    eqs = [tuple(x - y for x, y in zip(fiber.vertices[i], base)) for i in idx[1:]]
    ineqs = [
        tuple(x - y for x, y in zip(base, fiber.vertices[j]))
        for j in range(len(fiber.vertices))
        if j not in face
    ]
    return Cone.from_inequalities(pp.kernel_dim, ineqs, eqs)


def lexicographic_cells(complex_: CellComplex) -> list[Cell]:
    """Cells whose closure contains a vertex of Q."""
    out = []
    for cell in complex_.cells:
        if any(cell.polytope.contains(v) for v in complex_.Q.vertices):
            out.append(cell)
    return out


def chamber_adjacency(complex_: CellComplex) -> list[tuple[int, int]]:
    """Edges (i, j) between chambers sharing a codimension-one cell."""
    chambers = complex_.chambers
    walls = [c for c in complex_.cells if c.dim == complex_.Q.dim - 1]
    edges = set()
    for i in range(len(chambers)):
        for j in range(i + 1, len(chambers)):
            for w in walls:
                if complex_.leq(w, chambers[i]) and complex_.leq(w, chambers[j]):
                    edges.add((i, j))
                    break
    return sorted(edges)

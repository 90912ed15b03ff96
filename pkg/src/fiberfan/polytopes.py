"""Polytopes with labeled vertices, face lattices, and normal fans.

Facet enumeration is brute force over affinely independent vertex subsets,
which is exact and adequate at desk scale (dim <= 5, <= 16 vertices).  Lower
dimensional polytopes are first-class: faces, facets, and normal cones are
computed relative to the affine hull, and normal cones pick up the hull's
orthogonal complement as lineality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from .cones import Cone, Fan
from .errors import DegenerateInput, DimMismatch, NotAFace
from .linalg import (
    Vector,
    ZERO,
    add,
    affine_rank,
    det,
    dot,
    is_zero,
    neg,
    nullspace,
    primitive,
    rank,
    rref,
    scale,
    solve,
    sub,
    vec,
)
from .lp import in_convex_hull


@dataclass(frozen=True)
class Face:
    """Face of a polytope, identified by its vertex-label set."""

    labels: frozenset
    dim: int

    def __le__(self, other: "Face") -> bool:
        return self.labels <= other.labels


class Polytope:
    """Convex hull of labeled vertices (labels 0..n-1 in input order)."""

    def __init__(self, vertices: Sequence, validate: bool = False):
        self.vertices: tuple[Vector, ...] = tuple(vec(v) for v in vertices)
        if not self.vertices:
            raise ValueError("polytope needs at least one vertex")
        self.ambient_dim = len(self.vertices[0])
        if any(len(v) != self.ambient_dim for v in self.vertices):
            raise DimMismatch("vertices of mixed dimension")
        if validate:
            self._check_convex_position()

    def _check_convex_position(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise DegenerateInput("duplicate vertices")
        for i, v in enumerate(self.vertices):
            others = [w for j, w in enumerate(self.vertices) if j != i]
            if others and in_convex_hull(v, others):
                raise DegenerateInput(f"vertex {i} is not extreme")

    @property
    def dim(self) -> int:
        return affine_rank(self.vertices)

    @cached_property
    def equations(self) -> tuple[tuple[Vector, Fraction], ...]:
        """Affine hull as (a, b) pairs with a.x = b, canonical."""
        base = self.vertices[0]
        dirs = [sub(v, base) for v in self.vertices[1:]]
        normals = nullspace(dirs, ncols=self.ambient_dim) if dirs else nullspace(
            (tuple(ZERO for _ in range(self.ambient_dim)),), ncols=self.ambient_dim
        )
        return tuple((a, dot(a, base)) for a in normals)

    @cached_property
    def facets(self) -> tuple[tuple[Vector, Fraction, frozenset], ...]:
        """Supporting facet inequalities (a, b, tight labels) with a.x <= b."""
        d = self.dim
        if d <= 0:
            return ()
        eq_rows = [a for a, _ in self.equations]
        eq_rref, eq_piv = rref(eq_rows)
        found = {}
        for subset in combinations(range(len(self.vertices)), d):
            pts = [self.vertices[i] for i in subset]
            if affine_rank(pts) != d - 1:
                continue
            rows = [sub(p, pts[0]) for p in pts[1:]] + eq_rows
            normals = nullspace(rows, ncols=self.ambient_dim)
            a = None
            for cand in normals:
                red = cand
                for row, p in zip(eq_rref, eq_piv):
                    if red[p] != 0:
                        f = red[p] / row[p]
                        red = tuple(x - f * y for x, y in zip(red, row))
                if not is_zero(red):
                    a = primitive(red)
                    break
            if a is None:
                continue
            b = dot(a, pts[0])
            vals = [dot(a, v) - b for v in self.vertices]
            if all(x <= 0 for x in vals):
                pass
            elif all(x >= 0 for x in vals):
                a, b, vals = neg(a), -b, [-x for x in vals]
            else:
                continue
            tight = frozenset(i for i, x in enumerate(vals) if x == 0)
            found[tight] = (a, b, tight)
        return tuple(sorted(found.values(), key=lambda t: sorted(t[2])))

    def contains(self, point: Vector) -> bool:
        if len(point) != self.ambient_dim:
            raise DimMismatch("point/polytope dimension mismatch")
        return all(dot(a, point) == b for a, b in self.equations) and all(
            dot(a, point) <= b for a, b, _ in self.facets
        )

    def contains_relint(self, point: Vector) -> bool:
        return all(dot(a, point) == b for a, b in self.equations) and all(
            dot(a, point) < b for a, b, _ in self.facets
        )

    def relint_point(self) -> Vector:
        out = self.vertices[0]
        for v in self.vertices[1:]:
            out = add(out, v)
        return scale(out, Fraction(1, len(self.vertices)))

    @cached_property
    def geometry_key(self):
        return (self.ambient_dim, tuple(sorted(set(self.vertices))))

    def same_geometry(self, other: "Polytope") -> bool:
        return self.geometry_key == other.geometry_key

    def face_lattice(self) -> "FaceLattice":
        return FaceLattice(self)

    def minimal_face_labels(self, points: Sequence[Vector]) -> frozenset:
        """Label set of the smallest face containing all given points."""
        labels = frozenset(range(len(self.vertices)))
        for a, b, tight in self.facets:
            if all(dot(a, p) == b for p in points):
                labels &= tight
        return labels

    def face_polytope(self, labels: Iterable[int]) -> "Polytope":
        return Polytope([self.vertices[i] for i in sorted(labels)])

    def triangulate_labels(self) -> list[tuple[int, ...]]:
        """Simplices (label tuples) of the pulling triangulation at min label."""
        d = self.dim
        labels = sorted(set(range(len(self.vertices))))
        if affine_rank(self.vertices) + 1 == len(set(self.vertices)):
            return [tuple(labels)]
        v0 = labels[0]
        out = []
        for a, b, tight in self.facets:
            if v0 in tight:
                continue
            sub_poly = self.face_polytope(sorted(tight))
            back = sorted(tight)
            for simplex in sub_poly.triangulate_labels():
                out.append(tuple(sorted([v0] + [back[i] for i in simplex])))
        return out

    def volume(self) -> Fraction:
        """Euclidean volume; requires a full-dimensional polytope."""
        d = self.dim
        if d != self.ambient_dim:
            raise DimMismatch("volume requires a full-dimensional polytope")
        if d == 0:
            return Fraction(1)
        total = Fraction(0)
        for simplex in self.triangulate_labels():
            pts = [self.vertices[i] for i in simplex]
            m = [sub(p, pts[0]) for p in pts[1:]]
            total += abs(det(m))
        return total / factorial(d)


class FaceLattice:
    """Graded lattice of faces keyed by vertex-label sets (with empty face)."""

    def __init__(self, polytope: Polytope):
        self.polytope = polytope
        top = frozenset(range(len(polytope.vertices)))
        sets = {top} | {tight for _, _, tight in polytope.facets}
        frontier = set(sets)
        while frontier:
            new = set()
            for s in frontier:
                for t in sets:
                    u = s & t
                    if u not in sets and u not in new:
                        new.add(u)
            sets |= new
            frontier = new
        sets.add(frozenset())
        self.faces = tuple(
            sorted(
                (Face(s, affine_rank([polytope.vertices[i] for i in s]) if s else -1) for s in sets),
                key=lambda f: (f.dim, sorted(f.labels)),
            )
        )
        self._by_labels = {f.labels: f for f in self.faces}

    def __len__(self):
        return len(self.faces)

    def __contains__(self, labels) -> bool:
        return frozenset(labels) in self._by_labels

    def face(self, labels) -> Face:
        key = frozenset(labels)
        if key not in self._by_labels:
            raise NotAFace(f"{sorted(key)} is not a face")
        return self._by_labels[key]

    def nonempty_faces(self) -> list[Face]:
        return [f for f in self.faces if f.labels]

    def proper_part(self) -> list[Face]:
        top = frozenset(range(len(self.polytope.vertices)))
        return [f for f in self.faces if f.labels and f.labels != top]

    def is_graded(self) -> bool:
        """Every maximal chain has length dim+2 (vacuously via covers)."""
        by_dim: dict[int, list[Face]] = {}
        for f in self.faces:
            by_dim.setdefault(f.dim, []).append(f)
        dims = sorted(by_dim)
        if dims != list(range(-1, self.polytope.dim + 1)):
            return False
        for f in self.faces:
            if f.dim == self.polytope.dim:
                continue
            if not any(f.labels < g.labels and g.dim == f.dim + 1 for g in self.faces):
                return False
        return True


def convex_hull(points: Sequence, ambient_dim: int | None = None) -> Polytope:
    """Polytope on the extreme points of a finite point set."""
    pts = [vec(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    uniq = sorted(set(pts))
    extreme = []
    for p in uniq:
        others = [q for q in uniq if q != p]
        if not others or not in_convex_hull(p, others):
            extreme.append(p)
    return Polytope(extreme)


def normal_cone(polytope: Polytope, labels: Iterable[int]) -> Cone:
    """Normal cone of the face with the given labels (closure of argmax set)."""
    lat = polytope.face_lattice()
    face = lat.face(labels)
    if not face.labels:
        raise NotAFace("empty face has no normal cone")
    idx = sorted(face.labels)
    base = polytope.vertices[idx[0]]
    eqs = [sub(polytope.vertices[i], base) for i in idx[1:]]
    ineqs = [sub(base, polytope.vertices[j]) for j in range(len(polytope.vertices)) if j not in face.labels]
    return Cone.from_inequalities(polytope.ambient_dim, ineqs, eqs)


class NormalFan:
    """Normal fan of a polytope plus the face <-> cone dictionaries."""

    def __init__(self, polytope: Polytope):
        self.polytope = polytope
        lat = polytope.face_lattice()
        self.lattice = lat
        self.cone_of_face: dict[frozenset, Cone] = {}
        self.face_of_cone: dict[tuple, frozenset] = {}
        for f in lat.nonempty_faces():
            c = normal_cone(polytope, f.labels)
            self.cone_of_face[f.labels] = c
            self.face_of_cone[c.key] = f.labels
        self.fan = Fan.from_cones(self.cone_of_face.values())

    def __iter__(self):
        return iter(self.fan)


def polytope_from_H(
    n: int,
    ineqs: Sequence[tuple[Vector, Fraction]],
    eqs: Sequence[tuple[Vector, Fraction]] = (),
) -> list[Vector]:
    """Vertices of {x : a.x <= b, e.x = c}; the region must be bounded."""
    if eqs:
        rows = [a for a, _ in eqs]
        x0 = solve(rows, [b for _, b in eqs])
        if x0 is None:
            return []
        basis = nullspace(rows, ncols=n)
    else:
        x0 = tuple(ZERO for _ in range(n))
        basis = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    f = len(basis)
    red = []
    for a, b in ineqs:
        ra = tuple(dot(a, t) for t in basis)
        rb = b - dot(a, x0)
        red.append((ra, rb))
    if f == 0:
        ok = all(rb >= 0 for _, rb in red)
        return [x0] if ok else []
    verts = set()
    rows = [ra for ra, _ in red]
    for subset in combinations(range(len(red)), f):
        m = [red[i][0] for i in subset]
        rhs = [red[i][1] for i in subset]
        if rank(m) != f:
            continue
        t = solve(m, rhs)
        if t is None:
            continue
        if all(dot(ra, t) <= rb for ra, rb in red):
            x = list(x0)
            for ti, tb in zip(t, basis):
                x = [xi + ti * bi for xi, bi in zip(x, tb)]
            verts.add(tuple(x))
    return sorted(verts)

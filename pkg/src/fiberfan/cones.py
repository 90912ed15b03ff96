"""Rational polyhedral cones, fans, and common refinements.

Cones carry a canonical key (sorted primitive extreme rays reduced modulo the
lineality space, plus a canonical lineality basis), so set-level operations on
fans are syntactic.  Dual description runs by brute-force subset enumeration,
which is exact and fast at desk scale; the same engine serves both directions
by cone polarity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimMismatch, SupportMismatch
from .linalg import (
    Matrix,
    Vector,
    ZERO,
    add,
    dot,
    is_zero,
    matvec,
    neg,
    nullspace,
    primitive,
    primitive_signed,
    rank,
    rref,
    sub,
    vec,
    zeros,
)


def _reduce_mod(v: Vector, rows: Sequence[Vector], pivots: Sequence[int]) -> Vector:
    """Reduce v modulo the span of RREF rows (pivot entries become zero)."""
    out = list(v)
    for row, p in zip(rows, pivots):
        if out[p] != 0:
            f = out[p] / row[p]
            out = [x - f * y for x, y in zip(out, row)]
    return tuple(out)


def extreme_rays(
    ineqs: Sequence[Vector], eqs: Sequence[Vector], n: int
) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Extreme rays and lineality of {x : a.x >= 0 (a in ineqs), e.x = 0}.

    Rays come back primitive, reduced modulo the lineality space, and sorted;
    the lineality basis is the canonical signed-primitive RREF basis.  By
    polarity the same routine computes facet covectors from generators.
    """
    if n == 0:
        return (), ()
    span = nullspace(eqs, ncols=n) if eqs else tuple(
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    )
    d0 = len(span)
    if d0 == 0:
        return (), ()
    reduced = []
    seen = set()
    for a in ineqs:
        ra = tuple(dot(a, s) for s in span)
        if is_zero(ra):
            continue
        ra = primitive(ra)
        if ra not in seen:
            seen.add(ra)
            reduced.append(ra)
    lin_t = nullspace(reduced, ncols=d0) if reduced else tuple(
        tuple(Fraction(int(i == j)) for j in range(d0)) for i in range(d0)
    )
    l = len(lin_t)
    lin_x = [tuple(sum(t[i] * span[i][j] for i in range(d0)) for j in range(n)) for t in lin_t]
    lin_rref, lin_pivots = rref(lin_x)
    lineality = tuple(primitive_signed(r) for r in lin_rref)
    if d0 == l:
        return (), lineality
    k = d0 - l - 1
    rays_x = {}
    for subset in combinations(range(len(reduced)), k):
        rows = [reduced[i] for i in subset]
        w_space = nullspace(rows, ncols=d0) if rows else lin_t + tuple()
        if not rows:
            w_space = nullspace((zeros(d0),), ncols=d0)
        if len(w_space) != l + 1:
            continue
        lt_rref, lt_piv = rref(lin_t) if lin_t else ((), ())
        w = None
        for cand in w_space:
            red = _reduce_mod(cand, lt_rref, lt_piv) if lin_t else cand
            if not is_zero(red):
                w = red
                break
        if w is None:
            continue
        vals = [dot(r, w) for r in reduced]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            w = neg(w)
        else:
            continue
        x = tuple(sum(w[i] * span[i][j] for i in range(d0)) for j in range(n))
        x = primitive(_reduce_mod(x, lin_rref, lin_pivots) if lineality else x)
        if not is_zero(x):
            rays_x[x] = True
    return tuple(sorted(rays_x)), lineality


@dataclass(frozen=True)
class Cone:
    """Polyhedral cone with canonical generator and facet data.

    rays: primitive extreme rays of the pointed quotient, reduced modulo
    lineality; facets: irredundant supporting covectors (>= 0 on the cone);
    equations: canonical basis of the orthogonal complement of the span.
    """

    ambient_dim: int
    rays: tuple[Vector, ...]
    lineality: tuple[Vector, ...]
    facets: tuple[Vector, ...]
    equations: tuple[Vector, ...]

    @staticmethod
    def from_inequalities(n: int, ineqs: Iterable, eqs: Iterable = ()) -> "Cone":
        ineqs = [vec(a) for a in ineqs]
        eqs = [vec(e) for e in eqs]
        rays, lineality = extreme_rays(ineqs, eqs, n)
        facets, equations = extreme_rays(rays, lineality, n)
        return Cone(n, rays, lineality, facets, equations)

    @staticmethod
    def from_generators(n: int, gens: Iterable, lin: Iterable = ()) -> "Cone":
        gens = [vec(g) for g in gens if not is_zero(vec(g))]
        lin = [vec(v) for v in lin]
        facets, equations = extreme_rays(gens, lin, n)
        rays, lineality = extreme_rays(facets, equations, n)
        return Cone(n, rays, lineality, facets, equations)

    @staticmethod
    def full_space(n: int) -> "Cone":
        return Cone.from_inequalities(n, [], [])

    @staticmethod
    def zero(n: int) -> "Cone":
        return Cone.from_generators(n, [], [])

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.equations)

    @cached_property
    def key(self):
        return (self.ambient_dim, self.rays, self.lineality)

    @cached_property
    def _hash(self):
        return hash(self.key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key == other.key

    def is_strongly_convex(self) -> bool:
        return not self.lineality

    def contains(self, v: Vector) -> bool:
        return all(dot(e, v) == 0 for e in self.equations) and all(
            dot(f, v) >= 0 for f in self.facets
        )

    def contains_relint(self, v: Vector) -> bool:
        return all(dot(e, v) == 0 for e in self.equations) and all(
            dot(f, v) > 0 for f in self.facets
        )

    def contains_cone(self, other: "Cone") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimMismatch("cone containment across ambient spaces")
        gens = list(other.rays) + list(other.lineality) + [neg(l) for l in other.lineality]
        return all(self.contains(g) for g in gens)

    def relint_point(self) -> Vector:
        """Deterministic relative-interior point: the sum of primitive rays."""
        if not self.rays:
            return zeros(self.ambient_dim)
        out = self.rays[0]
        for r in self.rays[1:]:
            out = add(out, r)
        return out

    def intersect(self, other: "Cone") -> "Cone":
        if other.ambient_dim != self.ambient_dim:
            raise DimMismatch("cone intersection across ambient spaces")
        return Cone.from_inequalities(
            self.ambient_dim,
            self.facets + other.facets,
            self.equations + other.equations,
        )

    def image(self, m: Matrix) -> "Cone":
        if not m:
            return Cone.zero(0)
        if len(m[0]) != self.ambient_dim:
            raise DimMismatch("cone image: matrix/ambient mismatch")
        tgt = len(m)
        gens = [matvec(m, r) for r in self.rays]
        lin = [matvec(m, l) for l in self.lineality]
        return Cone.from_generators(tgt, gens, lin)

    def is_face_of(self, other: "Cone") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimMismatch("face test across ambient spaces")
        if not other.contains_cone(self):
            return False
        gens = list(self.rays) + list(self.lineality) + [neg(l) for l in self.lineality]
        if not gens:
            gens = [zeros(self.ambient_dim)]
        tight = [f for f in other.facets if all(dot(f, g) == 0 for g in gens)]
        face = Cone.from_inequalities(
            self.ambient_dim, other.facets, other.equations + tuple(tight)
        )
        return face == self

    def faces(self) -> list["Cone"]:
        """All faces, via intersections of facet subsets (desk scale)."""
        out = {self.key: self}
        m = len(self.facets)
        for size in range(1, m + 1):
            for subset in combinations(range(m), size):
                f = Cone.from_inequalities(
                    self.ambient_dim,
                    self.facets,
                    self.equations + tuple(self.facets[i] for i in subset),
                )
                out.setdefault(f.key, f)
        return sorted(out.values(), key=lambda c: c.key)


def face_closure(cones: Iterable[Cone]) -> dict:
    out = {}
    for c in cones:
        for f in c.faces():
            out.setdefault(f.key, f)
    return out


@dataclass
class Fan:
    """A set of cones keyed canonically; lineality is allowed."""

    ambient_dim: int
    cones: dict = field(default_factory=dict)
    closed_under_faces: bool = False

    @staticmethod
    def from_cones(cones: Iterable[Cone], close: bool = False, validate: bool = False) -> "Fan":
        cones = list(cones)
        if not cones:
            raise ValueError("empty fan")
        n = cones[0].ambient_dim
        if any(c.ambient_dim != n for c in cones):
            raise DimMismatch("fan cones in different ambient spaces")
        table = face_closure(cones) if close else {c.key: c for c in cones}
        fan = Fan(n, table, closed_under_faces=close)
        if validate:
            fan.validate_face_to_face()
        return fan

    def __contains__(self, cone: Cone) -> bool:
        return cone.key in self.cones

    def __iter__(self):
        return iter(sorted(self.cones.values(), key=lambda c: c.key))

    def __len__(self):
        return len(self.cones)

    def validate_face_to_face(self):
        items = list(self)
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                c = a.intersect(b)
                if not (c.is_face_of(a) and c.is_face_of(b)):
                    raise ValueError(
                        f"fan is not face-to-face: {a.key} vs {b.key}"
                    )

    def maximal_cones(self) -> list[Cone]:
        items = list(self)
        out = []
        for c in items:
            if not any(o is not c and o.contains_cone(c) and o.key != c.key for o in items):
                out.append(c)
        return out

    def is_complete(self) -> bool:
        """Wall test: pure, every facet of a maximal cone shared by exactly two."""
        maxes = self.maximal_cones()
        if not maxes:
            return False
        n = self.ambient_dim
        if any(m.dim != n for m in maxes):
            return False
        if len(maxes) == 1:
            return maxes[0].dim == n and not maxes[0].facets
        for m in maxes:
            for f in m.facets:
                wall = Cone.from_inequalities(n, m.facets, m.equations + (f,))
                others = [o for o in maxes if o.key != m.key and o.contains_cone(wall)]
                if len(others) != 1:
                    return False
        # connectivity of the wall graph
        seen = {maxes[0].key}
        frontier = [maxes[0]]
        while frontier:
            cur = frontier.pop()
            for f in cur.facets:
                wall = Cone.from_inequalities(n, cur.facets, cur.equations + (f,))
                for o in maxes:
                    if o.key not in seen and o.contains_cone(wall):
                        seen.add(o.key)
                        frontier.append(o)
        return len(seen) == len(maxes)


def arrangement_pieces(members: Sequence[Cone], n: int) -> list[tuple[Cone, Vector]]:
    """Faces of the linear arrangement generated by the members' walls.

    Returns (piece, relint witness) pairs whose relative interiors partition
    the ambient space; every member is a union of pieces.
    """
    hyps = {}
    for m in members:
        for h in list(m.facets) + list(m.equations):
            hs = primitive_signed(h)
            if not is_zero(hs):
                hyps[hs] = True
    hyperplanes = sorted(hyps)
    pieces = [(Cone.full_space(n), [])]
    for h in hyperplanes:
        nxt = []
        for piece, signs in pieces:
            for s in (1, 0, -1):
                if s == 1:
                    q = Cone.from_inequalities(n, piece.facets + (h,), piece.equations)
                elif s == -1:
                    q = Cone.from_inequalities(n, piece.facets + (neg(h),), piece.equations)
                else:
                    q = Cone.from_inequalities(n, piece.facets, piece.equations + (h,))
                z = q.relint_point()
                val = dot(h, z)
                if (s == 1 and val <= 0) or (s == -1 and val >= 0) or (s == 0 and val != 0):
                    continue
                ok = True
                for hp, sp in zip(hyperplanes, signs):
                    v = dot(hp, z)
                    if (sp == 1 and v <= 0) or (sp == -1 and v >= 0) or (sp == 0 and v != 0):
                        ok = False
                        break
                if ok:
                    nxt.append((q, signs + [s]))
        pieces = nxt
    return [(p, p.relint_point()) for p, _ in pieces]


def pointwise_refinement(members: Sequence[Cone], n: int) -> list[tuple[Cone, Vector]]:
    """Cells {cap of all members containing x} for x ranging over the space.

    This is the paper-style common refinement; members need not form a fan.
    Cells are deduplicated by canonical key; each comes with a relint witness.
    """
    if any(m.ambient_dim != n for m in members):
        raise DimMismatch("refinement members in different ambient spaces")
    pieces = arrangement_pieces(members, n)
    by_sig: dict[frozenset, list[int]] = {}
    for idx, (piece, z) in enumerate(pieces):
        sig = frozenset(i for i, m in enumerate(members) if m.contains_cone(piece))
        by_sig.setdefault(sig, []).append(idx)
    cells = {}
    for sig in by_sig:
        if not sig:
            continue
        ineqs: list[Vector] = []
        eqs: list[Vector] = []
        for i in sig:
            ineqs.extend(members[i].facets)
            eqs.extend(members[i].equations)
        cell = Cone.from_inequalities(n, ineqs, eqs)
        cells.setdefault(cell.key, cell)
    return [(c, c.relint_point()) for c in sorted(cells.values(), key=lambda c: c.key)]


def common_refinement_fans(parts: Sequence[Sequence[Cone]], n: int) -> Fan:
    """Common refinement of several cone families sharing total support."""
    members: list[Cone] = []
    for part in parts:
        members.extend(part)
    pieces = arrangement_pieces(members, n)
    # every part must cover exactly the same set of pieces
    for piece, z in pieces:
        covered = [any(m.contains_cone(piece) for m in part) for part in parts]
        if any(covered) and not all(covered):
            raise SupportMismatch("refinement parts have different supports")
    cells = pointwise_refinement(members, n)
    return Fan.from_cones([c for c, _ in cells])


def cones_union_covers(cover: Sequence[Cone], targets: Sequence[Cone], n: int) -> bool:
    """Exact test that union(targets) is contained in union(cover)."""
    pieces = arrangement_pieces(list(cover) + list(targets), n)
    for piece, z in pieces:
        if any(t.contains_cone(piece) for t in targets):
            if not any(c.contains_cone(piece) for c in cover):
                return False
    return True

"""Coherent and locally coherent strings, costrings, virtual cells and cones.

A ProjectionContext bundles the per-projection caches (face lattice, normal
fan, chamber complex, fiber fan, per-cell fiber data) that every duality
operation needs.  Enumerations are structured: locally coherent strings are
generated by choosing a fiber-fan cone per chamber and propagating forced
choices to lower cells, never by powerset search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .cones import Cone, Fan, cones_union_covers
from .errors import CapExceeded, ConeNotInHost, DimMismatch
from .linalg import Matrix, Vector, dot, matvec, transpose, vec
from .polytopes import Face, NormalFan, Polytope, convex_hull, polytope_from_H
from .projection import ProjectionPair, fiber_in_kernel_coords
from .chambers import (
    Cell,
    CellComplex,
    FiberFan,
    chamber_complex,
    fiber_fan,
    image_cones,
    projected_faces,
)


@dataclass(frozen=True)
class FaceCollection:
    """A set of faces of P given by vertex-label sets."""

    faces: frozenset
    provenance: str = "candidate"
    witness: tuple | None = None

    @cached_property
    def key(self):
        return tuple(sorted(tuple(sorted(f)) for f in self.faces))

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, FaceCollection) and self.key == other.key


@dataclass(frozen=True)
class ConeCollection:
    """A set of cones drawn from a host fan (default: the normal fan)."""

    cones: tuple
    provenance: str = "candidate"

    @staticmethod
    def of(cones: Iterable[Cone], provenance: str = "candidate") -> "ConeCollection":
        table = {c.key: c for c in cones}
        return ConeCollection(tuple(table[k] for k in sorted(table)), provenance)

    @cached_property
    def key(self):
        return tuple(c.key for c in self.cones)

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, ConeCollection) and self.key == other.key


@dataclass
class PosetReport:
    element_count: int
    relation_count: int
    map_checked: str
    order_reversing: bool
    bijective: bool
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.order_reversing and self.bijective


class ProjectionContext:
    """Shared caches for one projection pi: P -> Q."""

    def __init__(self, P: Polytope, pp: ProjectionPair):
        self.P = P
        self.pp = pp

    @cached_property
    def lattice(self):
        return self.P.face_lattice()

    @cached_property
    def normal_fan(self) -> NormalFan:
        return NormalFan(self.P)

    @cached_property
    def images(self) -> dict:
        return projected_faces(self.P, self.pp)

    @cached_property
    def image_cones(self) -> dict:
        return image_cones(self.P, self.pp)

    @cached_property
    def complex(self) -> CellComplex:
        return chamber_complex(self.P, self.pp)

    @cached_property
    def fiber_fan(self) -> FiberFan:
        return fiber_fan(self.P, self.pp)

    @cached_property
    def gamma_star(self) -> list[Cone]:
        return list(self.fiber_fan.fan)

    @cached_property
    def _fibers(self) -> dict:
        """cell key -> (fiber polytope in kernel coords, ambient vertices)."""
        out = {}
        for cell in self.complex.cells:
            fiber, _, verts = fiber_in_kernel_coords(self.P, self.pp, cell.relint_point())
            out[cell.key] = (fiber, verts)
        return out

    def selected_face(self, cell: Cell, psi: Vector) -> frozenset:
        """F_{c,psi}: smallest face of P containing the fiber face at psi."""
        fiber, verts = self._fibers[cell.key]
        vals = [dot(psi, v) for v in fiber.vertices]
        top = max(vals)
        arg = [verts[i] for i, t in enumerate(vals) if t == top]
        return self.P.minimal_face_labels(arg)

    @cached_property
    def string_member(self) -> dict:
        """(cell key, fiber-fan cone key) -> selected face labels."""
        out = {}
        for cell in self.complex.cells:
            for sigma in self.gamma_star:
                psi = self.fiber_fan.witnesses[sigma.key]
                out[(cell.key, sigma.key)] = self.selected_face(cell, psi)
        return out

    @cached_property
    def coherent_strings(self) -> dict:
        """Gamma*-cone key -> coherent string F(sigma)."""
        out = {}
        for sigma in self.gamma_star:
            faces = frozenset(
                self.string_member[(cell.key, sigma.key)] for cell in self.complex.cells
            )
            psi = self.fiber_fan.witnesses[sigma.key]
            out[sigma.key] = FaceCollection(faces, "coherent", tuple(psi))
        return out

    @cached_property
    def coherent_costrings(self) -> dict:
        """cell key -> coherent costring Delta(c) inside the normal fan."""
        out = {}
        for cell in self.complex.cells:
            cones = [
                self.normal_fan.cone_of_face[self.string_member[(cell.key, sigma.key)]]
                for sigma in self.gamma_star
            ]
            out[cell.key] = ConeCollection.of(cones, "coherent")
        return out

    @cached_property
    def cell_fans(self) -> dict:
        """cell key -> (fan Delta(c), cone key -> selected face labels)."""
        out = {}
        for cell in self.complex.cells:
            fiber, verts = self._fibers[cell.key]
            nf = NormalFan(fiber)
            members = {}
            for cone in nf.fan:
                labels = self.selected_face(cell, cone.relint_point())
                members[cone.key] = labels
            out[cell.key] = (nf.fan, members)
        return out

    def image_polytope(self, labels: frozenset) -> Polytope:
        return self.images[frozenset(labels)]

    def face_dim(self, labels: frozenset) -> int:
        return self.lattice.face(labels).dim

    def transport_faces(self, fc: FaceCollection) -> ConeCollection:
        return ConeCollection.of(
            (self.normal_fan.cone_of_face[f] for f in fc.faces), "transport"
        )

    def transport_cones(self, cc: ConeCollection) -> FaceCollection:
        return FaceCollection(
            frozenset(self.normal_fan.face_of_cone[c.key] for c in cc.cones), "transport"
        )

    def gamma_leq(self, a: Cell, b: Cell) -> bool:
        return self.complex.leq(a, b)

    def gamma_star_leq(self, a: Cone, b: Cone) -> bool:
        return b.contains_cone(a)

    @cached_property
    def _image_by_cone_key(self) -> dict:
        return {
            cone.key: self.image_cones[labels]
            for labels, cone in self.normal_fan.cone_of_face.items()
        }

    def image_relint_nested(self, high: Cone, low: Cone) -> bool:
        """relint of pi-dual image of `high` lies inside that of `low`."""
        cache = self.__dict__.setdefault("_nest_cache", {})
        key = (high.key, low.key)
        if key not in cache:
            im_h = self._image_by_cone_key[high.key]
            im_l = self._image_by_cone_key[low.key]
            cache[key] = im_l.contains_cone(im_h) and im_l.contains_relint(
                im_h.relint_point()
            )
        return cache[key]

    def cone_contains(self, a: Cone, b: Cone) -> bool:
        """a contains b, via the face lattice when both are normal-fan cones."""
        fa = self.normal_fan.face_of_cone.get(a.key)
        fb = self.normal_fan.face_of_cone.get(b.key)
        if fa is not None and fb is not None:
            return fa <= fb
        return a.contains_cone(b)


def coherent_string(ctx: ProjectionContext, psi) -> FaceCollection:
    psi = vec(psi)
    faces = frozenset(ctx.selected_face(cell, psi) for cell in ctx.complex.cells)
    return FaceCollection(faces, "coherent", tuple(psi))


def coherent_costring(ctx: ProjectionContext, cell: Cell) -> ConeCollection:
    return ctx.coherent_costrings[cell.key]


# ---------------------------------------------------------------------------
# subdivision checks (Prop 2.2 / Prop 3.2 conditions)
# ---------------------------------------------------------------------------


def _polytope_subset(a: Polytope, b: Polytope) -> bool:
    return all(b.contains(v) for v in a.vertices)


def _is_face_of_polytope(part: Polytope, whole: Polytope) -> bool:
    labels = whole.minimal_face_labels(part.vertices)
    face = whole.face_polytope(labels)
    return face.geometry_key == part.geometry_key


def validate_string_subdivision(ctx: ProjectionContext, fc: FaceCollection) -> dict:
    """Prop 2.2-style report: images subdivide Q without repetition, plus the
    fiber-compatibility condition.  Returns {'ok': bool, 'failures': [...]}."""
    failures = []
    members = sorted(fc.faces, key=lambda f: sorted(f))
    if not members:
        return {"ok": False, "failures": ["empty collection"]}
    if any(f not in ctx.lattice for f in members):
        return {"ok": False, "failures": ["member is not a face of P"]}
    images = {f: ctx.image_polytope(f) for f in members}
    # distinct images
    seen = {}
    for f, img in images.items():
        if img.geometry_key in seen:
            failures.append(("repetition", sorted(seen[img.geometry_key]), sorted(f)))
        else:
            seen[img.geometry_key] = f
    # closed under faces of images
    image_keys = {img.geometry_key for img in images.values()}
    for f, img in images.items():
        for face in img.face_lattice().nonempty_faces():
            sub = img.face_polytope(face.labels)
            if sub.geometry_key not in image_keys:
                failures.append(("not-face-closed", sorted(f)))
                break
    # pairwise face-to-face
    for f, g in combinations(members, 2):
        a, b = images[f], images[g]
        ineqs = [(u, v) for u, v, _ in a.facets] + [(u, v) for u, v, _ in b.facets]
        eqs = list(a.equations) + list(b.equations)
        verts = polytope_from_H(a.ambient_dim, ineqs, eqs)
        if not verts:
            continue
        inter = Polytope(verts)
        if not (_is_face_of_polytope(inter, a) and _is_face_of_polytope(inter, b)):
            failures.append(("not-face-to-face", sorted(f), sorted(g)))
    # union covers Q
    Q = ctx.complex.Q
    full = [img for img in images.values() if img.dim == Q.dim]
    distinct = {}
    for img in full:
        distinct.setdefault(img.geometry_key, img)
    if not failures:
        total = sum((img.volume() for img in distinct.values()), Fraction(0))
        if total != Q.volume():
            failures.append(("coverage", str(total), str(Q.volume())))
    # fiber compatibility (condition (2))
    M = ctx.pp.forward
    Mt = transpose(M)
    for f, g in combinations(members, 2):
        for small, big in ((f, g), (g, f)):
            a, b = images[small], images[big]
            if a.geometry_key == b.geometry_key or not _polytope_subset(a, b):
                continue
            big_poly = ctx.P.face_polytope(big)
            ineqs = [(u, v) for u, v, _ in big_poly.facets]
            eqs = list(big_poly.equations)
            for u, v, _ in a.facets:
                ineqs.append((matvec(Mt, u), v))
            for u, v in a.equations:
                eqs.append((matvec(Mt, u), v))
            verts = polytope_from_H(ctx.P.ambient_dim, ineqs, eqs)
            small_poly = ctx.P.face_polytope(small)
            if sorted(set(verts)) != sorted(set(small_poly.vertices)):
                failures.append(("fiber-compat", sorted(small), sorted(big)))
    return {"ok": not failures, "failures": failures}


def is_locally_coherent_string(ctx: ProjectionContext, fc: FaceCollection) -> bool:
    return validate_string_subdivision(ctx, fc)["ok"]


def is_tight_string(ctx: ProjectionContext, fc: FaceCollection) -> bool:
    for f in fc.faces:
        if ctx.image_polytope(f).dim != ctx.face_dim(f):
            return False
    return True


def is_tight_costring(cc: ConeCollection, proj: Matrix) -> bool:
    return all(c.image(proj).dim == c.dim for c in cc.cones)


def is_coherent_string(ctx: ProjectionContext, fc: FaceCollection) -> bool:
    """True iff some single witness psi reproduces the whole collection."""
    cones = []
    for cell in ctx.complex.cells:
        z = cell.relint_point()
        member = None
        for f in fc.faces:
            if ctx.image_polytope(f).contains_relint(z):
                member = f
                break
        if member is None:
            return False
        cones.append(ctx.image_cones[member])
    inter = cones[0]
    for c in cones[1:]:
        inter = inter.intersect(c)
    psi = inter.relint_point()
    return coherent_string(ctx, psi) == fc


# ---------------------------------------------------------------------------
# locally coherent costrings over an arbitrary host fan (Def 5.1)
# ---------------------------------------------------------------------------


def _pullback_cone(image: Cone, proj: Matrix, source_dim: int) -> Cone:
    Mt = transpose(proj)
    ineqs = [matvec(Mt, f) for f in image.facets]
    eqs = [matvec(Mt, e) for e in image.equations]
    return Cone.from_inequalities(source_dim, ineqs, eqs)


def is_locally_coherent_costring(
    cones: Sequence[Cone], host: Fan, proj: Matrix
) -> bool:
    """Def 5.1: images subdivide pi(|host|) without repetition, and the
    preimage condition sigma = pi^{-1}(pi(sigma)) cap sigma' holds."""
    cones = list(cones)
    if not cones:
        return False
    for c in cones:
        if c not in host:
            raise ConeNotInHost(f"cone {c.key} is not in the host fan")
    n = cones[0].ambient_dim
    k = len(proj)
    images = [c.image(proj) for c in cones]
    keys = [im.key for im in images]
    if len(set(keys)) != len(keys):
        return False
    table = {im.key: im for im in images}
    for im in images:
        for f in im.faces():
            if f.key not in table:
                return False
    for a, b in combinations(images, 2):
        inter = a.intersect(b)
        if not (inter.is_face_of(a) and inter.is_face_of(b)):
            return False
    host_images = [c.image(proj) for c in host.maximal_cones()]
    if not cones_union_covers(images, host_images, k):
        return False
    if not cones_union_covers(host_images, images, k):
        return False
    for sigma, im_sigma in zip(cones, images):
        for sigma2, im_sigma2 in zip(cones, images):
            if sigma.key == sigma2.key or not im_sigma2.contains_cone(im_sigma):
                continue
            pre = _pullback_cone(im_sigma, proj, n).intersect(sigma2)
            if pre != sigma:
                return False
    return True


def enumerate_locally_coherent_costrings_subsets(
    host: Fan, proj: Matrix, cap: int | None = None
) -> list[ConeCollection]:
    """Exhaustive subset search; only for small hosts."""
    cones = list(host)
    if cap is not None and 2 ** len(cones) > cap:
        raise CapExceeded(f"2^{len(cones)} subsets exceed cap {cap}")
    out = []
    for size in range(1, len(cones) + 1):
        for subset in combinations(cones, size):
            if is_locally_coherent_costring(subset, host, proj):
                out.append(ConeCollection.of(subset, "locally-coherent"))
    return out


# ---------------------------------------------------------------------------
# structured enumerations over the chamber complex / fiber fan
# ---------------------------------------------------------------------------


def _minimal_cone_at(fan: Fan, point: Vector) -> Cone:
    for c in fan:
        if c.contains_relint(point):
            return c
    raise ValueError("point not located in fan")


def enumerate_locally_coherent_strings(
    ctx: ProjectionContext, cap: int | None = None
) -> list[FaceCollection]:
    """All locally coherent strings, via one fiber-fan cone per chamber.

    A choice of cone sigma_c in Delta(c) for each chamber determines forced
    cones on every lower cell (the minimal cone whose relative interior
    absorbs relint sigma_c); a string exists iff all chambers force
    consistently.  This realizes the construction behind Prop 3.2.
    """
    complex_ = ctx.complex
    chambers = complex_.chambers
    below = {ch.key: [c for c in complex_.cells if complex_.leq(c, ch) and c.key != ch.key]
             for ch in chambers}
    results: dict = {}
    nodes = 0

    def force(chamber: Cell, cone: Cone) -> dict | None:
        forced = {}
        z = cone.relint_point()
        for low in below[chamber.key]:
            fan_low, _ = ctx.cell_fans[low.key]
            forced[low.key] = _minimal_cone_at(fan_low, z)
        return forced

    def rec(i: int, assigned: dict):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise CapExceeded(f"string enumeration exceeded cap {cap}")
        if i == len(chambers):
            faces = frozenset(
                ctx.cell_fans[cell.key][1][assigned[cell.key].key]
                for cell in complex_.cells
            )
            results[faces] = None
            return
        chamber = chambers[i]
        fan_ch, _ = ctx.cell_fans[chamber.key]
        for cone in fan_ch:
            forced = force(chamber, cone)
            ok = True
            for key, val in forced.items():
                if key in assigned and assigned[key].key != val.key:
                    ok = False
                    break
            if not ok:
                continue
            new_assigned = dict(assigned)
            new_assigned[chamber.key] = cone
            new_assigned.update(forced)
            rec(i + 1, new_assigned)

    rec(0, {})
    out = [FaceCollection(faces, "locally-coherent") for faces in results]
    return sorted(out, key=lambda fc: fc.key)


def enumerate_locally_coherent_costrings(
    ctx: ProjectionContext, cap: int | None = None
) -> list[ConeCollection]:
    """All locally coherent costrings of the normal fan, via one coherent
    string member per maximal fiber-fan cone (the dual construction)."""
    sigmas = ctx.gamma_star
    maximal = ctx.fiber_fan.maximal_cones()
    lower = [s for s in sigmas if all(s.key != m.key for m in maximal)]
    below = {
        m.key: [s for s in lower if ctx.gamma_star_leq(s, m)] for m in maximal
    }
    strings = ctx.coherent_strings
    member_image = {
        sk: {f: ctx.image_polytope(f) for f in strings[sk].faces} for sk in strings
    }
    results: dict = {}
    nodes = 0

    def forced_member(sigma_low: Cone, chosen_face: frozenset) -> frozenset | None:
        z = ctx.image_polytope(chosen_face).relint_point()
        for f, img in member_image[sigma_low.key].items():
            if img.contains_relint(z):
                return f
        return None

    def rec(i: int, assigned: dict):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise CapExceeded(f"costring enumeration exceeded cap {cap}")
        if i == len(maximal):
            cones = ConeCollection.of(
                (ctx.normal_fan.cone_of_face[f] for f in assigned.values()),
                "locally-coherent",
            )
            results[cones.key] = cones
            return
        sigma = maximal[i]
        for face in sorted(strings[sigma.key].faces, key=lambda f: sorted(f)):
            forced = {}
            ok = True
            for low in below[sigma.key]:
                m = forced_member(low, face)
                if m is None:
                    ok = False
                    break
                forced[low.key] = m
            if not ok:
                continue
            for key, val in forced.items():
                if key in assigned and assigned[key] != val:
                    ok = False
                    break
            if not ok:
                continue
            new_assigned = dict(assigned)
            new_assigned[sigma.key] = face
            new_assigned.update(forced)
            rec(i + 1, new_assigned)

    rec(0, {})
    return sorted(results.values(), key=lambda cc: cc.key)


# ---------------------------------------------------------------------------
# virtual cells and virtual cones
# ---------------------------------------------------------------------------


def _unique_minimal(faces: Iterable[frozenset]) -> frozenset | None:
    faces = list(faces)
    minimals = [f for f in faces if not any(g < f for g in faces)]
    return minimals[0] if len(minimals) == 1 else None


def is_virtual_cell(ctx: ProjectionContext, fc: FaceCollection) -> bool:
    """Virtual cell: meets every coherent string in exactly one minimal
    element, consists of those minima, and the designated images are
    relint-nested along the fiber-fan order (so the selection extends to a
    locally coherent map on Gamma*)."""
    if not fc.faces:
        return False
    designated = {}
    for sigma in ctx.gamma_star:
        inter = fc.faces & ctx.coherent_strings[sigma.key].faces
        if not inter:
            return False
        m = _unique_minimal(inter)
        if m is None:
            return False
        designated[sigma.key] = m
    if frozenset(designated.values()) != fc.faces:
        return False
    for a in ctx.gamma_star:
        for b in ctx.gamma_star:
            if a.key == b.key or not ctx.gamma_star_leq(a, b):
                continue
            img_b = ctx.image_polytope(designated[b.key])
            img_a = ctx.image_polytope(designated[a.key])
            if not (_polytope_subset(img_b, img_a) and img_a.contains_relint(img_b.relint_point())):
                return False
    return True


def is_virtual_cone(ctx: ProjectionContext, cc: ConeCollection) -> bool:
    """Order-dual of is_virtual_cell, against the coherent costrings."""
    if not cc.cones:
        return False
    mine = {c.key: c for c in cc.cones}
    designated = {}
    for cell in ctx.complex.cells:
        costring = {c.key: c for c in ctx.coherent_costrings[cell.key].cones}
        inter = [mine[k] for k in mine if k in costring]
        if not inter:
            return False
        maximals = [
            c for c in inter
            if not any(o.key != c.key and ctx.cone_contains(o, c) for o in inter)
        ]
        if len(maximals) != 1:
            return False
        designated[cell.key] = maximals[0]
    if {c.key for c in designated.values()} != set(mine):
        return False
    for a in ctx.complex.cells:
        for b in ctx.complex.cells:
            if a.key == b.key or not ctx.gamma_leq(a, b):
                continue
            if not ctx.image_relint_nested(designated[b.key], designated[a.key]):
                return False
    return True


def enumerate_virtual_cells(
    ctx: ProjectionContext, cap: int | None = None
) -> list[FaceCollection]:
    """Independent enumeration: pick one member per coherent string subject to
    the pairwise domination and relint-nesting constraints."""
    sigmas = sorted(ctx.gamma_star, key=lambda s: len(ctx.coherent_strings[s.key].faces))
    strings = {s.key: sorted(ctx.coherent_strings[s.key].faces, key=lambda f: sorted(f))
               for s in sigmas}
    results: dict = {}
    nodes = 0

    def compatible(assigned: dict, sigma: Cone, face: frozenset) -> bool:
        for other in sigmas:
            if other.key not in assigned:
                continue
            m_other = assigned[other.key]
            if face in set(strings[other.key]) and not (assigned[other.key] <= face):
                return False
            if m_other in set(strings[sigma.key]) and not (face <= m_other):
                return False
            for low, high in ((other, sigma), (sigma, other)):
                if ctx.gamma_star_leq(low, high):
                    m_low = face if low is sigma else assigned[low.key]
                    m_high = face if high is sigma else assigned[high.key]
                    img_h = ctx.image_polytope(m_high)
                    img_l = ctx.image_polytope(m_low)
                    if not (_polytope_subset(img_h, img_l)
                            and img_l.contains_relint(img_h.relint_point())):
                        return False
        return True

    def rec(i: int, assigned: dict):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise CapExceeded(f"virtual-cell enumeration exceeded cap {cap}")
        if i == len(sigmas):
            faces = frozenset(assigned.values())
            results[faces] = None
            return
        sigma = sigmas[i]
        for face in strings[sigma.key]:
            if compatible(assigned, sigma, face):
                assigned[sigma.key] = face
                rec(i + 1, assigned)
                del assigned[sigma.key]

    rec(0, {})
    out = [
        fc
        for fc in (FaceCollection(faces, "virtual-cell") for faces in results)
        if is_virtual_cell(ctx, fc)
    ]
    return sorted(out, key=lambda fc: fc.key)


def enumerate_virtual_cones(
    ctx: ProjectionContext, cap: int | None = None
) -> list[ConeCollection]:
    """Independent enumeration of virtual cones against coherent costrings."""
    cells = sorted(ctx.complex.cells, key=lambda c: len(ctx.coherent_costrings[c.key].cones))
    costrings = {c.key: list(ctx.coherent_costrings[c.key].cones) for c in cells}
    costring_keys = {ck: {c.key for c in cones} for ck, cones in costrings.items()}
    results: dict = {}
    nodes = 0

    def compatible(assigned: dict, cell: Cell, cone: Cone) -> bool:
        for other in cells:
            if other.key not in assigned:
                continue
            m_other = assigned[other.key]
            if cone.key in costring_keys[other.key] and not ctx.cone_contains(m_other, cone):
                return False
            if m_other.key in costring_keys[cell.key] and not ctx.cone_contains(cone, m_other):
                return False
            for low, high in ((other, cell), (cell, other)):
                if ctx.gamma_leq(low, high):
                    m_low = cone if low is cell else assigned[low.key]
                    m_high = cone if high is cell else assigned[high.key]
                    if not ctx.image_relint_nested(m_high, m_low):
                        return False
        return True

    def rec(i: int, assigned: dict):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise CapExceeded(f"virtual-cone enumeration exceeded cap {cap}")
        if i == len(cells):
            cc = ConeCollection.of(assigned.values(), "virtual-cone")
            results[cc.key] = cc
            return
        cell = cells[i]
        for cone in costrings[cell.key]:
            if compatible(assigned, cell, cone):
                assigned[cell.key] = cone
                rec(i + 1, assigned)
                del assigned[cell.key]

    rec(0, {})
    out = [cc for cc in results.values() if is_virtual_cone(ctx, cc)]
    return sorted(out, key=lambda cc: cc.key)


# ---------------------------------------------------------------------------
# poset utilities
# ---------------------------------------------------------------------------


def face_collection_leq(a: FaceCollection, b: FaceCollection) -> bool:
    """Union order: every member of a lies in some member of b."""
    return all(any(f <= g for g in b.faces) for f in a.faces)


def cone_collection_leq(a: ConeCollection, b: ConeCollection) -> bool:
    return all(any(t.contains_cone(s) for t in b.cones) for s in a.cones)


def virtual_cell_leq(a: FaceCollection, b: FaceCollection) -> bool:
    """Virtual-cell order: every member of b contains some member of a.

    The plain union order collapses on virtual collections (for example the
    whole polytope belongs to every chamber's virtual cell, making all their
    unions equal), so the order dualizing the string/costring union order is
    the one under which transport reverses posets.
    """
    return all(any(f <= g for f in a.faces) for g in b.faces)


def virtual_cone_leq(a: ConeCollection, b: ConeCollection) -> bool:
    return all(any(t.contains_cone(s) for s in a.cones) for t in b.cones)


def minimal_elements(elements: Sequence, leq: Callable) -> list:
    return [
        x for x in elements
        if not any(y is not x and leq(y, x) and not leq(x, y) for y in elements)
    ]


def check_anti_isomorphism(
    elems_a: Sequence,
    leq_a: Callable,
    elems_b: Sequence,
    leq_b: Callable,
    mapping: Callable,
    name: str = "map",
) -> PosetReport:
    """Verify mapping: A -> B is an order-reversing bijection."""
    images = [mapping(x) for x in elems_a]
    counterexamples = []
    keyed = {}
    for x, y in zip(elems_a, images):
        k = getattr(y, "key", y)
        if k in keyed:
            counterexamples.append(("not-injective", keyed[k], x))
        keyed[k] = x
    b_keys = {getattr(y, "key", y) for y in elems_b}
    img_keys = {getattr(y, "key", y) for y in images}
    if img_keys != b_keys:
        counterexamples.append(("not-onto", len(img_keys), len(b_keys)))
    bijective = not counterexamples
    relations = 0
    order_reversing = True
    for i, x in enumerate(elems_a):
        for j, y in enumerate(elems_a):
            if i == j:
                continue
            fwd = leq_a(x, y)
            if fwd:
                relations += 1
            rev = leq_b(mapping(y), mapping(x))
            if fwd != rev:
                order_reversing = False
                counterexamples.append(("order", i, j, fwd, rev))
    return PosetReport(
        element_count=len(elems_a),
        relation_count=relations,
        map_checked=name,
        order_reversing=order_reversing,
        bijective=bijective,
        counterexamples=counterexamples,
    )

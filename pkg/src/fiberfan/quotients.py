"""Toric quotient fans, Cox's construction, and fan projectivity.

The quotient report classifies a candidate costring exactly as the quotient
theorem does: categorical needs a locally coherent costring with strongly
convex images, geometric additionally needs tightness, and any image with
lineality flags a degenerate quotient with best-effort reduction data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .cones import Cone, Fan
from .errors import NonPrimitiveRay, NotASubset, NotComplete
from .lattice import SublatticeData, cokernel_invariants
from .linalg import (
    Matrix,
    Vector,
    ZERO,
    dot,
    is_integral,
    mat,
    nullspace,
    primitive,
    rank,
    vec,
)
from .lp import OPTIMAL, solve_lp
from .strings import is_locally_coherent_costring, is_tight_costring, ConeCollection


@dataclass
class LatticeFan:
    """Fan of strongly convex cones with primitive integer rays."""

    rank: int
    fan: Fan
    given_rays: tuple = ()

    @staticmethod
    def from_cones(rank: int, cones: Iterable[Cone], close: bool = True,
                   validate: bool = True, given_rays: Sequence = ()) -> "LatticeFan":
        fan = Fan.from_cones(cones, close=close, validate=validate)
        for c in fan:
            if c.lineality:
                raise ValueError("lattice fan cones must be strongly convex")
            for r in c.rays:
                if not is_integral(r):
                    raise NonPrimitiveRay(f"ray {r} is not a lattice vector")
        return LatticeFan(rank, fan, tuple(vec(r) for r in given_rays))

    @staticmethod
    def from_rays_and_cones(rank: int, rays: Sequence, cones: Sequence[Sequence[int]],
                            validate: bool = True) -> "LatticeFan":
        rays = [vec(r) for r in rays]
        for r in rays:
            if not is_integral(r) or primitive(r) != r:
                raise NonPrimitiveRay(f"ray {tuple(map(str, r))} is not primitive integral")
        built = [Cone.from_generators(rank, [rays[i] for i in idx]) for idx in cones]
        if not any(len(idx) == 0 for idx in cones):
            built.append(Cone.zero(rank))
        return LatticeFan.from_cones(rank, built, close=True, validate=validate,
                                     given_rays=rays)

    def rays(self) -> list[Vector]:
        out = {}
        for c in self.fan:
            for r in c.rays:
                out[r] = True
        return sorted(out)

    def is_complete(self) -> bool:
        return self.fan.is_complete()


@dataclass
class QuotientReport:
    valid_costring: bool
    strongly_convex: bool
    categorical: bool
    geometric: bool
    degenerate: bool
    quotient_fan: LatticeFan | None
    reduction: dict | None = None

    def flags(self) -> dict:
        return {
            "valid_costring": self.valid_costring,
            "strongly_convex": self.strongly_convex,
            "categorical": self.categorical,
            "geometric": self.geometric,
            "degenerate": self.degenerate,
        }


def _subspace_intersection(bases: Sequence[Sequence[Vector]], n: int) -> tuple[Vector, ...]:
    """Intersection of spans, via the union of their orthogonal complements."""
    ortho: list[Vector] = []
    for basis in bases:
        ortho.extend(nullspace(list(basis), ncols=n) if basis else
                     [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)])
    return nullspace(ortho, ncols=n) if ortho else tuple(
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    )


def quotient_fan(host: LatticeFan, delta: Sequence[Cone], sub: SublatticeData) -> QuotientReport:
    """Theorem-B style report for the candidate costring delta inside host."""
    for c in delta:
        if c not in host.fan:
            raise NotASubset(f"cone {c.key} is not in the host fan")
    proj = sub.projection
    valid = is_locally_coherent_costring(delta, host.fan, proj)
    images = [c.image(proj) for c in delta]
    strongly_convex = all(im.is_strongly_convex() for im in images)
    tight = is_tight_costring(ConeCollection.of(delta), proj)
    categorical = valid and strongly_convex
    geometric = categorical and tight
    degenerate = not strongly_convex
    qfan = None
    if valid and strongly_convex:
        qfan = LatticeFan.from_cones(sub.corank, images, close=False, validate=False)
    reduction = None
    if degenerate:
        offending = [im for im in images if not im.is_strongly_convex()]
        common = _subspace_intersection([im.lineality for im in offending], sub.corank)
        red_sub = SublatticeData.from_kernel_basis([primitive(v) for v in common], sub.corank)
        red_images = {}
        for im in images:
            red = im.image(red_sub.projection) if red_sub.corank else Cone.zero(0)
            red_images[red.key] = red
        red_fan = Fan.from_cones(red_images.values()) if red_images else None
        reduction = {
            "lineality_basis": common,
            "fan": LatticeFan(red_sub.corank, red_fan) if red_fan else None,
        }
    return QuotientReport(valid, strongly_convex, categorical, geometric,
                          degenerate, qfan, reduction)


def coordinate_fan(m: int) -> LatticeFan:
    """Fan of all coordinate cones of nonnegative orthant type in rank m."""
    cones = []
    for size in range(m + 1):
        for subset in combinations(range(m), size):
            gens = [tuple(Fraction(int(i == j)) for j in range(m)) for i in subset]
            cones.append(Cone.from_generators(m, gens))
    return LatticeFan.from_cones(m, cones, close=False, validate=False)


@dataclass
class CoxData:
    ambient: SublatticeData
    costring: ConeCollection
    group: tuple
    geometric: bool
    report: QuotientReport
    ray_order: tuple


def cox_construction(delta: LatticeFan) -> CoxData:
    """Coordinate-cone costring realizing the fan as a toric quotient."""
    rays = list(delta.given_rays) if delta.given_rays else delta.rays()
    if not rays:
        raise NonPrimitiveRay("fan has no rays")
    for r in rays:
        if not is_integral(r) or primitive(r) != r:
            raise NonPrimitiveRay(f"ray {tuple(map(str, r))} is not primitive integral")
    rays = sorted(set(rays))
    m = len(rays)
    index = {r: i for i, r in enumerate(rays)}
    cones = []
    for sigma in delta.fan:
        idx = [index[r] for r in sigma.rays]
        gens = [tuple(Fraction(int(i == j)) for j in range(m)) for i in idx]
        cones.append(Cone.from_generators(m, gens))
    costring = ConeCollection.of(cones, "cox")
    proj = mat([[r[j] for r in rays] for j in range(delta.rank)])
    sub = SublatticeData.from_projection(proj)
    host = coordinate_fan(m)
    report = quotient_fan(host, list(costring.cones), sub)
    ray_matrix = [list(r) for r in rays]
    group = cokernel_invariants(ray_matrix)
    simplicial = all(len(c.rays) == c.dim for c in delta.fan)
    return CoxData(sub, costring, group, simplicial, report, tuple(rays))


def fan_walls(latticefan: LatticeFan) -> list[tuple[Cone, Cone, Cone]]:
    """(sigma, tau, shared facet) triples, one per ordered wall pair."""
    maxes = latticefan.fan.maximal_cones()
    n = latticefan.rank
    out = []
    for sigma in maxes:
        for f in sigma.facets:
            wall = Cone.from_inequalities(n, sigma.facets, sigma.equations + (f,))
            for tau in maxes:
                if tau.key != sigma.key and tau.contains_cone(wall):
                    out.append((sigma, tau, wall))
    return out


def is_projective_fan(latticefan: LatticeFan) -> tuple[bool, dict | None]:
    """Exact LP for a strictly convex piecewise-linear support function.

    One linear functional per maximal cone, agreeing on walls, with strict
    convexity across each wall enforced by a maximized slack.
    """
    if not latticefan.is_complete():
        raise NotComplete("projectivity test needs a complete fan")
    n = latticefan.rank
    maxes = latticefan.fan.maximal_cones()
    index = {c.key: i for i, c in enumerate(maxes)}
    nvar = n * (len(maxes) - 1) + 1  # functionals (base cone pinned to 0) + slack
    eps = nvar - 1

    def var(cone_key: int, j: int) -> int | None:
        i = index[cone_key]
        return None if i == 0 else (i - 1) * n + j

    def functional_row(cone_key, coeffs, vector, sign):
        for j, x in enumerate(vector):
            v = var(cone_key, j)
            if v is not None:
                coeffs[v] += sign * x

    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for sigma, tau, wall in fan_walls(latticefan):
        if index[sigma.key] > index[tau.key]:
            continue
        gens = list(wall.rays) + list(wall.lineality)
        for g in gens:
            row = [ZERO] * nvar
            functional_row(sigma.key, row, g, 1)
            functional_row(tau.key, row, g, -1)
            A_eq.append(row)
            b_eq.append(ZERO)
    for sigma, tau, wall in fan_walls(latticefan):
        sigma_rays = set(sigma.rays)
        for r in tau.rays:
            if r in sigma_rays:
                continue
            # <m_tau, r> >= <m_sigma, r> + eps
            row = [ZERO] * nvar
            functional_row(sigma.key, row, r, 1)
            functional_row(tau.key, row, r, -1)
            row[eps] += Fraction(1)
            A_ub.append(row)
            b_ub.append(ZERO)
    cap = [ZERO] * nvar
    cap[eps] = Fraction(1)
    A_ub.append(cap)
    b_ub.append(Fraction(1))
    c = [ZERO] * nvar
    c[eps] = Fraction(1)
    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    if res.status != OPTIMAL or res.value <= 0:
        return False, None
    cert = {}
    for cone in maxes:
        i = index[cone.key]
        if i == 0:
            cert[cone.key] = tuple(ZERO for _ in range(n))
        else:
            cert[cone.key] = tuple(res.x[(i - 1) * n + j] for j in range(n))
    return True, {"functionals": cert, "slack": res.value}

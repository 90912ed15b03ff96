"""Exception types shared across the library."""


class FiberFanError(Exception):
    """Base class for all library errors."""


class NotSurjective(FiberFanError):
    """Projection matrix is row-rank deficient."""


class DegenerateInput(FiberFanError):
    """Vertex list is not in convex position."""


class NotAFace(FiberFanError):
    """Label set does not name a face of the polytope."""


class DimMismatch(FiberFanError):
    """Operands live in incompatible ambient spaces."""


class PointOutsideQ(FiberFanError):
    """Query point lies outside the projected polytope."""


class SupportMismatch(FiberFanError):
    """Refinement parts do not share the same total support."""


class CellNotInComplex(FiberFanError):
    """Cell does not belong to the chamber complex."""


class CapExceeded(FiberFanError):
    """Enumeration exceeded its node cap; partial results are never returned."""


class ConeNotInHost(FiberFanError):
    """Cone collection contains a cone outside the host fan."""


class NotASubset(FiberFanError):
    """Candidate costring is not a subset of the host fan."""


class NonPrimitiveRay(FiberFanError):
    """Fan ray is not a primitive lattice vector."""


class NotComplete(FiberFanError):
    """Operation requires a complete fan."""


class ArrangementMismatch(FiberFanError):
    """Sign vectors do not match the supplied hyperplane arrangement."""


class InvalidTriangulation(FiberFanError):
    """Simplices do not triangulate the configuration."""


class TooFewPoints(FiberFanError):
    """Point configuration is too small for the requested construction."""


class NotFullDimensional(FiberFanError):
    """Configuration does not span its ambient space."""


class ParseError(FiberFanError):
    """Input file could not be parsed."""


class SchemaError(FiberFanError):
    """Input file does not match any supported schema."""

"""Exception hierarchy shared across the toolkit."""


class MeshmendError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MeshmendError):
    """A mesh or group file could not be parsed; carries file position info."""


class DegenerateTriangle(MeshmendError):
    """Three points that should span a triangle are (nearly) collinear."""


class DegenerateFace(MeshmendError):
    """A face triple with repeated vertex ids, or a duplicated face."""


class NotClosed(MeshmendError):
    """The complex has edges incident to fewer than two faces."""

    def __init__(self, edges):
        self.edges = list(edges)
        super().__init__(f"complex is not closed at {len(self.edges)} edge(s): "
                         f"{self.edges[:8]}{'...' if len(self.edges) > 8 else ''}")


class NotASurface(MeshmendError):
    """Operation requires a simplicial surface but the complex is not one."""


class NonOrientable(MeshmendError):
    """Orientation propagation reached a contradiction."""


class PreconditionViolated(MeshmendError):
    """An operation was called before its required repair stage."""


class NotOrthogonal(MeshmendError):
    """A supplied symmetry matrix is not orthogonal."""


class NotInvariant(MeshmendError):
    """A supplied symmetry matrix does not map the embedded vertex set to itself."""


class NotAGroup(MeshmendError):
    """The supplied matrices do not form a group under composition."""


class MissingRep(MeshmendError):
    """A face orbit representative lacks a retriangulation to transfer."""


class NegativeDeficit(MeshmendError):
    """Edge-count bookkeeping went negative; input is not a subdivided disc."""


class Exhausted(MeshmendError):
    """Candidate edges ran out before the triangulation criterion held."""


class NonTriangularCell(MeshmendError):
    """A cell with more than three sides survived triangulation."""


class StillIntersecting(MeshmendError):
    """Strict post-rebuild check found remaining self-intersections."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        super().__init__(f"{len(self.pairs)} face pair(s) still intersect; "
                         "consider loosening eps-point")


class OpenBoundary(MeshmendError):
    """A chamber walk fell off an edge with no continuation."""


class IsolatedNonManifoldEdge(MeshmendError):
    """A non-manifold edge touching no other non-manifold edge (unsupported)."""

    def __init__(self, edges):
        self.edges = list(edges)
        super().__init__(f"isolated non-manifold edge(s) {self.edges}: input is "
                         "outside the supported class")


class NewIntersectionIntroduced(MeshmendError):
    """A repair shift created a crossing; retry with a smaller shift."""

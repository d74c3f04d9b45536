"""Custom exception classes for the application."""


class RabuildException(Exception):
    """Base exception for all application-specific exceptions."""

    def __init__(self, message: str, details: dict | None = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationException(RabuildException):
    """Exception raised for configuration and input-file errors."""
    pass


# Finite groups

class GroupException(RabuildException):
    """Base exception for finite group arithmetic."""
    pass


class NotLatinSquare(GroupException):
    """Multiplication table rows or columns are not permutations."""
    pass


class NonAssociative(GroupException):
    """Multiplication table fails associativity on some triple."""
    pass


class NoIdentity(GroupException):
    """Multiplication table has no two-sided identity."""
    pass


class NotASubgroup(GroupException):
    """A subset expected to be a subgroup is not closed."""
    pass


class RelationViolated(GroupException):
    """A defining relation does not map to the identity."""
    pass


# Complexes

class ComplexException(RabuildException):
    """Base exception for simplicial and cube complexes."""
    pass


class NotSimple(ComplexException):
    """Two cubes at a vertex induce the same link simplex."""
    pass


class VertexOnBoundary(ComplexException):
    """Vertex is not interior to the finite ball."""
    pass


class IsomorphismFailure(ComplexException):
    """A constructed cube-complex map is not an isomorphism."""
    pass


# Graph products and buildings

class GraphProductException(RabuildException):
    """Base exception for graph product arithmetic."""
    pass


class UnknownVertex(GraphProductException):
    """Syllable refers to a vertex outside the graph."""
    pass


class ElementOutOfRange(GraphProductException):
    """Syllable element index is not in the vertex group."""
    pass


class BallTooLarge(GraphProductException):
    """Enumeration exceeded the configured cap."""
    pass


class BuildingException(RabuildException):
    """Base exception for building computations."""
    pass


class ResidueInfinite(BuildingException):
    """Residue has infinitely many chambers and no cap was given."""
    pass


class WrongResidueType(BuildingException):
    """Residue type does not match the requested operation."""
    pass


class NotClosed(BuildingException):
    """Gallery does not start and end at the base chamber."""
    pass


class InvalidGallery(BuildingException):
    """Consecutive chambers of a gallery are not adjacent."""
    pass


# Holonomy and atlases

class HolonomyException(RabuildException):
    """Base exception for holonomy and atlas computations."""
    pass


class NontrivialHolonomy(HolonomyException):
    """Subgroup has holonomy at some residue."""
    pass


class ConsistencyFailure(HolonomyException):
    """Germ transport depends on the chosen gallery."""
    pass


class WitnessMismatch(HolonomyException):
    """Conjugated generator is not a single translation on the ball."""
    pass


# Polygonal complexes and cocycles

class PolygonalException(RabuildException):
    """Base exception for polygonal complexes."""
    pass


class InvalidComplex(PolygonalException):
    """Polygonal complex incidence data is inconsistent."""
    pass


class TrianglePresent(PolygonalException):
    """Parallelism is undefined because a polygon has three sides."""
    pass


class InvalidAction(PolygonalException):
    """Deck action does not respect incidence."""
    pass


class CocycleException(RabuildException):
    """Base exception for cochain computations."""
    pass


class WallNotTree(CocycleException):
    """Geometric wall is not a tree crossing polygons once."""
    pass


class SelfIntersecting(CocycleException):
    """Walls of one orbit meet each other."""
    pass


class InconsistentWallField(CocycleException):
    """Wall propagation does not close up around a cycle."""
    pass


# Coxeter groups and local reflections

class CoxeterException(RabuildException):
    """Base exception for Coxeter group computations."""
    pass


class WordTooLong(CoxeterException):
    """Word exceeds the braid saturation cap."""
    pass


class NotTwoDimensional(CoxeterException):
    """Coxeter system has a finite spherical triple."""
    pass


class NotAReflection(CoxeterException):
    """Element is not conjugate to a generator."""
    pass


class ReflectionException(RabuildException):
    """Base exception for systems of local reflections."""
    pass


class PolygonOnBoundary(ReflectionException):
    """Polygon is not complete inside the block complex."""
    pass


class NotSymmetric(ReflectionException):
    """Rank-1 field is not symmetric with respect to the system."""
    pass


class NotDecomposable(ReflectionException):
    """Holonomy is outside the product of the facet fixers."""
    pass


class EWallNotTree(ReflectionException):
    """Geometric e-wall is not a tree crossing polygons once."""
    pass


class NotClean(ReflectionException):
    """E-walls of one orbit meet each other."""
    pass


class HolonomyPresent(ReflectionException):
    """System of local reflections has holonomy."""
    pass

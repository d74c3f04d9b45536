"""Schemas for JSON job files."""
from enum import Enum
from typing import Any, Optional, Union
from pydantic import BaseModel, Field, field_validator


class JobKind(str, Enum):
    BUILD = "build"
    CHECK = "check"
    WALLS = "walls"
    HOLONOMY = "holonomy"
    WITNESS = "witness"
    KILL_COCYCLE = "kill-cocycle"
    KILL_HOLONOMY = "kill-holonomy"
    DAVIS = "davis"
    DOT = "dot"


class PresentationConfig(BaseModel):
    """Graph product presentation: a graph with a finite group per vertex."""
    vertices: list[str] = Field(..., min_length=1)
    edges: list[list[str]] = Field(default_factory=list)
    groups: dict[str, dict[str, Any]] = Field(default_factory=dict, description="vertex -> group config")
    default_group: Optional[dict[str, Any]] = None

    class Config:
        json_schema_extra = {
            "example": {
                "vertices": ["a", "b", "c", "d", "e", "f"],
                "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "e"], ["e", "f"], ["f", "a"]],
                "default_group": {"kind": "cyclic", "n": 2}
            }
        }


class QuotientMapConfig(BaseModel):
    """Homomorphism onto a finite group, by generator images."""
    group: dict[str, Any]
    images: dict[str, Union[int, list[int]]] = Field(..., description="generator key -> element index or coordinates")


class SubgroupConfig(BaseModel):
    """
    Finite-index subgroup as the preimage of a subgroup of a finite quotient.

    Without a quotient, the kernel of the map onto the product of the vertex
    groups is used.
    """
    quotient: Optional[QuotientMapConfig] = None
    subgroup: Optional[list[int]] = Field(None, description="Elements of the quotient; trivial subgroup when omitted")
    separators: list[QuotientMapConfig] = Field(default_factory=list)


class EdgeConfig(BaseModel):
    id: str
    tail: str = Field(..., alias="from")
    head: str = Field(..., alias="to")

    class Config:
        populate_by_name = True


class PolygonConfig(BaseModel):
    id: Optional[str] = None
    cycle: list[tuple[str, int]] = Field(..., min_length=3, description="Oriented edges [edge, +1|-1]")


class PolygonalComplexConfig(BaseModel):
    name: str = ""
    vertices: list[str]
    edges: list[EdgeConfig]
    polygons: list[PolygonConfig]


class CocycleConfig(BaseModel):
    """2-cocycle over Z/n_1 + ... + Z/n_k, by polygon id."""
    coefficients: list[int] = Field(..., min_length=1)
    values: dict[str, Union[int, list[int]]] = Field(default_factory=dict)

    @field_validator('coefficients')
    @classmethod
    def coefficients_must_be_positive(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("Coefficient orders must be positive")
        return v


class CoverConfig(BaseModel):
    """Voltage assignment edge -> element of a finite group."""
    group: dict[str, Any]
    voltages: dict[str, int] = Field(default_factory=dict)


class CoxeterConfig(BaseModel):
    vertices: list[str] = Field(..., min_length=1)
    edges: list[list[str]] = Field(default_factory=list)
    weights: dict[str, int] = Field(default_factory=dict, description='"[i,j]" -> m_ij')
    default_weight: Optional[int] = Field(None, ge=2)


class SystemEntryConfig(BaseModel):
    block: Union[int, list[int]]
    type: int = Field(..., ge=0)
    map: list[int]


class SystemConfig(BaseModel):
    """System of local reflections on a quotient block complex."""
    name: str = ""
    values: list[SystemEntryConfig] = Field(default_factory=list)
    random_field: bool = Field(False, description="Start from the standard system modified by a random symmetric field")
    field_types: Optional[list[int]] = None


class DotObject(str, Enum):
    LINK = "link"
    CHAMBERS = "chambers"
    WALL = "wall"
    BLOCKS = "blocks"


class DotConfig(BaseModel):
    object: DotObject
    vertex: Optional[str] = Field(None, description="Vertex whose link is exported")
    wall: int = Field(0, ge=0, description="Index of the wall in the sorted wall list")
    even: bool = False


class JobFile(BaseModel):
    """Sections of a job file; each job reads the ones it needs."""
    presentation: Optional[PresentationConfig] = None
    subgroup: Optional[SubgroupConfig] = None
    complex: Optional[PolygonalComplexConfig] = None
    condition: str = "C2"
    cocycle: Optional[CocycleConfig] = None
    cover: Optional[CoverConfig] = None
    coxeter: Optional[CoxeterConfig] = None
    quotient: Optional[QuotientMapConfig] = None
    system: Optional[SystemConfig] = None
    dot: Optional[DotConfig] = None


class JobConfig(BaseModel):
    """A CLI invocation: job kind, parsed job file and overrides."""
    job: JobKind
    config_path: str
    file: JobFile
    radius: int = Field(..., ge=0)
    cap: Optional[int] = Field(None, ge=1)
    seed: int = 0
    strict: bool = False
    emit: Optional[str] = None
    out: Optional[str] = None

    class Config:
        use_enum_values = True

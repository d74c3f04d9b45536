"""
Finite group value objects.

Groups are explicit multiplication tables over the indices 0..order-1.
Coefficient groups for cochains are direct sums of cyclic groups.
"""
from enum import Enum
from functools import reduce
from typing import Any, Iterable, Optional
from pydantic import BaseModel, Field, field_validator


class FiniteGroup(BaseModel):
    """
    Finite group given by its multiplication table.

    Construct through GroupService.validate_group (checked) or the
    factories (trusted constructions such as direct products).
    """
    table: tuple[tuple[int, ...], ...] = Field(..., description="table[a][b] = index of a*b")
    identity: int = Field(..., ge=0)
    inverses: tuple[int, ...] = Field(..., description="inverses[a] = index of a^-1")
    labels: Optional[tuple[str, ...]] = Field(None, description="Optional element names")
    name: str = ""

    class Config:
        frozen = True

    @property
    def order(self) -> int:
        return len(self.table)

    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def product(self, elements: Iterable[int]) -> int:
        """Multiply a sequence of elements left to right."""
        return reduce(self.mul, elements, self.identity)

    def conjugate(self, a: int, g: int) -> int:
        """Return g^-1 a g."""
        return self.mul(self.mul(self.inv(g), a), g)

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    def label(self, a: int) -> str:
        if self.labels:
            return self.labels[a]
        return str(a)

    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in self.elements() for b in range(a + 1, self.order)
        )

    def __str__(self) -> str:
        return self.name or f"FiniteGroup(order={self.order})"


class FiniteAbelian(BaseModel):
    """
    Direct sum Z/n_1 + ... + Z/n_k with componentwise arithmetic.

    Elements are integer tuples reduced modulo the torsion coefficients.
    """
    torsion: tuple[int, ...] = Field(..., min_length=1, description="Cyclic orders n_1..n_k")

    class Config:
        frozen = True

    @field_validator('torsion')
    @classmethod
    def torsion_must_be_positive(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("Torsion coefficients must be positive")
        return v

    @property
    def order(self) -> int:
        return reduce(lambda x, y: x * y, self.torsion, 1)

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.torsion)

    def element(self, value: Iterable[int] | int) -> tuple[int, ...]:
        """Reduce an integer or integer sequence to a canonical element."""
        if isinstance(value, int):
            value = [value]
        value = list(value)
        if len(value) != len(self.torsion):
            raise ValueError(f"Expected {len(self.torsion)} components, got {len(value)}")
        return tuple(x % n for x, n in zip(value, self.torsion))

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.torsion))

    def neg(self, a: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.torsion))

    def sub(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return self.add(a, self.neg(b))

    def scale(self, k: int, a: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((k * x) % n for x, n in zip(a, self.torsion))

    def is_zero(self, a: tuple[int, ...]) -> bool:
        return all(x == 0 for x in a)

    def elements(self) -> list[tuple[int, ...]]:
        result: list[tuple[int, ...]] = [()]
        for n in self.torsion:
            result = [prefix + (x,) for prefix in result for x in range(n)]
        return result

    def __str__(self) -> str:
        return " + ".join(f"Z/{n}" for n in self.torsion)


class SourceKind(str, Enum):
    """Kind of group a homomorphism is defined on."""
    FINITE = "finite"
    GRAPH_PRODUCT = "graph_product"
    COXETER = "coxeter"


class Relator(BaseModel):
    """Named defining relation: a word of generator keys equal to 1."""
    name: str
    word: tuple[Any, ...]

    class Config:
        frozen = True


class GroupHom(BaseModel):
    """
    Homomorphism from a presented group into a finite group.

    The generator set is closed under inverses, so every relator is a plain
    word of generator keys.
    """
    source_kind: SourceKind
    source_name: str = ""
    generators: tuple[Any, ...] = Field(..., description="Generator keys of the source")
    relators: tuple[Relator, ...] = Field(default=(), description="Defining relations")
    target: FiniteGroup
    images: dict[Any, int] = Field(..., description="generator key -> target index")

    class Config:
        frozen = True
        use_enum_values = True

    def image(self, key: Any) -> int:
        return self.images[key]

    def evaluate(self, word: Iterable[Any]) -> int:
        """Image of a word of generator keys."""
        return self.target.product(self.images[key] for key in word)

    def first_violation(self) -> Optional[Relator]:
        """Return the first defining relation not mapped to the identity."""
        for relator in self.relators:
            if self.evaluate(relator.word) != self.target.identity:
                return relator
        return None


class SubgroupData(BaseModel):
    """Finite-index subgroup given as the preimage of a subgroup of a finite quotient."""
    hom: GroupHom
    image_subgroup: frozenset[int] = Field(..., description="Subgroup S of the target")

    class Config:
        frozen = True

    @property
    def quotient(self) -> FiniteGroup:
        return self.hom.target

    def contains_image(self, q: int) -> bool:
        return q in self.image_subgroup

    def contains_word(self, word: Iterable[Any]) -> bool:
        return self.hom.evaluate(word) in self.image_subgroup

"""Product-block systems over GF(q): data model, verifier, statistics and
validity-preserving symmetry transforms.

A block system is a sequence of q subsets of GF(q), the block at position s
belonging to the label with code s.  It is a valid product-block system when

    (b - a) * (s - r) != 1   in GF(q)

for every a in B_r and b in B_s.  Same-label pairs are always fine (the label
difference is 0), so only cross-block pairs can violate the condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .gf import Field, build_field

# A violating quadruple, canonicalized with r < s by element code.
Quad = tuple[int, int, int, int]


@dataclass(frozen=True)
class BlockSystem:
    """q blocks of field elements, indexed by field elements.

    This constructor trusts its arguments (hot paths build millions of
    systems); use :meth:`from_blocks` for validated construction.
    """

    field: Field
    blocks: tuple[frozenset[int], ...]

    @classmethod
    def from_blocks(cls, q_or_field: int | Field, blocks: Iterable[Iterable[int]]) -> "BlockSystem":
        field = q_or_field if isinstance(q_or_field, Field) else build_field(q_or_field)
        coerced = tuple(frozenset(b) for b in blocks)
        if len(coerced) != field.q:
            raise ValueError(f"expected {field.q} blocks, got {len(coerced)}")
        for s, blk in enumerate(coerced):
            for x in blk:
                if not isinstance(x, int) or not 0 <= x < field.q:
                    raise ValueError(f"block {s} holds {x!r}, not a valid element of GF({field.q})")
        return cls(field, coerced)

    @property
    def q(self) -> int:
        return self.field.q

    # -- symmetry transforms -------------------------------------------------
    # Each one maps valid systems to valid systems: element translation and
    # label translation leave both differences in (b-a)(s-r) unchanged, while
    # scaling moves a factor between them and negation flips both signs.

    def translate_elements(self, c: int) -> "BlockSystem":
        """Add c to every block member."""
        shift = self.field.shift(c)
        return BlockSystem(self.field, tuple(frozenset(shift[x] for x in blk) for blk in self.blocks))

    def translate_labels(self, c: int) -> "BlockSystem":
        """Relabel so that the new block at s is the old block at s - c."""
        f = self.field
        return BlockSystem(f, tuple(self.blocks[f.sub(s, c)] for s in f.elements()))

    def scale(self, lam: int) -> "BlockSystem":
        """Multiply members by lam while dividing labels by lam."""
        f = self.field
        f.check(lam)
        if lam == 0:
            raise ValueError("scale factor must be nonzero")
        return BlockSystem(
            f,
            tuple(frozenset(f.mul(lam, x) for x in self.blocks[f.mul(lam, s)]) for s in f.elements()),
        )

    def negate(self) -> "BlockSystem":
        """Negate members and labels simultaneously."""
        f = self.field
        return BlockSystem(
            f,
            tuple(frozenset(f.neg(x) for x in self.blocks[f.neg(s)]) for s in f.elements()),
        )


@dataclass(frozen=True)
class ConflictReport:
    """All violating quadruples (r, a, s, b), each unordered violation once."""

    conflicts: tuple[Quad, ...]

    @property
    def count(self) -> int:
        return len(self.conflicts)

    @property
    def ok(self) -> bool:
        return not self.conflicts


@dataclass(frozen=True)
class SystemStats:
    k_min: int
    k_max: int
    uniform_k: int | None  # present iff k_min == k_max
    t: int  # exact number of distinct symbols used
    v: int  # total size, sum of block sizes


def check_pair(field: Field, r: int, a: int, s: int, b: int) -> bool:
    """True iff the pair a in B_r, b in B_s is allowed: (b-a)(s-r) != 1."""
    return field.mul(field.sub(b, a), field.sub(s, r)) != 1


def verify(system: BlockSystem) -> ConflictReport:
    """Exhaustively scan all cross-block element pairs.

    For labels r != s the only forbidden member difference is b - a =
    (s - r)^-1, so each pair of blocks costs one shift-table walk.  The report
    is sorted, with r < s in every quadruple, making it deterministic and
    diff-able regardless of scan order.
    """
    f = system.field
    inv = f.inv
    sub = f.sub
    shift = f.shift
    occupied = [(s, blk) for s, blk in enumerate(system.blocks) if blk]
    out = []
    for i, (r, br) in enumerate(occupied):
        for s, bs in occupied[i + 1:]:
            table = shift(inv(sub(s, r)))
            for a in br:
                b = table[a]
                if b in bs:
                    out.append((r, a, s, b))
    out.sort()
    return ConflictReport(tuple(out))


def stats(system: BlockSystem) -> SystemStats:
    """Block-size extremes, exact symbol count t and total size v."""
    sizes = [len(blk) for blk in system.blocks]
    k_min, k_max = min(sizes), max(sizes)
    used = set().union(*system.blocks) if system.blocks else set()
    return SystemStats(
        k_min=k_min,
        k_max=k_max,
        uniform_k=k_min if k_min == k_max else None,
        t=len(used),
        v=sum(sizes),
    )

"""Permutation-array size bound derived from product blocks.

For a prime q with q = 1 (mod 3), a valid system of total size v yields
M(q, q-3) >= (q-1)(v+q): a lower bound on the largest set of permutations of
q symbols with pairwise Hamming distance at least q-3.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import BlockSystem, stats, verify
from .gf import is_prime


@dataclass(frozen=True)
class BoundResult:
    q: int
    v: int
    d: int  # Hamming distance the bound applies to, q - 3
    lower_bound: int


def pa_lower_bound(q: int, v: int) -> BoundResult:
    """(q-1)(v+q), defined only for prime q with q = 1 (mod 3).

    Exact integer arithmetic; the rejection set (q not prime or q != 1 mod 3)
    matches the dash rows of the bundled bound table.
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime; the bound is undefined")
    if q % 3 != 1:
        raise ValueError(f"q={q} has q mod 3 = {q % 3}, need q = 1 (mod 3)")
    if v < 0:
        raise ValueError(f"total size v must be >= 0, got {v}")
    return BoundResult(q=q, v=v, d=q - 3, lower_bound=(q - 1) * (v + q))


def bound_from_system(system: BlockSystem) -> BoundResult:
    """Bound computed from a verified system's total size."""
    field = system.field
    if field.m != 1:
        raise ValueError(f"the bound needs a prime field, got GF({field.p}^{field.m})")
    report = verify(system)
    if report.conflicts:
        raise ValueError(f"system is not valid product blocks: {report.count} conflicts")
    return pa_lower_bound(field.q, stats(system).v)

"""Readers and writers for block systems: the compact letter notation used by
the bundled witness tables, integer block lists, canonical JSON, and CSV rows
for bound tables.  The fixture corpus loader lives here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .blocks import BlockSystem
from .gf import build_field


@dataclass(frozen=True)
class LetterAlphabet:
    """Letters naming fixed 2-element blocks, e.g. A = {0,1}."""

    name: str
    letters: Mapping[str, frozenset[int]]

    def __post_init__(self):
        seen = set()
        for letter, members in self.letters.items():
            if len(members) != 2:
                raise ValueError(f"letter {letter} must name a 2-element block, got {sorted(members)}")
            if members in seen:
                raise ValueError(f"letter {letter} duplicates another letter's block")
            seen.add(members)

    def block_for(self, letter: str) -> frozenset[int] | None:
        return self.letters.get(letter)

    def letter_for(self, block: frozenset[int]) -> str | None:
        for letter, members in self.letters.items():
            if members == block:
                return letter
        return None


# Ten letters over the symbols 0..4; A..E are the preferred five, F..J the
# extras that the witness tables call out in their "*" column.
ALPHABET_T5X = LetterAlphabet(
    "t5x",
    {
        "A": frozenset({0, 1}),
        "B": frozenset({1, 2}),
        "C": frozenset({2, 3}),
        "D": frozenset({3, 4}),
        "E": frozenset({0, 4}),
        "F": frozenset({1, 4}),
        "G": frozenset({0, 2}),
        "H": frozenset({2, 4}),
        "I": frozenset({1, 3}),
        "J": frozenset({0, 3}),
    },
)

# Six letters over the symbols 0..5, all of the form {i, i+1} mod 6.
ALPHABET_T6C = LetterAlphabet(
    "t6c",
    {
        "A": frozenset({0, 1}),
        "B": frozenset({1, 2}),
        "C": frozenset({2, 3}),
        "D": frozenset({3, 4}),
        "E": frozenset({4, 5}),
        "F": frozenset({0, 5}),
    },
)

ALPHABETS = {"t5x": ALPHABET_T5X, "t6c": ALPHABET_T6C}

BASE_LETTERS = frozenset("ABCDE")


def parse_letters(text: str, alphabet: LetterAlphabet, q: int) -> BlockSystem:
    """Parse a whitespace-separated letter sequence into a block system.

    Token i (0-based) becomes the block at label i.  The token count must
    equal q; errors name the offending position.
    """
    field = build_field(q)
    tokens = text.split()
    if len(tokens) != q:
        raise ValueError(f"expected {q} letter tokens, got {len(tokens)}")
    blocks = []
    for pos, token in enumerate(tokens):
        members = alphabet.block_for(token)
        if members is None:
            raise ValueError(f"unknown letter {token} at position {pos}")
        for x in members:
            if x >= q:
                raise ValueError(f"letter {token} at position {pos} uses element {x}, out of range for q={q}")
        blocks.append(members)
    return BlockSystem(field, tuple(blocks))


def emit_letters(system: BlockSystem, alphabet: LetterAlphabet) -> str:
    """Inverse of parse_letters; single spaces between letters."""
    out = []
    for s, blk in enumerate(system.blocks):
        letter = alphabet.letter_for(frozenset(blk))
        if letter is None:
            raise ValueError(f"block {s} = {sorted(blk)} has no letter in alphabet {alphabet.name}")
        out.append(letter)
    return " ".join(out)


def extras_used(text: str) -> str:
    """Letters outside A..E appearing in a sequence, sorted and joined."""
    return "".join(sorted(set(text.split()) - BASE_LETTERS))


def parse_int_blocks(text: str, q: int) -> BlockSystem:
    """Parse comma-separated blocks of space-separated member codes.

    A trailing comma (present verbatim in some stored rows) is tolerated.
    """
    field = build_field(q)
    parts = [part for part in text.replace("\n", " ").split(",")]
    if parts and not parts[-1].strip():
        parts.pop()
    if len(parts) != q:
        raise ValueError(f"expected {q} comma-separated blocks, got {len(parts)}")
    blocks = []
    for pos, part in enumerate(parts):
        try:
            members = [int(tok) for tok in part.split()]
        except ValueError:
            raise ValueError(f"block {pos} is not a list of integers: {part.strip()!r}") from None
        for x in members:
            if not 0 <= x < q:
                raise ValueError(f"block {pos} holds {x}, out of range for q={q}")
        if len(set(members)) != len(members):
            raise ValueError(f"block {pos} repeats a member: {part.strip()!r}")
        blocks.append(frozenset(members))
    return BlockSystem(field, tuple(blocks))


# ---------------------------------------------------------------------------
# Canonical JSON.  The document is self-contained: it carries the field
# description so a reader can verify the system without re-deriving GF(q).
# write_json output is byte-stable (fixed key order, sorted members).
# ---------------------------------------------------------------------------

def write_json(system: BlockSystem) -> str:
    f = system.field
    doc = {
        "q": f.q,
        "p": f.p,
        "m": f.m,
        "modulus": list(f.modulus),
        "blocks": [sorted(blk) for blk in system.blocks],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def read_json(text: str) -> BlockSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError("malformed document: expected a JSON object")
    required = {"q", "p", "m", "modulus", "blocks"}
    missing = required - doc.keys()
    if missing:
        raise ValueError(f"malformed document: missing keys {sorted(missing)}")
    q = doc["q"]
    field = build_field(q)
    if doc["p"] != field.p or doc["m"] != field.m or tuple(doc["modulus"]) != field.modulus:
        raise ValueError(
            f"field description {doc['p']}^{doc['m']} mod {doc['modulus']} does not match "
            f"the canonical GF({q}) = {field.p}^{field.m} mod {list(field.modulus)}"
        )
    blocks = doc["blocks"]
    if not isinstance(blocks, list) or len(blocks) != q:
        raise ValueError(f"expected {q} blocks, got {len(blocks) if isinstance(blocks, list) else blocks!r}")
    out = []
    for s, blk in enumerate(blocks):
        if not isinstance(blk, list):
            raise ValueError(f"block {s} is not a list")
        for x in blk:
            if not isinstance(x, int) or not 0 <= x < q:
                raise ValueError(f"block {s} holds {x!r}, out of range for q={q}")
        if len(set(blk)) != len(blk):
            raise ValueError(f"block {s} repeats a member")
        out.append(frozenset(blk))
    return BlockSystem(field, tuple(out))


def bounds_csv(rows: Iterable[tuple[int, int, int, int | None]]) -> str:
    """CSV for bound tables; header q,k,v,bound.  None renders as a dash."""
    lines = ["q,k,v,bound"]
    for q, k, v, bound in rows:
        lines.append(f"{q},{k},{v},{'-' if bound is None else bound}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Fixture corpus.  One file per stored table row: '# key: value' header lines
# followed by the row body, verbatim.  Rows that disagree with what the
# toolkit recomputes are reported by the table checker, never edited.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    path: Path
    table: int
    q: int
    body: str
    k: int | None = None
    t: int | None = None
    extras: str = ""
    bound: int | None = None  # None encodes a dash row
    has_bound: bool = False
    alphabet: str | None = None


def load_fixture(path: Path | str) -> Fixture:
    path = Path(path)
    meta: dict[str, str] = {}
    body_lines = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line.lstrip("#").partition(":")
            meta[key.strip()] = value.strip()
        else:
            body_lines.append(line)
    body = "\n".join(body_lines).strip("\n")
    bound_text = meta.get("bound")
    return Fixture(
        path=path,
        table=int(meta["table"]),
        q=int(meta["q"]),
        body=body,
        k=int(meta["k"]) if meta.get("k") else None,
        t=int(meta["t"]) if meta.get("t") else None,
        extras=meta.get("extras", ""),
        bound=None if bound_text in (None, "-") else int(bound_text),
        has_bound=bound_text is not None,
        alphabet=meta.get("alphabet") or None,
    )


def default_fixtures_dir() -> Path:
    return Path(str(resources.files("pbforge").joinpath("data/fixtures")))


def iter_fixtures(directory: Path | str | None = None, table: int | None = None) -> list[Fixture]:
    directory = Path(directory) if directory is not None else default_fixtures_dir()
    fixtures = [load_fixture(p) for p in sorted(directory.glob("tbl*_q*.txt"))]
    if table is not None:
        fixtures = [fx for fx in fixtures if fx.table == table]
    return sorted(fixtures, key=lambda fx: (fx.table, fx.q))

"""Witness search for (q,k)- and (q,k,t)-product blocks.

Two engines share one result type: an exhaustive backtracking search that can
certify nonexistence for small spaces, and a seeded min-conflicts restart
search for everything else.  Both re-verify every witness before returning it.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

from .blocks import BlockSystem, stats, verify
from .gf import Field, build_field

DEFAULT_NODE_CAP = 10 ** 9

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, index: int) -> int:
    """Stable 64-bit mix of (seed, index); independent of PYTHONHASHSEED."""
    x = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class SearchSpaceError(ValueError):
    """Exhaustive enumeration refused because the estimated tree is too big."""


@dataclass
class SearchConfig:
    """Parameters for one search run.

    ``symbols`` fixes the symbol universe; otherwise a t-subset is sampled
    per restart (local mode) or enumerated up to affine symmetry (exhaustive
    mode).  In deterministic mode the wall-clock budget is only consulted
    between restarts, so any run that finishes inside the budget is
    bit-reproducible for a given (seed, worker_count).
    """

    q: int
    k: int
    t: int | None = None
    symbols: tuple[int, ...] | None = None
    mode: str = "local"  # "exhaustive" | "local"
    seed: int = 0
    max_restarts: int = 200
    max_steps_per_restart: int = 5000
    time_budget: float = 60.0
    worker_count: int = 1
    deterministic: bool = True
    sideways_prob: float = 0.25
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self):
        if self.mode not in ("exhaustive", "local"):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.k < 1:
            raise ValueError(f"block size k must be >= 1, got {self.k}")
        if self.t is not None and not self.k <= self.t <= self.q:
            raise ValueError(f"need k <= t <= q, got k={self.k}, t={self.t}, q={self.q}")
        if self.symbols is not None:
            self.symbols = tuple(sorted(set(self.symbols)))
            if self.t is not None and len(self.symbols) != self.t:
                raise ValueError(f"fixed symbol set has {len(self.symbols)} elements, t={self.t}")
        if self.max_restarts < 1 or self.max_steps_per_restart < 1:
            raise ValueError("restart and step budgets must be positive")
        if self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.worker_count < 1:
            raise ValueError("worker count must be positive")


@dataclass
class Counters:
    restarts: int = 0
    steps: int = 0
    conflict_evals: int = 0

    def merge(self, other: "Counters") -> None:
        self.restarts += other.restarts
        self.steps += other.steps
        self.conflict_evals += other.conflict_evals


@dataclass
class SearchResult:
    status: str  # "found" | "exhausted" | "budget_spent"
    witness: BlockSystem | None
    proof_of_exhaustion: bool
    counters: Counters


@dataclass
class KappaResult:
    """Largest uniform block size reached for q, with one witness per k."""

    q: int
    best_k: int
    witnesses: dict[int, BlockSystem] = dc_field(default_factory=dict)


def conflict_objective(system: BlockSystem) -> int:
    """Number of unordered conflicting element pairs.

    Scored the way the local search maintains its objective: one
    rotate-and-popcount per label pair over block bitmasks (or a shift-table
    walk for extension fields).  Always equals verify(system).count.
    """
    f = system.field
    q = f.q
    masks = [sum(1 << x for x in blk) for blk in system.blocks]
    full = (1 << q) - 1
    total = 0
    for r in range(q):
        mr = masks[r]
        if not mr:
            continue
        for s in range(r + 1, q):
            if not masks[s]:
                continue
            if f.m == 1:
                e = f.inv((s - r) % q)
                total += (((mr << e) | (mr >> (q - e))) & full & masks[s]).bit_count()
            else:
                tbl = f.shift(f.inv(f.sub(s, r)))
                total += sum(1 for a in system.blocks[r] if (masks[s] >> tbl[a]) & 1)
    return total


def _check_witness(system: BlockSystem, k: int, t: int | None) -> BlockSystem:
    report = verify(system)
    st = stats(system)
    if report.conflicts or st.uniform_k != k or (t is not None and st.t != t):
        raise AssertionError(f"search produced an invalid witness: {report.count} conflicts, stats {st}")
    return system


# ---------------------------------------------------------------------------
# Exhaustive backtracking search.
# ---------------------------------------------------------------------------

def estimate_nodes(q: int, k: int, t: int | None = None, symbols=None) -> int:
    """Worst-case DFS tree size for one symbol universe: C(u, k) ** q."""
    u = len(symbols) if symbols is not None else (t if t is not None else q)
    return comb(u, k) ** q


def canonical_universes(field: Field, t: int) -> list[tuple[int, ...]]:
    """t-subsets of GF(q), one representative per orbit of x -> a*x + c.

    Element translation and scaling preserve validity, so searching the
    representatives decides existence for every t-subset.
    """
    q = field.q
    maps = [field.shift(c) if a == 1 else tuple(field.add(field.mul(a, x), c) for x in range(q))
            for a in range(1, q) for c in range(q)]
    reps = set()
    seen = set()
    for combo in combinations(range(q), t):
        if combo in seen:
            continue
        orbit = {tuple(sorted(mp[x] for x in combo)) for mp in maps}
        seen.update(orbit)
        reps.add(min(orbit))
    return sorted(reps)


def _dfs_universe(field: Field, universe, k: int, exact_union: bool, counters: Counters):
    """Backtracking over block assignments for one universe.

    Prunes with per-pair compatibility masks (forward checking) and breaks
    the label-translation symmetry by forcing the smallest candidate index
    to sit at label 0.  Returns the assignment or None after covering the
    whole (reduced) tree.
    """
    q = field.q
    cands = [frozenset(c) for c in combinations(sorted(universe), k)]
    n = len(cands)
    if n == 0:
        return None
    emasks = [sum(1 << x for x in c) for c in cands]
    universe_mask = sum(1 << x for x in universe)
    sub = field.sub

    compat: dict[int, list[int]] = {}
    for d in range(1, q):
        e = field.inv(d)
        shift = field.shift(e)
        shifted = [sum(1 << shift[x] for x in c) for c in cands]
        rows = []
        for i in range(n):
            si = shifted[i]
            row = 0
            for j in range(n):
                if not si & emasks[j]:
                    row |= 1 << j
            rows.append(row)
        compat[d] = rows

    diff = [[sub(s2, s1) for s1 in range(q)] for s2 in range(q)]
    full = (1 << n) - 1

    def descend(pos: int, allowed: list[int], union_mask: int, chosen: list[int]):
        if pos == q:
            if not exact_union or union_mask == universe_mask:
                return list(chosen)
            return None
        mask = allowed[pos]
        remaining_capacity = (q - pos - 1) * k
        while mask:
            low = mask & -mask
            j = low.bit_length() - 1
            mask ^= low
            counters.steps += 1
            new_union = union_mask | emasks[j]
            if exact_union and (universe_mask & ~new_union).bit_count() > remaining_capacity:
                continue
            nxt = allowed.copy()
            ok = True
            for s2 in range(pos + 1, q):
                counters.conflict_evals += 1
                na = nxt[s2] & compat[diff[s2][pos]][j]
                if not na:
                    ok = False
                    break
                nxt[s2] = na
            if ok:
                chosen.append(j)
                hit = descend(pos + 1, nxt, new_union, chosen)
                if hit is not None:
                    return hit
                chosen.pop()
        return None

    for c0 in range(n):
        counters.steps += 1
        ge = full & ~((1 << c0) - 1)
        allowed = [0] * q
        ok = True
        for s2 in range(1, q):
            counters.conflict_evals += 1
            na = ge & compat[diff[s2][0]][c0]
            if not na:
                ok = False
                break
            allowed[s2] = na
        if not ok:
            continue
        hit = descend(1, allowed, emasks[c0], [c0])
        if hit is not None:
            return [cands[j] for j in hit]
    return None


def exhaustive_search(
    q: int,
    k: int,
    t: int | None = None,
    symbols=None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SearchResult:
    """Depth-first certification of existence or nonexistence.

    With t given, every t-subset of GF(q) is considered as the symbol
    universe (up to affine symmetry, which preserves validity) and a witness
    must use the whole universe.  Raises SearchSpaceError with the node
    estimate when the space is too big to enumerate.
    """
    field = build_field(q)
    if k < 1:
        raise ValueError(f"block size k must be >= 1, got {k}")
    if t is not None and not k <= t <= q:
        raise ValueError(f"need k <= t <= q, got k={k}, t={t}, q={q}")
    if symbols is not None:
        symbols = tuple(sorted({field.check(x) for x in symbols}))
        if t is not None and len(symbols) != t:
            raise ValueError(f"fixed symbol set has {len(symbols)} elements, t={t}")

    estimate = estimate_nodes(q, k, t, symbols)
    if estimate > node_cap:
        raise SearchSpaceError(
            f"refusing exhaustive search for q={q}, k={k}, t={t}: "
            f"~{estimate} nodes per universe exceeds the cap of {node_cap}"
        )

    counters = Counters()
    if symbols is not None:
        universes = [symbols]
        exact_union = t is not None
    elif t is not None:
        if comb(q, t) * q * q > node_cap:
            raise SearchSpaceError(
                f"refusing exhaustive search for q={q}, t={t}: "
                f"{comb(q, t)} candidate universes exceed the cap of {node_cap}"
            )
        universes = canonical_universes(field, t)
        exact_union = True
    else:
        universes = [tuple(field.elements())]
        exact_union = False

    for universe in universes:
        hit = _dfs_universe(field, universe, k, exact_union, counters)
        if hit is not None:
            witness = _check_witness(BlockSystem(field, tuple(hit)), k, t)
            return SearchResult("found", witness, False, counters)
    return SearchResult("exhausted", None, True, counters)


# ---------------------------------------------------------------------------
# Seeded min-conflicts local search.
# ---------------------------------------------------------------------------

def _local_worker(args: dict) -> dict:
    """One worker: independent restarts of min-conflicts hill climbing.

    The objective is the number of unordered conflicting element pairs; a
    move replaces one of the most-conflicted blocks with a fresh uniform
    k-subset, accepting strict improvements always and sideways moves with
    the configured probability.  Blocks live in bitmasks: over a prime field
    the forbidden-partner map x -> x + e is a cyclic rotation of the mask, so
    scoring a pair of blocks is a rotate-and-popcount.
    """
    q = args["q"]
    k = args["k"]
    t = args["t"]
    symbols = args["symbols"]
    rng = random.Random(args["seed"])
    max_restarts = args["max_restarts"]
    max_steps = args["max_steps"]
    sideways = args["sideways_prob"]
    deadline = args["deadline"]
    fine_time = args["fine_time_checks"]

    field = build_field(q)
    prime = field.m == 1
    full = (1 << q) - 1
    elements = list(range(q))
    if prime:
        # offs[u][v] = (s-r)^-1 for the pair (r=u, s=v); rotation amount.
        offs = [[field.inv((v - u) % q) if v != u else 0 for v in range(q)] for u in range(q)]
    else:
        shifts = [[field.shift(field.inv(field.sub(v, u))) if v != u else None for v in range(q)]
                  for u in range(q)]

    restarts = steps = evals = 0
    rng_random = rng.random
    rng_choice = rng.choice
    rng_sample = rng.sample

    def pair_count(lst_r, mask_r, mask_s, u, v):
        # conflicts contributed by the label pair (u, v) with u the lower code
        if prime:
            e = offs[u][v]
            return (((mask_r << e) | (mask_r >> (q - e))) & full & mask_s).bit_count()
        tbl = shifts[u][v]
        return sum(1 for a in lst_r if (mask_s >> tbl[a]) & 1)

    while restarts < max_restarts:
        if deadline is not None and time.monotonic() >= deadline:
            break
        restarts += 1
        if symbols is not None:
            universe = list(symbols)
        elif t is not None:
            universe = sorted(rng_sample(elements, t))
        else:
            universe = elements

        lists = [rng_sample(universe, k) for _ in range(q)]
        masks = [sum(1 << x for x in lst) for lst in lists]

        usage = [0] * q
        for lst in lists:
            for x in lst:
                usage[x] += 1
        used = sum(1 for c in usage if c)

        paircnt = [[0] * q for _ in range(q)]
        block_conf = [0] * q
        total = 0
        for r in range(q):
            for s in range(r + 1, q):
                cnt = pair_count(lists[r], masks[r], masks[s], r, s)
                evals += 1
                if cnt:
                    paircnt[r][s] = cnt
                    block_conf[r] += cnt
                    block_conf[s] += cnt
                    total += cnt

        for _step in range(max_steps):
            if total == 0 and (t is None or used == t):
                return {
                    "worker": args["worker"],
                    "status": "found",
                    "blocks": [sorted(lst) for lst in lists],
                    "restarts": restarts,
                    "steps": steps,
                    "conflict_evals": evals,
                }
            steps += 1
            if fine_time and deadline is not None and not steps % 256 and time.monotonic() >= deadline:
                break

            worst = max(block_conf)
            u = rng_choice([s for s in range(q) if block_conf[s] == worst])
            new_list = rng_sample(universe, k)
            new_mask = sum(1 << x for x in new_list)

            delta = 0
            new_counts = [0] * q
            if prime:
                for v in range(q):
                    if v == u:
                        continue
                    if v < u:
                        e = offs[v][u]
                        mv = masks[v]
                        cnt = (((mv << e) | (mv >> (q - e))) & full & new_mask).bit_count()
                        delta += cnt - paircnt[v][u]
                    else:
                        e = offs[u][v]
                        cnt = (((new_mask << e) | (new_mask >> (q - e))) & full & masks[v]).bit_count()
                        delta += cnt - paircnt[u][v]
                    new_counts[v] = cnt
            else:
                for v in range(q):
                    if v == u:
                        continue
                    if v < u:
                        cnt = pair_count(lists[v], masks[v], new_mask, v, u)
                        delta += cnt - paircnt[v][u]
                    else:
                        cnt = pair_count(new_list, new_mask, masks[v], u, v)
                        delta += cnt - paircnt[u][v]
                    new_counts[v] = cnt
            evals += q - 1

            if delta < 0 or (delta == 0 and rng_random() < sideways):
                for x in lists[u]:
                    usage[x] -= 1
                    if not usage[x]:
                        used -= 1
                for x in new_list:
                    if not usage[x]:
                        used += 1
                    usage[x] += 1
                conf_u = 0
                for v in range(q):
                    if v == u:
                        continue
                    cnt = new_counts[v]
                    if v < u:
                        old = paircnt[v][u]
                        paircnt[v][u] = cnt
                    else:
                        old = paircnt[u][v]
                        paircnt[u][v] = cnt
                    block_conf[v] += cnt - old
                    conf_u += cnt
                block_conf[u] = conf_u
                total += delta
                lists[u] = new_list
                masks[u] = new_mask

        if total == 0 and (t is None or used == t):
            return {
                "worker": args["worker"],
                "status": "found",
                "blocks": [sorted(lst) for lst in lists],
                "restarts": restarts,
                "steps": steps,
                "conflict_evals": evals,
            }

    return {
        "worker": args["worker"],
        "status": "budget_spent",
        "blocks": None,
        "restarts": restarts,
        "steps": steps,
        "conflict_evals": evals,
    }


def local_search(config: SearchConfig) -> SearchResult:
    """Randomized restart search; deterministic given (seed, worker_count).

    Worker w runs with the derived seed mix(seed, w).  In deterministic mode
    every worker runs to completion and the witness of the lowest-indexed
    successful worker is returned; in fast mode workers run in separate
    processes and the first success wins (only ``status`` is then guaranteed
    to be stable across runs).
    """
    if config.mode != "local":
        raise ValueError(f"local_search needs mode='local', got {config.mode!r}")
    deadline = time.monotonic() + config.time_budget
    worker_args = [
        {
            "worker": w,
            "q": config.q,
            "k": config.k,
            "t": config.t,
            "symbols": config.symbols,
            "seed": derive_seed(config.seed, w),
            "max_restarts": config.max_restarts,
            "max_steps": config.max_steps_per_restart,
            "sideways_prob": config.sideways_prob,
            "deadline": deadline,
            "fine_time_checks": not config.deterministic,
        }
        for w in range(config.worker_count)
    ]

    results = []
    if config.deterministic or config.worker_count == 1:
        for args in worker_args:
            results.append(_local_worker(args))
    else:
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            pending = {pool.submit(_local_worker, args) for args in worker_args}
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                results.extend(f.result() for f in done)
                if any(r["status"] == "found" for r in results):
                    for f in pending:
                        f.cancel()
                    pending = set()

    counters = Counters()
    for r in results:
        counters.merge(Counters(r["restarts"], r["steps"], r["conflict_evals"]))
    hits = sorted((r for r in results if r["status"] == "found"), key=lambda r: r["worker"])
    if hits:
        field = build_field(config.q)
        witness = BlockSystem(field, tuple(frozenset(blk) for blk in hits[0]["blocks"]))
        return SearchResult("found", _check_witness(witness, config.k, config.t), False, counters)
    return SearchResult("budget_spent", None, False, counters)


def run_search(config: SearchConfig) -> SearchResult:
    """Dispatch on config.mode."""
    if config.mode == "exhaustive":
        return exhaustive_search(config.q, config.k, config.t, config.symbols, config.node_cap)
    return local_search(config)


def kappa_lower_bound(
    q: int,
    time_budget: float,
    seed: int = 0,
    node_cap: int = DEFAULT_NODE_CAP,
    max_steps_per_restart: int | None = None,
    worker_count: int = 1,
) -> KappaResult:
    """Raise k until a search fails inside its share of the budget.

    Each k gets half the remaining wall-clock budget (easy levels succeed
    quickly and barely consume theirs, so most of the budget lands on the
    first hard level).  Exhaustive search is used whenever its node estimate
    fits under the cap, local search otherwise.
    """
    if time_budget <= 0:
        raise ValueError("time budget must be positive")
    start = time.monotonic()
    result = KappaResult(q=q, best_k=0)
    k = 1
    while k <= q:
        remaining = time_budget - (time.monotonic() - start)
        if remaining <= 0.01:
            break
        share = remaining / 2
        if estimate_nodes(q, k) <= node_cap:
            res = exhaustive_search(q, k, node_cap=node_cap)
        else:
            steps = max_steps_per_restart or 20000
            cfg = SearchConfig(
                q=q,
                k=k,
                mode="local",
                seed=derive_seed(seed, k),
                max_restarts=10 ** 9,
                max_steps_per_restart=steps,
                time_budget=share,
                worker_count=worker_count,
                deterministic=True,
            )
            res = local_search(cfg)
        if res.status != "found":
            break
        result.witnesses[k] = res.witness
        result.best_k = k
        k += 1
    return result

"""Exact arithmetic in GF(q) for prime and prime-power q.

Field elements are canonical integer codes in [0, q): the element with
coefficient vector (c_0, ..., c_{m-1}) over GF(p) has code sum(c_i * p**i).
Field construction is deterministic, so codes and stored block systems mean
the same thing across runs and machines.
"""

from __future__ import annotations

import functools

# Lookup tables (exp/log for extension fields, inverses everywhere) are
# precomputed up to this order; larger fields fall back to on-the-fly
# polynomial arithmetic.
TABLE_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 2 as a list of (prime, exponent) pairs."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return factors


def prime_power(q: int) -> tuple[int, int]:
    """Split q into (p, m) with q = p**m and p prime.

    Raises ValueError naming the offending factorization when q is not a
    prime power.
    """
    if not isinstance(q, int) or q < 2:
        raise ValueError(f"field order must be an integer >= 2, got {q!r}")
    factors = factorize(q)
    if len(factors) != 1:
        text = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in factors)
        raise ValueError(f"q={q} is not a prime power: {q} = {text}")
    return factors[0]


# ---------------------------------------------------------------------------
# Polynomial helpers.  Polynomials over GF(p) are tuples of coefficients in
# little-endian order: (c_0, c_1, ..., c_d) stands for c_0 + c_1 x + ... .
# ---------------------------------------------------------------------------

def _poly_rem(a: list[int], b: tuple[int, ...], p: int) -> list[int]:
    """Remainder of a modulo monic b, coefficients mod p."""
    a = list(a)
    db = len(b) - 1
    while len(a) >= len(b):
        lead = a[-1] % p
        if lead:
            off = len(a) - len(b)
            for i in range(db):
                a[off + i] = (a[off + i] - lead * b[i]) % p
        a.pop()
    return a


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _poly_rem(out, mod, p)


def _digits(n: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(n % p)
        n //= p
    return out


def _is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        for code in range(p ** d):
            divisor = tuple(_digits(code, p, d)) + (1,)
            if not any(_poly_rem(list(poly), divisor, p)):
                return False
    return True


def find_modulus(p: int, m: int) -> tuple[int, ...]:
    """Deterministic modulus for GF(p^m): the monic irreducible of degree m
    whose non-leading coefficients have the smallest base-p integer encoding.

    For m = 1 the modulus is the polynomial x, i.e. plain arithmetic mod p.
    """
    if m == 1:
        return (0, 1)
    for n in range(p ** m):
        candidate = tuple(_digits(n, p, m)) + (1,)
        if _is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")


class Field:
    """GF(p^m) on integer element codes.

    All operations are pure and the instance is immutable after construction,
    so a Field can be shared freely across threads and workers.  Use
    :func:`build_field` rather than constructing directly; it pins the modulus
    to the deterministic scan order and caches one instance per order.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        self.p = p
        self.m = m
        self.q = p ** m
        self.modulus = find_modulus(p, m) if modulus is None else tuple(modulus)
        if len(self.modulus) != m + 1 or self.modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {m}: {self.modulus}")
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._inv_table: list[int] | None = None
        self._shifts: dict[int, tuple[int, ...]] = {}
        if self.q <= TABLE_LIMIT:
            if m > 1:
                self._build_exp_log()
            self._inv_table = [0] * self.q
            for x in range(1, self.q):
                self._inv_table[x] = self._inv_raw(x)

    # -- code <-> coefficient vector ------------------------------------

    def to_digits(self, x: int) -> tuple[int, ...]:
        return tuple(_digits(x, self.p, self.m))

    def from_digits(self, digits) -> int:
        code = 0
        for c in reversed(list(digits)):
            code = code * self.p + c % self.p
        return code

    def elements(self) -> range:
        return range(self.q)

    def check(self, x: int) -> int:
        if not isinstance(x, int) or not 0 <= x < self.q:
            raise ValueError(f"{x!r} is not a valid element code for GF({self.q})")
        return x

    # -- raw polynomial arithmetic (no tables) ---------------------------

    def _mul_raw(self, x: int, y: int) -> int:
        if self.m == 1:
            return x * y % self.p
        prod = _poly_mulmod(self.to_digits(x), self.to_digits(y), self.modulus, self.p)
        return self.from_digits(prod + [0] * (self.m - len(prod)))

    def _pow_raw(self, x: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._mul_raw(r, x)
            x = self._mul_raw(x, x)
            n >>= 1
        return r

    def _inv_raw(self, x: int) -> int:
        if self.m == 1:
            return pow(x, self.p - 2, self.p)
        return self._pow_raw(x, self.q - 2)

    def _build_exp_log(self):
        # Smallest-code generator of the multiplicative group; scan order is
        # fixed so the tables are reproducible.
        order = self.q - 1
        prime_divs = [r for r, _ in factorize(order)] if order > 1 else []
        gen = None
        for g in range(2, self.q):
            if all(self._pow_raw(g, order // r) != 1 for r in prime_divs):
                gen = g
                break
        if gen is None:  # q == 2
            gen = 1
        exp = [1] * order
        log = [0] * self.q
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, gen)
        self._exp = exp
        self._log = log

    # -- public field operations -----------------------------------------

    def add(self, x: int, y: int) -> int:
        self.check(x)
        self.check(y)
        if self.m == 1:
            return (x + y) % self.p
        p = self.p
        out, pp = 0, 1
        while x or y:
            out += ((x % p + y % p) % p) * pp
            x //= p
            y //= p
            pp *= p
        return out

    def neg(self, x: int) -> int:
        self.check(x)
        if self.m == 1:
            return -x % self.p
        p = self.p
        out, pp = 0, 1
        while x:
            out += (-x % p) * pp
            x //= p
            pp *= p
        return out

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        self.check(x)
        self.check(y)
        if self.m == 1:
            return x * y % self.p
        if self._exp is not None:
            if x == 0 or y == 0:
                return 0
            return self._exp[(self._log[x] + self._log[y]) % (self.q - 1)]
        return self._mul_raw(x, y)

    def inv(self, x: int) -> int:
        self.check(x)
        if x == 0:
            raise ValueError(f"0 has no multiplicative inverse in GF({self.q})")
        if self._inv_table is not None:
            return self._inv_table[x]
        return self._inv_raw(x)

    def shift(self, e: int) -> tuple[int, ...]:
        """Permutation table x -> x + e, cached per offset.

        The verifier and the search loops use these tables to turn the
        pairwise condition into a single membership test.
        """
        table = self._shifts.get(e)
        if table is None:
            self.check(e)
            table = tuple(self.add(x, e) for x in range(self.q))
            self._shifts[e] = table
        return table

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"Field(q={self.q}, p={self.p}, m={self.m}, modulus={list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def build_field(q: int) -> Field:
    """Construct GF(q) deterministically; rejects q that is not a prime power."""
    p, m = prime_power(q)
    return Field(p, m)

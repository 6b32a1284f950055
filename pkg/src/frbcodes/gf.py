"""Finite-field arithmetic over GF(p^m).

Elements are plain integers in ``[0, q)``. The integer ``i`` stands for the
polynomial whose coefficients are the base-``p`` digits of ``i``, least
significant digit first, so ``0`` and ``1`` are the identities and for
GF(4) the element ``2`` is ``x`` and ``3`` is ``x + 1``.

Multiplication goes through exp/log tables built from a primitive element
found by search; the modulus for each extension field is the
lexicographically least irreducible monic of degree ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DivisionByZero, FieldMismatch, NoModulus, NotPrimePower

MAX_ORDER = 1 << 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, m)`` with ``q == p**m``, or raise :class:`NotPrimePower`."""
    if not isinstance(q, int) or q < 2:
        raise NotPrimePower(f"{q!r} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, m


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except NotPrimePower:
        return False
    return True


# polynomials over GF(p): coefficient lists, lowest degree first, no trailing zeros

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and a:
        f = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def _digits(i: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        i, d = divmod(i, p)
        out.append(d)
    return out


def _monics(p: int, deg: int):
    for low in range(p**deg):
        yield _digits(low, p, deg) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for divisor in _monics(p, d):
            if not _poly_mod(poly, divisor, p):
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least irreducible monic of degree ``m`` over GF(p).

    Candidates are ordered by the base-``p`` value of their coefficients,
    which is the same enumeration used for field elements.
    """
    for cand in _monics(p, m):
        if cand[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)
    raise NoModulus(f"no irreducible polynomial of degree {m} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return self.p**self.m


class Field:
    """GF(q) with integer-coded elements. Use :func:`field_new` to build one."""

    def __init__(self, q: int):
        p, m = prime_power(q)
        if q > MAX_ORDER:
            raise NoModulus(f"fields above order {MAX_ORDER} are not supported")
        self.q = q
        self.p = p
        self.m = m
        self.spec = FieldSpec(p, m, least_irreducible(p, m) if m > 1 else ())
        self._exp, self._log = self._build_tables()
        self.generator = self._exp[1] if q > 2 else 1

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __reduce__(self):
        return field_new, (self.q,)

    # table construction uses slow polynomial multiplication once

    def _slow_mul(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        if m == 1:
            return a * b % p
        if p == 2:
            mod = sum(1 << i for i, c in enumerate(self.spec.modulus) if c)
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> m & 1:
                    a ^= mod
            return r
        da, db = _digits(a, p, m), _digits(b, p, m)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        rem = _poly_mod(prod, list(self.spec.modulus), p)
        return sum(c * p**i for i, c in enumerate(rem))

    def _build_tables(self) -> tuple[list[int], list[int]]:
        q = self.q
        order = q - 1
        factors = [r for r in range(2, order + 1) if order % r == 0 and _is_prime(r)]
        for g in range(1, q):
            exp = [1] * order
            for i in range(1, order):
                exp[i] = self._slow_mul(exp[i - 1], g)
            if order == 1 or all(exp[order // r] != 1 for r in factors):
                break
        log = [0] * q
        for i, e in enumerate(exp):
            log[e] = i
        return exp * 2, log

    def _check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.q:
                raise FieldMismatch(f"{x!r} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        p = self.p
        r, scale = 0, 1
        while a or b:
            r += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return r

    def neg(self, a: int) -> int:
        self._check(a)
        if self.p == 2:
            return a
        p = self.p
        r, scale = 0, 1
        while a:
            r += (-(a % p) % p) * scale
            a //= p
            scale *= p
        return r

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[self._log[a] * e % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def element(self, index: int) -> FieldElement:
        self._check(index)
        return FieldElement(self, index)

    def poly(self, a: int) -> list[int]:
        """Coefficient vector of ``a``, lowest degree first."""
        self._check(a)
        return _digits(a, self.p, self.m)


@lru_cache(maxsize=None)
def field_new(q: int) -> Field:
    return Field(q)


@dataclass(frozen=True)
class FieldElement:
    """Operator-friendly wrapper around an element index."""

    field: Field
    index: int

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.q != self.field.q:
                raise FieldMismatch(f"GF({self.field.q}) vs GF({other.field.q})")
            return other.index
        if isinstance(other, int):
            return self.field.element(other).index
        return NotImplemented

    def _wrap(self, i: int) -> FieldElement:
        return FieldElement(self.field, i)

    def __add__(self, other):
        return self._wrap(self.field.add(self.index, self._other(other)))

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.index, self._other(other)))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.index, self._other(other)))

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.index, self._other(other)))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.index, e))

    def __neg__(self):
        return self._wrap(self.field.neg(self.index))

    def inverse(self) -> FieldElement:
        return self._wrap(self.field.inv(self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"GF({self.field.q})[{self.index}]"

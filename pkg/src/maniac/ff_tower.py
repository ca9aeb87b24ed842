"""Exact arithmetic in F_p and towers of extensions F_p < F_q < F_Q < ...

Elements are plain Python ints.  An element of an extension L of K with
[L:K] = e is the int ``sum(c_i * |K|**i)`` where ``c_0..c_{e-1}`` are its
coordinates in the polynomial basis ``1, y, ..., y^(e-1)``.  Recursively this
is the base-p integer whose digits are the F_p coordinates, so

* embedding K -> L is the identity on ints,
* folding ``e`` consecutive K-entries of a row into one L-entry is
  ``from_coeffs`` and unfolding is ``coeffs``.

Fields of size <= ``TABLE_LIMIT`` use exp/log tables; larger ones multiply
coefficient vectors directly.
"""
from __future__ import annotations

import operator
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BaseLevelHasNoUnfold,
    ColsNotDivisible,
    InversionOfZero,
    LevelMismatch,
    ShapeMismatch,
)

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


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class PrimeField:
    """F_p with elements ``0..p-1``."""

    level = 0
    base = None
    degree = 1
    abs_degree = 1
    zero = 0
    one = 1

    _instances: dict[int, "PrimeField"] = {}

    def __new__(cls, p: int):
        # one object per p, so identity comparisons across towers work
        if p not in cls._instances:
            if not is_prime(p):
                raise ValueError(f"p={p} is not prime")
            obj = super().__new__(cls)
            obj.p = p
            obj.size = p
            cls._instances[p] = obj
        return cls._instances[p]

    def __getnewargs__(self):
        return (self.p,)

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise InversionOfZero("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return pow(self.inv(a), -k, self.p)
        return pow(a, k, self.p)

    def coeffs(self, a: int) -> list[int]:
        return [a]

    def elements(self) -> range:
        return range(self.p)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def contains(self, other) -> bool:
        return other is self


class ExtensionField:
    """L = K[y]/(g(y)) for a monic irreducible ``g`` over the field ``base``."""

    def __init__(self, base, modulus: Sequence[int]):
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.base = base
        self.p = base.p
        self.level = base.level + 1
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.abs_degree = base.abs_degree * self.degree
        self.size = base.size ** self.degree
        self.zero = 0
        self.one = 1
        self._b = base.size
        self._prime_base = isinstance(base, PrimeField)
        self.mul = self._mul_poly
        if self.p == 2:
            self.add = self.sub = operator.xor
            self.neg = _identity
        self._frob_rows = self._frobenius_images()
        self._exp = self._log = None
        if self.size <= TABLE_LIMIT:
            self._build_tables()

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.abs_degree}; level {self.level})"

    # coordinates -----------------------------------------------------------
    def coeffs(self, a: int) -> list[int]:
        b = self._b
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, b)
            out.append(r)
        return out

    def from_coeffs(self, cs: Sequence[int]) -> int:
        b = self._b
        v = 0
        for c in reversed(cs):
            v = v * b + c
        return v

    def contains(self, other) -> bool:
        f = self
        while f is not None:
            if f is other:
                return True
            f = f.base
        return False

    def elements(self) -> range:
        return range(self.size)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.size)

    # additive group: digit-wise over F_p ----------------------------------
    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        res, m = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            s = x + y
            if s >= p:
                s -= p
            res += s * m
            m *= p
        return res

    def sub(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        res, m = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            s = x - y
            if s < 0:
                s += p
            res += s * m
            m *= p
        return res

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    # multiplicative structure ----------------------------------------------
    def _mul_poly(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        e = self.degree
        ca = self.coeffs(a)
        cb = self.coeffs(b)
        mod = self.modulus
        if self._prime_base:
            p = self.p
            prod = [0] * (2 * e - 1)
            for i, x in enumerate(ca):
                if x:
                    for j, y in enumerate(cb):
                        prod[i + j] += x * y
            for k in range(2 * e - 2, e - 1, -1):
                c = prod[k] % p
                if c:
                    for j in range(e):
                        prod[k - e + j] -= c * mod[j]
            return self.from_coeffs([x % p for x in prod[:e]])
        K = self.base
        kadd, kmul, ksub = K.add, K.mul, K.sub
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    if y:
                        prod[i + j] = kadd(prod[i + j], kmul(x, y))
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if c:
                for j in range(e):
                    if mod[j]:
                        prod[k - e + j] = ksub(prod[k - e + j], kmul(c, mod[j]))
        return self.from_coeffs(prod[:e])

    def _mul_table(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def _pow_generic(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        if self._exp is not None:
            if not a:
                return 0 if k else 1
            return self._exp[(self._log[a] * k) % (self.size - 1)]
        return self._pow_generic(a, k)

    def inv(self, a: int) -> int:
        if not a:
            raise InversionOfZero("0 has no inverse")
        if self._exp is not None:
            return self._exp[(self.size - 1 - self._log[a]) % (self.size - 1)]
        # extended Euclid on K[y]: s*a + t*g = const
        K = self.base
        r0, r1 = list(self.modulus), _ptrim(self.coeffs(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            q, r = _pdivmod(K, r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(K, s0, _pmul(K, q, s1))
        c = K.inv(r1[0])
        out = [K.mul(c, x) for x in s1] + [0] * self.degree
        return self.from_coeffs(out[: self.degree])

    def frob(self, a: int, times: int = 1) -> int:
        """x -> x^(|K|^times), the K-linear Frobenius relative to ``base``."""
        times %= self.degree
        if not a or not times:
            return a
        if self._exp is not None:
            return self._exp[(self._log[a] * self._frob_exp[times]) % (self.size - 1)]
        for _ in range(times):
            a = self._frob_once(a)
        return a

    def _frob_once(self, a: int) -> int:
        e = self.degree
        cs = self.coeffs(a)
        if self._prime_base:
            acc = [0] * e
            for c, row in zip(cs, self._frob_rows):
                if c:
                    for j, v in enumerate(row):
                        acc[j] += c * v
            p = self.p
            return self.from_coeffs([x % p for x in acc])
        K = self.base
        acc = [0] * e
        for c, row in zip(cs, self._frob_rows):
            if c:
                for j, v in enumerate(row):
                    if v:
                        acc[j] = K.add(acc[j], K.mul(c, v))
        return self.from_coeffs(acc)

    def _frobenius_images(self) -> list[list[int]]:
        # coordinates of (y^b)^i, i < e
        e = self.degree
        if e == 1:
            return [[1]]
        yb = self._pow_generic(self._b, self._b)  # int encoding of y is |K|
        rows, cur = [], 1
        for _ in range(e):
            rows.append(self.coeffs(cur))
            cur = self._mul_poly(cur, yb)
        return rows

    def _build_tables(self) -> None:
        order = self.size - 1
        factors = prime_factors(order) if order > 1 else []
        gen = 1
        for cand in range(1, self.size):
            if all(self._pow_generic(cand, order // f) != 1 for f in factors):
                gen = cand
                break
        exp = [0] * (2 * order)
        log = [0] * self.size
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_poly(x, gen)
        exp[order:] = exp[:order]
        self._exp, self._log = exp, log
        self._frob_exp = [pow(self._b, t, order) if order > 1 else 1 for t in range(self.degree)]
        self.mul = self._mul_table


def _identity(a: int) -> int:
    return a


# polynomials over a field, little-endian int lists -------------------------

def _ptrim(a: list[int]) -> list[int]:
    while a and not a[-1]:
        a.pop()
    return a


def _psub(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([F.sub(x, y) for x, y in zip(a, b)])


def _pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _ptrim(out)


def _pdivmod(F, a, b):
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    inv_lead = F.inv(b[-1])
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = F.mul(a[-1], inv_lead)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, y))
        _ptrim(a)
    return _ptrim(q), a


def _pmulmod(F, a, b, g):
    return _pdivmod(F, _pmul(F, a, b), g)[1]


def _ppowmod(F, a, k, g):
    r = [1]
    while k:
        if k & 1:
            r = _pmulmod(F, r, a, g)
        a = _pmulmod(F, a, a, g)
        k >>= 1
    return r


def _pgcd(F, a, b):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(F, a, b)[1]
    return a


def is_irreducible(F, g: Sequence[int]) -> bool:
    """Rabin's test for a monic ``g`` over the field ``F``."""
    g = _ptrim(list(g))
    e = len(g) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    if g[0] == 0:
        return False
    x = [0, 1]
    powers = [x]
    cur = x
    for _ in range(e):
        cur = _ppowmod(F, cur, F.size, g)
        powers.append(cur)
    if _psub(F, powers[e], x):
        return False
    for r in prime_factors(e):
        if len(_pgcd(F, _psub(F, powers[e // r], x), g)) > 1:
            return False
    return True


def random_irreducible(F, degree: int, rng: random.Random) -> list[int]:
    while True:
        g = [F.random(rng) for _ in range(degree)] + [1]
        if is_irreducible(F, g):
            return g


class FieldTower:
    """A chain F_p = L_0 < L_1 < ... < L_s with [L_i : L_{i-1}] = degrees[i-1].

    Moduli not supplied are drawn by a seeded random search, so two parties
    constructing ``FieldTower(p, degrees, seed=s)`` agree on every level.
    """

    def __init__(self, p: int, degrees: Iterable[int], moduli=None, seed: int = 0):
        degrees = tuple(int(d) for d in degrees)
        if any(d < 1 for d in degrees):
            raise ValueError("extension degrees must be >= 1")
        self.p = p
        self.degrees = degrees
        self.seed = seed
        levels = [PrimeField(p)]
        for i, e in enumerate(degrees):
            K = levels[-1]
            given = moduli[i] if moduli is not None and i < len(moduli) else None
            if given is not None:
                g = [int(c) for c in given]
                if len(g) != e + 1 or g[-1] != 1 or not is_irreducible(K, g):
                    raise ValueError(f"level {i + 1} modulus {g} is not monic irreducible of degree {e}")
            else:
                g = random_irreducible(K, e, random.Random(seed * 1_000_003 + i))
            levels.append(ExtensionField(K, g))
        self.levels = tuple(levels)

    def __getitem__(self, i: int):
        return self.levels[i]

    def __len__(self) -> int:
        return len(self.levels)

    def __repr__(self) -> str:
        return f"FieldTower(p={self.p}, degrees={self.degrees})"

    @property
    def base(self) -> PrimeField:
        return self.levels[0]

    @property
    def moduli(self) -> list[list[int]]:
        return [list(L.modulus) for L in self.levels[1:]]

    def basis(self, level: int) -> list[int]:
        """Polynomial basis of level ``level`` over level ``level - 1``."""
        L = self.levels[level]
        return [L.base.size ** i for i in range(L.degree)]

    # the F_p < F_q < F_Q naming used for two-source codes
    @property
    def n(self) -> int:
        return self.degrees[0]

    @property
    def N(self) -> int:
        return self.degrees[1]

    @property
    def poly_q(self) -> list[int]:
        return list(self.levels[1].modulus)

    @property
    def poly_Q(self) -> list[int]:
        return list(self.levels[2].modulus)

    @property
    def basis_q(self) -> list[int]:
        return self.basis(1)

    @property
    def basis_Q(self) -> list[int]:
        return self.basis(2)

    def elem(self, level: int, value: int) -> "Elem":
        return Elem(self.levels[level], value)

    def embed(self, a: "Elem") -> "Elem":
        if a.field.level + 1 >= len(self.levels) or self.levels[a.field.level] is not a.field:
            raise LevelMismatch("no next level for this element in this tower")
        return Elem(self.levels[a.field.level + 1], a.value)

    def fold(self, A: "Mat") -> "Mat":
        return fold(A, self.levels[A.field.level + 1])

    def to_dict(self) -> dict:
        return {"p": self.p, "degrees": list(self.degrees), "moduli": self.moduli, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldTower":
        return cls(d["p"], d["degrees"], moduli=d.get("moduli"), seed=d.get("seed", 0))


def common_field(F, G):
    if F is G:
        return F
    if F.contains(G):
        return F
    if G.contains(F):
        return G
    raise LevelMismatch(f"{F!r} and {G!r} are not in one tower")


@dataclass(frozen=True)
class Elem:
    """A field element tagged with its level; operands at lower levels are embedded."""

    field: object
    value: int

    @property
    def level(self) -> int:
        return self.field.level

    @property
    def coeffs(self) -> tuple["Elem", ...]:
        F = self.field
        if F.base is None:
            return (self,)
        return tuple(Elem(F.base, c) for c in F.coeffs(self.value))

    def _coerce(self, other):
        if isinstance(other, Elem):
            F = common_field(self.field, other.field)
            return F, self.value, other.value
        if isinstance(other, int):
            if self.field.base is None:
                return self.field, self.value, other % self.field.p
            if 0 <= other < self.field.p:
                return self.field, self.value, other
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F, a, b = c
        return Elem(F, F.add(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F, a, b = c
        return Elem(F, F.sub(a, b))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F, a, b = c
        return Elem(F, F.sub(b, a))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F, a, b = c
        return Elem(F, F.mul(a, b))

    __rmul__ = __mul__

    def __neg__(self):
        return Elem(self.field, self.field.neg(self.value))

    def inv(self) -> "Elem":
        return Elem(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F, a, b = c
        return Elem(F, F.mul(a, F.inv(b)))

    def __pow__(self, k: int) -> "Elem":
        return Elem(self.field, self.field.pow(self.value, k))

    def frob(self, times: int = 1) -> "Elem":
        return Elem(self.field, self.field.frob(self.value, times))

    def __bool__(self) -> bool:
        return bool(self.value)

    def __repr__(self) -> str:
        return f"Elem({self.value} @ {self.field!r})"


class Mat:
    """Immutable dense matrix of ints over one tower level."""

    __slots__ = ("field", "rows", "ncols")

    def __init__(self, field, rows: Iterable[Iterable[int]], ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ShapeMismatch("ragged rows")
        self.field = field
        self.rows = rows
        self.ncols = ncols

    # construction ----------------------------------------------------------
    @classmethod
    def zeros(cls, field, nrows: int, ncols: int) -> "Mat":
        return cls(field, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, field, n: int) -> "Mat":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def random(cls, field, nrows: int, ncols: int, rng: random.Random) -> "Mat":
        return cls(field, [[field.random(rng) for _ in range(ncols)] for _ in range(nrows)], ncols)

    @classmethod
    def from_elems(cls, rows: Sequence[Sequence[Elem]]) -> "Mat":
        F = None
        for r in rows:
            for a in r:
                F = a.field if F is None else common_field(F, a.field)
        return cls(F, [[a.value for a in r] for r in rows])

    # shape and access ------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @property
    def level(self) -> int:
        return self.field.level

    def __getitem__(self, key):
        if isinstance(key, tuple):
            ri, ci = key
        else:
            ri, ci = key, slice(None)
        if isinstance(ri, int) and isinstance(ci, int):
            return self.rows[ri][ci]
        rsel = _indices(ri, self.nrows)
        csel = _indices(ci, self.ncols)
        return Mat(self.field, [[self.rows[i][j] for j in csel] for i in rsel], len(csel))

    def elem(self, i: int, j: int) -> Elem:
        return Elem(self.field, self.rows[i][j])

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @property
    def T(self) -> "Mat":
        return Mat(self.field, [list(c) for c in zip(*self.rows)] if self.rows else [[] for _ in range(self.ncols)], self.nrows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def embed(self, field) -> "Mat":
        if not field.contains(self.field):
            raise LevelMismatch(f"cannot embed {self.field!r} into {field!r}")
        return Mat(field, self.rows, self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows and (
            self.field is other.field or self.field.contains(other.field) or other.field.contains(self.field)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        return f"Mat({self.nrows}x{self.ncols} @ {self.field!r}, {self.to_lists()})"

    # arithmetic --------------------------------------------------------------
    def _binary(self, other: "Mat", op: str) -> "Mat":
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        F = common_field(self.field, other.field)
        if F.base is None:
            p = F.p
            if op == "add":
                rows = [[(a + b) % p for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
            else:
                rows = [[(a - b) % p for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        else:
            f = F.add if op == "add" else F.sub
            rows = [[f(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Mat(F, rows, self.ncols)

    def __add__(self, other: "Mat") -> "Mat":
        return self._binary(other, "add")

    def __sub__(self, other: "Mat") -> "Mat":
        return self._binary(other, "sub")

    def __neg__(self) -> "Mat":
        F = self.field
        return Mat(F, [[F.neg(a) for a in r] for r in self.rows], self.ncols)

    def scale(self, c: int) -> "Mat":
        F = self.field
        return Mat(F, [[F.mul(c, a) for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        F = common_field(self.field, other.field)
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        if F.base is None:
            p = F.p
            rows = [[sum(a * b for a, b in zip(r, c)) % p for c in cols] for r in self.rows]
        else:
            rows = [[_dot(F, r, c) for c in cols] for r in self.rows]
        return Mat(F, rows, other.ncols)

    @staticmethod
    def hstack(*mats: "Mat") -> "Mat":
        F = mats[0].field
        for M in mats[1:]:
            F = common_field(F, M.field)
        n = mats[0].nrows
        if any(M.nrows != n for M in mats):
            raise ShapeMismatch("hstack needs equal row counts")
        rows = [sum((M.rows[i] for M in mats), ()) for i in range(n)]
        return Mat(F, rows, sum(M.ncols for M in mats))

    @staticmethod
    def vstack(*mats: "Mat") -> "Mat":
        F = mats[0].field
        for M in mats[1:]:
            F = common_field(F, M.field)
        c = mats[0].ncols
        if any(M.ncols != c for M in mats):
            raise ShapeMismatch("vstack needs equal column counts")
        return Mat(F, [r for M in mats for r in M.rows], c)


def _indices(key, n: int) -> list[int]:
    if isinstance(key, slice):
        return list(range(n))[key]
    if isinstance(key, int):
        return [key]
    return list(key)


def _dot(F, r, c) -> int:
    acc = 0
    add, mul = F.add, F.mul
    for a, b in zip(r, c):
        if a and b:
            acc = add(acc, mul(a, b))
    return acc


def fold(A: Mat, field) -> Mat:
    """Fold each run of ``field.degree`` entries of a row over ``field.base`` into one entry."""
    if field.base is None or not field.base.contains(A.field):
        raise LevelMismatch(f"cannot fold {A.field!r} into {field!r}")
    e = field.degree
    if A.ncols % e:
        raise ColsNotDivisible(f"{A.ncols} columns not divisible by {e}")
    fc = field.from_coeffs
    rows = [[fc(r[j:j + e]) for j in range(0, A.ncols, e)] for r in A.rows]
    return Mat(field, rows, A.ncols // e)


def unfold(B: Mat) -> Mat:
    """Expand every entry into its coordinate row one level down."""
    F = B.field
    if F.base is None:
        raise BaseLevelHasNoUnfold("F_p matrices have no unfolding")
    co = F.coeffs
    rows = [[x for a in r for x in co(a)] for r in B.rows]
    return Mat(F.base, rows, B.ncols * F.degree)


def fold_to(A: Mat, field) -> Mat:
    """Fold repeatedly until the matrix lives over ``field``."""
    chain = []
    f = field
    while f is not A.field:
        if f is None:
            raise LevelMismatch(f"{field!r} is not above {A.field!r}")
        chain.append(f)
        f = f.base
    for f in reversed(chain):
        A = fold(A, f)
    return A


def unfold_to(B: Mat, field) -> Mat:
    while B.field is not field:
        if B.field.base is None:
            raise LevelMismatch(f"{field!r} is not below {B.field!r}")
        B = unfold(B)
    return B

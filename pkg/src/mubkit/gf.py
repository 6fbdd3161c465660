"""Arithmetic in GF(p^n) with integer-indexed elements.

An element is encoded as the integer whose base-p digits are the coefficients
of its polynomial representative (lowest degree first).  Index 0 is the
additive zero, index 1 the multiplicative identity, and for n = 1 the index is
simply the residue mod p.

All arithmetic goes through precomputed q x q tables, which keeps the hot
loops in the downstream modules down to numpy fancy indexing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np


class FieldError(ValueError):
    pass


class NonPrimeError(FieldError):
    pass


class ReducibleModulusError(FieldError):
    pass


class FieldMismatchError(FieldError):
    pass


# Conway polynomials (low degree first) for the small fields used downstream.
CONWAY = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, n) with q = p^n, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            return (p, n) if r == 1 else None
    return None


# -- polynomials over F_p as coefficient tuples, low degree first --------------

def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _polymod(a, m, p):
    a = [x % p for x in a]
    m = _trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m) and any(a):
        a = _trim(a)
        if len(a) < len(m):
            break
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mc) % p
        a = _trim(a)
    return _trim(a)


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..n//2."""
    m = _trim([c % p for c in modulus])
    n = len(m) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if _polymod(m, divisor, p) == [0]:
                return False
    return True


def _index_to_coeffs(i: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(i % p)
        i //= p
    return out


def _coeffs_to_index(c, p: int) -> int:
    return sum(int(x) * p**k for k, x in enumerate(c))


@dataclass(frozen=True, eq=False)
class Field:
    """GF(p^n) with full addition, multiplication and trace tables."""

    p: int
    n: int
    modulus: tuple[int, ...]
    q: int = field(init=False)
    add_table: np.ndarray = field(init=False, repr=False)
    mul_table: np.ndarray = field(init=False, repr=False)
    neg_table: np.ndarray = field(init=False, repr=False)
    inv_table: np.ndarray = field(init=False, repr=False)
    trace_table: np.ndarray = field(init=False, repr=False)
    exp_table: np.ndarray = field(init=False, repr=False)
    log_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p, n = self.p, self.n
        q = p**n
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("q", q)

        coeffs = np.array([_index_to_coeffs(i, p, n) for i in range(q)], dtype=np.int64)
        weights = p ** np.arange(n, dtype=np.int64)
        add = ((coeffs[:, None, :] + coeffs[None, :, :]) % p) @ weights

        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                prod = np.convolve(coeffs[a], coeffs[b]) % p
                r = _polymod(list(prod), self.modulus, p) if n > 1 else [int(prod[0]) % p]
                mul[a, b] = mul[b, a] = _coeffs_to_index(r, p)

        neg = np.array([np.flatnonzero(add[a] == 0)[0] for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = np.flatnonzero(mul[a] == 1)[0]

        gen = _coeffs_to_index(_root_of(self.modulus, p), p)
        exp = np.ones(q - 1, dtype=np.int64)
        for k in range(1, q - 1):
            exp[k] = mul[exp[k - 1], gen]
        if len(set(exp.tolist())) != q - 1:
            raise FieldError(f"modulus {self.modulus} is not primitive over F_{p}")
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)

        # tr(x) = x + x^p + ... + x^(p^(n-1))
        trace = np.zeros(q, dtype=np.int64)
        for x in range(q):
            acc, power = 0, x
            for _ in range(n):
                acc = add[acc, power]
                power = _pow_table(mul, power, p)
            if acc >= p:
                raise FieldError("trace left the prime subfield")
            trace[x] = acc

        for name, arr in [("add_table", add), ("mul_table", mul), ("neg_table", neg),
                          ("inv_table", inv), ("trace_table", trace),
                          ("exp_table", exp), ("log_table", log)]:
            arr.setflags(write=False)
            set_(name, arr)

    # -- element helpers ----------------------------------------------------
    def __call__(self, index: int) -> "FieldElement":
        return FieldElement(self, int(index) % self.q if index < 0 else int(index))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def from_int(self, k: int) -> int:
        """Index of the prime-subfield element k mod p."""
        return int(k) % self.p

    # integer-level ops, used by the numeric modules
    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        return self.inv_table[a]

    def neg(self, a):
        return self.neg_table[a]

    def tr(self, a):
        return self.trace_table[a]

    def power(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k > 0 else 1
        return int(self.exp_table[(self.log_table[a] * k) % (self.q - 1)])

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.n, self.modulus) == (
            other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __repr__(self):
        return f"GF({self.q})"


def _pow_table(mul, x, k):
    out = 1
    for _ in range(k):
        out = mul[out, x]
    return int(out)


def _root_of(modulus, p):
    """Coefficients of the canonical root: x for n > 1, -m_0 for linear moduli."""
    m = _trim(modulus)
    if len(m) == 2:
        inv_lead = pow(m[1], p - 2, p)
        return [(-m[0] * inv_lead) % p]
    return [0, 1]


def _first_primitive_poly(p: int, n: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=n):
        cand = tuple(reversed(low)) + (1,)
        if cand[0] == 0 or not is_irreducible(cand, p):
            continue
        try:
            Field(p, n, cand)
        except FieldError:
            continue
        return cand
    raise FieldError(f"no primitive polynomial found for GF({p}^{n})")


@lru_cache(maxsize=None)
def _field_cached(p, n, modulus):
    return Field(p, n, modulus)


def field_new(p: int, n: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Build GF(p^n).

    Without a modulus the Conway polynomial is used when tabulated, otherwise
    the first primitive polynomial in digit order.  A supplied modulus must be
    irreducible and primitive (its root becomes the primitive element).
    """
    if not is_prime(p):
        raise NonPrimeError(f"{p} is not prime")
    if n < 1:
        raise FieldError("degree n must be >= 1")
    if modulus is None:
        if (p, n) in CONWAY:
            modulus = CONWAY[(p, n)]
        elif n == 1:
            g = next(g for g in range(1, p) if _mult_order(g, p) == p - 1)
            modulus = ((-g) % p, 1)
        else:
            modulus = _first_primitive_poly(p, n)
    modulus = tuple(int(c) % p for c in modulus)
    if len(_trim(modulus)) - 1 != n:
        raise FieldError(f"modulus degree {len(_trim(modulus)) - 1} != n = {n}")
    if not is_irreducible(modulus, p):
        raise ReducibleModulusError(f"{modulus} is reducible over F_{p}")
    return _field_cached(p, n, modulus)


def field_for_q(q: int) -> Field:
    pn = prime_power(q)
    if pn is None:
        raise FieldError(f"{q} is not a prime power")
    return field_new(*pn)


def field_from_json(obj: dict) -> Field:
    return field_new(int(obj["p"]), int(obj["n"]), obj.get("modulus"))


def _mult_order(g, p):
    k, x = 1, g % p
    while x != 1:
        x = x * g % p
        k += 1
    return k


@dataclass(frozen=True)
class FieldElement:
    """Element of a Field, for user-facing scalar arithmetic."""

    field: Field
    index: int

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return FieldElement(self.field, self.field.from_int(other))
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return FieldElement(self.field, int(self.field.add(self.index, o.index)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        return FieldElement(self.field, int(self.field.sub(self.index, o.index)))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        return FieldElement(self.field, int(self.field.mul(self.index, o.index)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o.index == 0:
            raise ZeroDivisionError("division by zero in %r" % self.field)
        return self * o.inverse()

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg(self.index)))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(self.field, self.field.power(self.index, k))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.inv(self.index)))

    def trace(self) -> int:
        return int(self.field.tr(self.index))

    def order(self) -> int:
        if self.index == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        k, x = 1, self
        while x.index != 1:
            x = x * self
            k += 1
        return k

    def __int__(self):
        return self.index

    def __repr__(self):
        return f"{self.field!r}[{self.index}]"


def gf_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    ops = {"add": FieldElement.__add__, "sub": FieldElement.__sub__,
           "mul": FieldElement.__mul__, "div": FieldElement.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    return ops[op](a, b)


def gf_trace(x: FieldElement) -> int:
    return x.trace()


def primitive_element(f: Field) -> FieldElement:
    return FieldElement(f, int(f.exp_table[1]) if f.q > 2 else 1)


@dataclass(frozen=True)
class PhasePoint:
    """A vector (u1, u2) of F_q^2, stored as element indices."""

    u1: int
    u2: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.u1, self.u2)


@dataclass(frozen=True)
class Ray:
    representative: PhasePoint
    points: tuple[PhasePoint, ...]


def rays(f: Field) -> list[Ray]:
    """The q+1 one-dimensional subspaces of F_q^2.

    Order: (0, 1) first, then (1, m) for m in index order, so that ray 0 is
    the diagonal Z subgroup and ray 1 the shift subgroup.
    """
    reps = [(0, 1)] + [(1, m) for m in range(f.q)]
    out = []
    for u1, u2 in reps:
        pts = tuple(PhasePoint(int(f.mul(a, u1)), int(f.mul(a, u2))) for a in range(f.q))
        out.append(Ray(PhasePoint(u1, u2), pts))
    return out

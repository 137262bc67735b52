"""Prime fields, extension fields GF(p^m) and the number theory around them.

Elements of GF(p^m) are encoded as integers in [0, p^m): base-p digit i is
the coefficient of x^i in the polynomial basis. GF(p) elements are plain
integers in [0, p).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

# hard cap on field size; exp/log tables are materialized
MAX_FIELD_ORDER = 1 << 24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    return p


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def mult_order(p: int, L: int) -> int:
    """Smallest m >= 1 with p^m = 1 (mod L)."""
    if L < 1:
        raise ValueError("L must be positive")
    if gcd(p, L) != 1:
        raise ValueError(f"gcd(p={p}, L={L}) != 1")
    if L == 1:
        return 1
    m, acc = 1, p % L
    while acc != 1:
        acc = acc * p % L
        m += 1
    return m


def euler_totient(L: int) -> int:
    if L < 1:
        raise ValueError("L must be positive")
    result = L
    for q in prime_factors(L):
        result -= result // q
    return result


def scalar_L_in_GFp(p: int, L: int) -> tuple[int, int]:
    """Return (L mod p, (L mod p)^-1) in GF(p)."""
    check_prime(p)
    val = L % p
    if val == 0:
        raise ValueError(f"L = {L} vanishes in GF({p})")
    return val, pow(val, p - 2, p)


# ---------------------------------------------------------------------------
# dense polynomials over GF(p), coefficient lists low degree first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        _trim(a)
    return a


def poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 1)
    while a and len(a) - 1 >= db:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        q[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        _trim(a)
    return _trim(q), a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Monic gcd over GF(p)."""
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    if not a:
        return []
    inv = pow(a[-1], p - 2, p)
    return [x * inv % p for x in a]


def _poly_powmod_x(e: int, f: Sequence[int], p: int) -> list[int]:
    """x^e mod f."""
    result = [1]
    base = poly_mod([0, 1], f, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), f, p)
        base = poly_mod(poly_mul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of f over GF(p): no factor of degree <= deg/2.

    Uses gcd(f, x^{p^i} - x) = 1 for i = 1 .. deg/2, which also rules out
    roots (i = 1).
    """
    f = _trim([x % p for x in f])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    for i in range(1, m // 2 + 1):
        xp = _poly_powmod_x(p**i, f, p)
        if len(poly_gcd(f, poly_sub(xp, [0, 1], p), p)) > 1:
            return False
    return True


def _int_to_digits(v: int, p: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        out.append(v % p)
        v //= p
    return tuple(out)


def _digits_to_int(d: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(d):
        v = v * p + c
    return v


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree m with the smallest base-p value.

    The low coefficients c_0..c_{m-1} are read as base-p digits with c_0 the
    least significant; a zero constant term is skipped, so m = 1 gives x + 1.
    """
    check_prime(p)
    if m < 1:
        raise ValueError("degree must be >= 1")
    for v in range(p**m):
        low = _int_to_digits(v, p, m)
        if low[0] == 0:
            continue
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------


class ExtField:
    """GF(p^m) in the polynomial basis modulo a monic irreducible polynomial.

    Elements are integers; the field keeps exp/log tables relative to a
    deterministic generator (the smallest element of full order).
    """

    def __init__(self, p: int, m: int, modulus: Sequence[int] | None = None):
        check_prime(p)
        if m < 1:
            raise ValueError("degree must be >= 1")
        if p**m > MAX_FIELD_ORDER:
            raise ValueError(f"GF({p}^{m}) exceeds the supported size")
        if modulus is None:
            modulus = smallest_irreducible(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.order = p**m
        self._build_tables()

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.order
        # multiplication by x on digit vectors, used to walk powers of a candidate
        neg_mod = [(-c) % p for c in self.modulus[:m]]

        def mul_slow(a: int, b: int) -> int:
            ad = _int_to_digits(a, p, m)
            bd = _int_to_digits(b, p, m)
            prod = [0] * (2 * m - 1)
            for i, x in enumerate(ad):
                if x:
                    for j, y in enumerate(bd):
                        prod[i + j] = (prod[i + j] + x * y) % p
            for d in range(2 * m - 2, m - 1, -1):
                c = prod[d]
                if c:
                    prod[d] = 0
                    for i in range(m):
                        prod[d - m + i] = (prod[d - m + i] + c * neg_mod[i]) % p
            return _digits_to_int(prod[:m], p)

        factors = prime_factors(q - 1)
        gen = None
        for cand in range(1, q):
            if q == 2:
                gen = 1
                break
            if all(self._pow_slow(cand, (q - 1) // r, mul_slow) != 1 for r in factors):
                gen = cand
                break
        assert gen is not None
        self.generator = gen
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = mul_slow(acc, gen)
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        self._exp = exp
        self._log = log
        self.exp_table = np.array(exp, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        # Zech logarithms: g^zech[n] = 1 + g^n, -1 where 1 + g^n = 0
        zech = np.full(max(q - 1, 1), -1, dtype=np.int64)
        if m > 1:
            for n in range(q - 1):
                s = self._add_digits(1, exp[n])
                if s:
                    zech[n] = log[s]
        self.zech_table = zech

    @staticmethod
    def _pow_slow(a: int, e: int, mul) -> int:
        result = 1
        while e:
            if e & 1:
                result = mul(result, a)
            a = mul(a, a)
            e >>= 1
        return result

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        out, place = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * place
            a //= p
            b //= p
            place *= p
        return out

    # -- scalar arithmetic on integer codes ---------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = int(self.zech_table[(self._log[b] - la) % (self.order - 1)])
        return 0 if z < 0 else self._exp[la + z]

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        p = self.p
        out, place = 0, 1
        while a:
            out += ((-(a % p)) % p) * place
            a //= p
            place *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(p^m)")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    # -- vectorized arithmetic on integer arrays -----------------------------

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        a, b = np.broadcast_arrays(a, b)
        la = self.log_table[a]
        z = self.zech_table[(self.log_table[b] - la) % (self.order - 1)]
        out = np.where(z < 0, 0, self.exp_table[la + np.maximum(z, 0)])
        out = np.where(a == 0, b, out)
        return np.where(b == 0, a, out)

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.asarray(a, dtype=np.int64)
        return self.vmul(a, self.p - 1)

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def from_int(self, c: int) -> int:
        """Embed c in GF(p) into the field."""
        return c % self.p

    def in_base_field(self, a: int) -> bool:
        return a < self.p

    def mult_order_of(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.order - 1
        return n // gcd(n, self._log[a])

    def elem(self, value: int) -> "ExtElem":
        return ExtElem(self, value)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return _int_to_digits(a, self.p, self.m)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExtField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    def __repr__(self) -> str:
        return f"ExtField(p={self.p}, m={self.m}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def build_ext_field(p: int, m: int) -> ExtField:
    """GF(p^m) over the smallest monic irreducible modulus (cached)."""
    return ExtField(p, m)


@dataclass(frozen=True)
class ExtElem:
    """Element of an ExtField with operator overloading; mostly for APIs and tests."""

    field: ExtField
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def _coerce(self, other) -> int:
        if isinstance(other, ExtElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        return ExtElem(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return ExtElem(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return ExtElem(self.field, self.field.sub(self._coerce(other), self.value))

    def __neg__(self):
        return ExtElem(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return ExtElem(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ExtElem(self.field, self.field.div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        return ExtElem(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "ExtElem":
        return ExtElem(self.field, self.field.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.value == self.field.from_int(other) and other % self.field.p == other
        return isinstance(other, ExtElem) and other.field == self.field and other.value == self.value

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __repr__(self) -> str:
        return f"ExtElem({self.value}, coeffs={self.coeffs})"


def primitive_root_of_unity(F: ExtField, L: int) -> ExtElem:
    """beta = g^((q-1)/L) for the field's deterministic generator g."""
    q = F.order
    if (q - 1) % L:
        raise ValueError(f"L = {L} does not divide {q} - 1")
    beta = F.pow(F.generator, (q - 1) // L)
    assert F.pow(beta, L) == 1
    for r in prime_factors(L):
        assert F.pow(beta, L // r) != 1
    return ExtElem(F, beta)


def field_for(p: int, L: int) -> tuple[ExtField, ExtElem]:
    """The field GF(p^{m_L}) and its primitive L-th root of unity."""
    F = build_ext_field(p, mult_order(p, L))
    return F, primitive_root_of_unity(F, L)

"""Arithmetic in GF(2^n) for 1 <= n <= 24.

Elements are plain Python ints holding the coefficient vector in the
polynomial basis (bit i is the coefficient of x^i), so addition is ``^``.
A :class:`FieldCtx` carries the modulus and, lazily, exp/log tables used by
the vectorized routines that enumerate whole domains.
"""

from __future__ import annotations

import functools
import json
import os
import threading

import numpy as np

from ._backend import kernels
from .errors import (
    DegreeOutOfRange,
    DivisionByZero,
    NotADivisor,
    NotInvertible,
    ParseError,
    ReducibleModulus,
)

MAX_DEGREE = 24

# Numerically smallest irreducible polynomial of each degree (bit i = coeff of x^i).
MODULUS_TABLE = {
    1: 0x2, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
}

MODULUS_TABLE_ENV = "GF2TO1_MODULUS_TABLE"

# Scalar mul/pow go through Python-list log tables up to this degree.
_LIST_TABLE_MAX = 16


def _xmod(a: int, b: int) -> int:
    bl = b.bit_length()
    while a.bit_length() >= bl:
        a ^= b << (a.bit_length() - bl)
    return a


def is_irreducible(modulus: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    n = modulus.bit_length() - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for p in range(1 << d, 1 << (d + 1)):
            if _xmod(modulus, p) == 0:
                return False
    return True


def load_modulus_table(path: str | None = None) -> dict[int, int]:
    """The built-in table, overridden by a JSON file ``{"degree": "0x.."}``.

    The file defaults to the one named by ``$GF2TO1_MODULUS_TABLE``.
    """
    return dict(_modulus_table(path or os.environ.get(MODULUS_TABLE_ENV)))


@functools.lru_cache(maxsize=8)
def _modulus_table(path: str | None) -> dict[int, int]:
    table = dict(MODULUS_TABLE)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
            for k, v in raw.items():
                table[int(k)] = int(v, 16) if isinstance(v, str) else int(v)
        except (OSError, ValueError, AttributeError) as exc:
            raise ParseError(f"cannot read modulus table {path!r}: {exc}") from None
    return table


_MODULUS_OVERRIDES: dict[int, int] = {}


def set_modulus_override(n: int, modulus: int | None) -> None:
    """Make ``create_context(n)`` use ``modulus`` (None clears the override)."""
    if modulus is None:
        _MODULUS_OVERRIDES.pop(n, None)
    else:
        FieldCtx(n, modulus)  # validates degree and irreducibility
        _MODULUS_OVERRIDES[n] = modulus


def default_modulus(n: int) -> int:
    if n in _MODULUS_OVERRIDES:
        return _MODULUS_OVERRIDES[n]
    return _modulus_table(os.environ.get(MODULUS_TABLE_ENV))[n]


def _prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def fmt_elem(a: int) -> str:
    return f"{a:#x}"


def parse_elem(s, ctx: "FieldCtx | None" = None) -> int:
    """Parse a ``0x``-prefixed hex element, checking range against ``ctx``."""
    if not isinstance(s, str) or not s.lower().startswith("0x"):
        raise ParseError(f"expected a 0x-prefixed hex element, got {s!r}")
    try:
        a = int(s, 16)
    except ValueError:
        raise ParseError(f"malformed hex element {s!r}") from None
    if ctx is not None and a >= ctx.order:
        raise ParseError(f"{s} is not an element of GF(2^{ctx.n})")
    return a


class FieldCtx:
    """A concrete GF(2^n) given by an irreducible modulus.

    The context is immutable; tables are derived data built on first use
    (under a lock) and shared by all callers.
    """

    def __init__(self, n: int, modulus: int | None = None):
        if not isinstance(n, int) or not 1 <= n <= MAX_DEGREE:
            raise DegreeOutOfRange(f"degree must lie in [1, {MAX_DEGREE}], got {n!r}")
        if modulus is None:
            modulus = default_modulus(n)
        if modulus.bit_length() - 1 != n:
            raise ReducibleModulus(f"modulus {modulus:#x} does not have degree {n}")
        if not is_irreducible(modulus):
            raise ReducibleModulus(f"modulus {modulus:#x} is reducible over F2")
        self.n = n
        self.modulus = modulus
        self.order = 1 << n
        self.mask = self.order - 1
        self._m1 = self.order - 1
        self._lock = threading.Lock()
        self._exp = None
        self._log = None
        self._lists = None
        self._linear_cache: dict = {}

    def __repr__(self):
        return f"FieldCtx(n={self.n}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.n, self.modulus) == (other.n, other.modulus)

    def __hash__(self):
        return hash((self.n, self.modulus))

    def to_json(self) -> dict:
        return {"n": self.n, "modulus": fmt_elem(self.modulus)}

    def parse(self, s) -> int:
        return parse_elem(s, self)

    # -- tables ---------------------------------------------------------

    @functools.cached_property
    def generator(self) -> int:
        """Smallest element of multiplicative order 2^n - 1."""
        m1 = self._m1
        if m1 == 1:
            return 1
        factors = _prime_factors(m1)
        for g in range(2, self.order):
            if all(self._pow_slow(g, m1 // p) != 1 for p in factors):
                return g
        raise AssertionError("no primitive element found")  # pragma: no cover

    def _build_tables(self):
        with self._lock:
            if self._exp is None:
                exp = kernels.build_exp_table(self.n, self.modulus, self.generator)
                log = np.full(self.order, -1, dtype=np.int64)
                log[exp] = np.arange(self._m1, dtype=np.int64)
                self._log = log
                self._exp = exp

    @property
    def exp(self) -> np.ndarray:
        if self._exp is None:
            self._build_tables()
        return self._exp

    @property
    def log(self) -> np.ndarray:
        if self._log is None:
            self._build_tables()
        return self._log

    def _tables_list(self):
        if self._lists is None:
            self._lists = (self.exp.tolist(), self.log.tolist())
        return self._lists

    # -- scalar arithmetic -----------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self.n <= _LIST_TABLE_MAX:
            e, lg = self._tables_list()
            return e[(lg[a] + lg[b]) % self._m1]
        return kernels.mulmod(a, b, self.modulus, self.n)

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = kernels.mulmod(r, a, self.modulus, self.n)
            a = kernels.mulmod(a, a, self.modulus, self.n)
            e >>= 1
        return r

    def pow(self, a: int, e: int) -> int:
        """a**e with 0**0 == 1; the exponent is reduced mod 2^n - 1 only for a != 0."""
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.n <= _LIST_TABLE_MAX:
            ex, lg = self._tables_list()
            return ex[(lg[a] * e) % self._m1]
        return self._pow_slow(a, e % self._m1)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise DivisionByZero(f"division of {a:#x} by 0")
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int, j: int) -> int:
        """a^(2^j); j is taken mod n."""
        for _ in range(j % self.n):
            a = self.mul(a, a)
        return a

    def sqrt(self, a: int) -> int:
        return self.frobenius(a, self.n - 1)

    def trace_abs(self, a: int) -> int:
        t, x = 0, a
        for _ in range(self.n):
            t ^= x
            x = self.mul(x, x)
        return t

    def trace_rel(self, a: int, m: int) -> int:
        """Tr^n_m(a) = sum of a^(2^(m*i)), i < n/m; lands in GF(2^m)."""
        if m < 1 or self.n % m:
            raise NotADivisor(f"{m} does not divide {self.n}")
        t, x = 0, a
        for _ in range(self.n // m):
            t ^= x
            x = self.frobenius(x, m)
        return t

    def trace_sub(self, a: int, d: int) -> int:
        """Absolute trace of ``a`` viewed as an element of the subfield GF(2^d)."""
        t, x = 0, a
        for _ in range(d):
            t ^= x
            x = self.mul(x, x)
        return t

    def in_subfield(self, a: int, d: int) -> bool:
        if self.n % d:
            raise NotADivisor(f"{d} does not divide {self.n}")
        return self.frobenius(a, d) == a

    def subfield_elements(self, d: int) -> np.ndarray:
        """Sorted members of GF(2^d) inside this field."""
        if d < 1 or self.n % d:
            raise NotADivisor(f"{d} does not divide {self.n}")
        if d == self.n:
            return self.elements()
        step = self._m1 // ((1 << d) - 1)
        vals = self.exp[::step][: (1 << d) - 1]
        return np.sort(np.concatenate([np.zeros(1, dtype=np.uint32), vals]))

    def mu(self, d: int) -> np.ndarray:
        """Sorted members of the order-d subgroup of the multiplicative group."""
        if self._m1 % d:
            raise NotADivisor(f"{d} does not divide 2^{self.n} - 1")
        return np.sort(self.exp[:: self._m1 // d][:d])

    # -- vectorized helpers ----------------------------------------------

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.uint32)

    def linear_table(self, images) -> np.ndarray:
        """Values at every element of the F2-linear map with the given basis images."""
        key = tuple(int(v) for v in images)
        table = self._linear_cache.get(key)
        if table is None:
            table = kernels.linear_table(np.asarray(key, dtype=np.uint32), self.n)
            if len(self._linear_cache) < 64:
                self._linear_cache[key] = table
        return table

    def trace_table(self, m: int) -> np.ndarray:
        return self.linear_table([self.trace_rel(1 << i, m) for i in range(self.n)])

    def pow_vec(self, xs: np.ndarray, e: int, c: int = 1) -> np.ndarray:
        """``c * xs**e`` elementwise."""
        xs = np.ascontiguousarray(xs, dtype=np.uint32)
        out = np.zeros(xs.shape[0], dtype=np.uint32)
        kernels.term_accumulate(out, xs, xs, c, 0, e, self.exp, self.log)
        return out

    def mul_vec(self, xs: np.ndarray, ys) -> np.ndarray:
        """Elementwise product of two arrays, or of an array and a scalar."""
        xs = np.ascontiguousarray(xs, dtype=np.uint32)
        if np.isscalar(ys):
            return self.pow_vec(xs, 1, int(ys))
        ys = np.ascontiguousarray(ys, dtype=np.uint32)
        out = np.zeros(xs.shape[0], dtype=np.uint32)
        kernels.term_accumulate(out, xs, ys, 1, 1, 1, self.exp, self.log)
        return out

    def inv_vec(self, xs: np.ndarray) -> np.ndarray:
        """Elementwise inverse with 0 mapped to 0 (x^(2^n - 2))."""
        return self.pow_vec(xs, self.order - 2)


@functools.lru_cache(maxsize=None)
def _cached_context(n: int, modulus: int | None) -> FieldCtx:
    return FieldCtx(n, modulus)


def create_context(n: int, modulus: int | None = None) -> FieldCtx:
    """Context for GF(2^n) with the tabulated (or supplied) modulus."""
    if not isinstance(n, int) or not 1 <= n <= MAX_DEGREE:
        raise DegreeOutOfRange(f"degree must lie in [1, {MAX_DEGREE}], got {n!r}")
    if modulus is None:
        modulus = default_modulus(n)
    return _cached_context(n, modulus)


def int_mod_inverse(e: int, M: int) -> int:
    """t with e*t == 1 (mod M) and 0 < t < M, by extended Euclid."""
    if M == 1:
        raise NotInvertible("modulus 1 has no units")
    r0, r1, s0, s1 = M, e % M, 0, 1
    while r1:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if r0 != 1:
        raise NotInvertible(f"gcd({e}, {M}) = {r0}")
    return s0 % M

"""Univariate polynomials over GF(2^n), resultants, the low-degree root
criteria, and F2-linear algebra for linearized maps."""

from __future__ import annotations

import random

import numpy as np

from .errors import DegreeTooLow, DivisionByZero, ZeroConstantTerm
from .field import FieldCtx, fmt_elem, parse_elem


class UniPoly:
    """Dense polynomial; ``coeffs[i]`` is the coefficient of x^i."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls, ctx):
        return cls(ctx, [0, 1])

    @classmethod
    def const(cls, ctx, c):
        return cls(ctx, [c])

    @classmethod
    def from_json(cls, ctx, data):
        return cls(ctx, [parse_elem(s, ctx) for s in data])

    def to_json(self):
        return [fmt_elem(c) for c in self.coeffs] or ["0x0"]

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"UniPoly({self.to_json()})"

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] ^= c
        return UniPoly(self.ctx, out)

    __sub__ = __add__

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        F = self.ctx
        if self.is_zero() or other.is_zero():
            return UniPoly(F, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] ^= F.mul(a, b)
        return UniPoly(F, out)

    def scale(self, c: int):
        return UniPoly(self.ctx, [self.ctx.mul(c, a) for a in self.coeffs])

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.ctx.inv(self.lead))

    def divmod(self, other):
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        F = self.ctx
        rem = list(self.coeffs)
        dq = other.deg
        inv_lead = F.inv(other.lead)
        quot = [0] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c:
                t = F.mul(c, inv_lead)
                quot[i - dq] = t
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] ^= F.mul(t, b)
        return UniPoly(F, quot), UniPoly(F, rem[:dq])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __call__(self, a: int) -> int:
        F = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.mul(acc, a) ^ c
        return acc

    def eval_all(self, xs: np.ndarray) -> np.ndarray:
        F = self.ctx
        xs = np.ascontiguousarray(xs, dtype=np.uint32)
        acc = np.zeros(xs.shape[0], dtype=np.uint32)
        for c in reversed(self.coeffs):
            acc = F.mul_vec(acc, xs) ^ np.uint32(c)
        return acc

    def compose(self, inner: "UniPoly"):
        """self(inner(x))."""
        acc = UniPoly(self.ctx, [])
        for c in reversed(self.coeffs):
            acc = acc * inner + UniPoly(self.ctx, [c])
        return acc


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd; gcd(p, 0) = monic(p)."""
    while not q.is_zero():
        p, q = q, p % q
    return p.monic()


def field_det(ctx: FieldCtx, rows) -> int:
    """Determinant by Gaussian elimination over the field (exact)."""
    a = [list(r) for r in rows]
    size = len(a)
    det = 1
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col]), None)
        if piv is None:
            return 0
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        det = ctx.mul(det, p)
        pinv = ctx.inv(p)
        for r in range(col + 1, size):
            f = a[r][col]
            if f:
                t = ctx.mul(f, pinv)
                row, prow = a[r], a[col]
                for j in range(col, size):
                    if prow[j]:
                        row[j] ^= ctx.mul(t, prow[j])
    return det


def sylvester_matrix(f: UniPoly, g: UniPoly):
    n, m = f.deg, g.deg
    size = n + m
    fa = list(reversed(f.coeffs))
    gb = list(reversed(g.coeffs))
    rows = []
    for i in range(m):
        rows.append([0] * i + fa + [0] * (size - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + gb + [0] * (size - m - 1 - i))
    return rows


def sylvester_resultant(f: UniPoly, g: UniPoly) -> int:
    if f.deg < 1 or g.deg < 1:
        raise DegreeTooLow(f"resultant needs positive degrees, got {f.deg} and {g.deg}")
    return field_det(f.ctx, sylvester_matrix(f, g))


# -- linearized maps ----------------------------------------------------------


def _eliminate(images, n):
    """Row-reduce basis images; returns (pivots, kernel combos).

    ``pivots`` maps a leading bit to (image, combination of basis indices).
    """
    pivots = {}
    kernel = []
    for i, img in enumerate(images):
        combo = 1 << i
        while img:
            p = img.bit_length() - 1
            hit = pivots.get(p)
            if hit is None:
                pivots[p] = (img, combo)
                break
            img ^= hit[0]
            combo ^= hit[1]
        if img == 0:
            kernel.append(combo)
    return pivots, kernel


class LinearizedMap:
    """An F2-linear map of GF(2^n), as sum c_j x^(2^j) and as a bit matrix.

    ``images[i]`` is the value at x^i, i.e. column i of the matrix in the
    polynomial basis. ``terms`` is None when the map was built from a table.
    """

    def __init__(self, ctx: FieldCtx, terms=None, images=None, check=True):
        self.ctx = ctx
        if terms is not None:
            merged: dict[int, int] = {}
            for c, j in terms:
                merged[j % ctx.n] = merged.get(j % ctx.n, 0) ^ c
            self.terms = tuple((c, j) for j, c in sorted(merged.items()) if c)
            if images is None:
                images = [self._eval_terms(1 << i) for i in range(ctx.n)]
        else:
            self.terms = None
        if images is None:
            raise ValueError("LinearizedMap needs terms or images")
        self.images = tuple(int(v) for v in images)
        if check and self.terms is not None:
            self._check()

    @classmethod
    def from_function(cls, ctx, fn):
        return cls(ctx, images=[fn(1 << i) for i in range(ctx.n)])

    @classmethod
    def trace_map(cls, ctx, m: int):
        """Tr^n_m as a linearized map."""
        from .errors import NotADivisor

        if ctx.n % m:
            raise NotADivisor(f"{m} does not divide {ctx.n}")
        return cls(ctx, terms=[(1, m * i) for i in range(ctx.n // m)])

    def _eval_terms(self, a: int) -> int:
        F = self.ctx
        acc = 0
        for c, j in self.terms:
            acc ^= F.mul(c, F.frobenius(a, j))
        return acc

    def _eval_terms_all(self, xs):
        F = self.ctx
        out = np.zeros(xs.shape[0], dtype=np.uint32)
        for c, j in self.terms:
            out ^= F.pow_vec(xs, 1 << j, c)
        return out

    def _check(self):
        F = self.ctx
        if F.n <= 12:
            xs = F.elements()
        else:
            rng = np.random.default_rng(F.n)
            xs = rng.integers(0, F.order, size=4096, dtype=np.uint32)
        if not np.array_equal(self.table[xs], self._eval_terms_all(xs)):
            raise AssertionError("matrix and term list disagree")  # pragma: no cover

    @property
    def matrix(self):
        """Rows of the n x n bit matrix; bit c of row r = bit r of images[c]."""
        n = self.ctx.n
        return [sum(((self.images[c] >> r) & 1) << c for c in range(n)) for r in range(n)]

    @property
    def table(self) -> np.ndarray:
        return self.ctx.linear_table(self.images)

    def __call__(self, a: int) -> int:
        acc = 0
        i = 0
        while a:
            if a & 1:
                acc ^= self.images[i]
            a >>= 1
            i += 1
        return acc

    def __add__(self, other):
        terms = None
        if self.terms is not None and other.terms is not None:
            terms = list(self.terms) + list(other.terms)
        return LinearizedMap(self.ctx, terms=terms,
                             images=[a ^ b for a, b in zip(self.images, other.images)],
                             check=False)

    def scale(self, c: int):
        F = self.ctx
        terms = None if self.terms is None else [(F.mul(c, a), j) for a, j in self.terms]
        return LinearizedMap(F, terms=terms, images=[F.mul(c, v) for v in self.images], check=False)

    def image_dim(self) -> int:
        return len(_eliminate(self.images, self.ctx.n)[0])


def linearized_kernel(L: LinearizedMap) -> list[int]:
    """A basis of ker L as field elements."""
    return _eliminate(L.images, L.ctx.n)[1]


def kernel_intersection(L1: LinearizedMap, L2: LinearizedMap) -> int:
    """dim(ker L1 ∩ ker L2)."""
    n = L1.ctx.n
    stacked = [a | (b << n) for a, b in zip(L1.images, L2.images)]
    return len(_eliminate(stacked, 2 * n)[1])


def solve_linearized(L: LinearizedMap, b: int) -> list[int]:
    """All x with L(x) = b: empty, or a coset of the kernel (sorted)."""
    pivots, kernel = _eliminate(L.images, L.ctx.n)
    x = 0
    while b:
        hit = pivots.get(b.bit_length() - 1)
        if hit is None:
            return []
        b ^= hit[0]
        x ^= hit[1]
    sols = [x]
    for k in kernel:
        sols += [s ^ k for s in sols]
    return sorted(sols)


# -- low-degree criteria ------------------------------------------------------


def solve_quadratic(ctx: FieldCtx, a: int, b: int) -> set[int]:
    """Roots of x^2 + a x + b in the field."""
    if a == 0:
        return {ctx.sqrt(b)}
    L = LinearizedMap(ctx, terms=[(1, 1), (a, 0)], check=False)
    roots = set(solve_linearized(L, b))
    for r in roots:
        assert ctx.mul(r, r) ^ ctx.mul(a, r) ^ b == 0
    return roots


def quadratic_solvable(ctx: FieldCtx, a: int, b: int) -> bool:
    """Trace criterion: x^2 + a x + b has a root iff a = 0 or Tr(b/a^2) = 0."""
    if a == 0:
        return True
    return ctx.trace_abs(ctx.div(b, ctx.mul(a, a))) == 0


def _subfield(ctx, degree):
    d = ctx.n if degree is None else degree
    return d, ctx.subfield_elements(d)


def cubic_unique_root(ctx: FieldCtx, a: int, b: int, degree: int | None = None):
    """(flag, root) for x^3 + a x + b over GF(2^degree) (default: the whole field).

    flag is the trace criterion Tr(a^3/b^2 + 1) != 0; when it holds the
    root is found by scanning the subfield and must be unique.
    """
    if b == 0:
        raise ZeroConstantTerm("cubic criterion needs b != 0")
    d, xs = _subfield(ctx, degree)
    F = ctx
    t = F.div(F.pow(a, 3), F.mul(b, b)) ^ 1
    flag = F.trace_sub(t, d) == 1
    vals = F.pow_vec(xs, 3) ^ F.mul_vec(xs, a) ^ np.uint32(b)
    roots = xs[vals == 0]
    if flag:
        assert roots.shape[0] == 1, f"criterion says unique root, scan found {roots.tolist()}"
        return True, int(roots[0])
    return False, None


def quartic_two_to_one(ctx: FieldCtx, a3: int, a2: int, a1: int, degree: int | None = None) -> bool:
    """Whether x^4 + a3 x^3 + a2 x^2 + a1 x is 2-to-1 on GF(2^degree)."""
    F = ctx
    d = ctx.n if degree is None else degree
    if a3 == 0 and a1 == 0:
        return a2 != 0
    if a3 == 0:
        return F.trace_sub(F.div(F.pow(a2, 3), F.mul(a1, a1)) ^ 1, d) != 0
    return d % 2 == 1 and F.mul(a2, a2) == F.mul(a1, a3)


def random_poly(ctx, deg, rng: random.Random, monic=False):
    cs = [rng.randrange(ctx.order) for _ in range(deg)]
    cs.append(1 if monic else rng.randrange(1, ctx.order))
    return UniPoly(ctx, cs)

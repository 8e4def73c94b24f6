"""Evaluable maps, enumerable domains, preimage profiles and the
involution a 2-to-1 map induces on its domain."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import (
    DomainNotFullField,
    InvolutionsDiffer,
    NotBijective,
    NotTwoToOne,
    OddDomain,
    ParseError,
    TooLarge,
)
from .field import FieldCtx, fmt_elem, parse_elem
from .polyalg import UniPoly


# -- inner maps ---------------------------------------------------------------


@dataclass(frozen=True)
class Inner:
    """The argument a term raises to a power.

    kind "x" is the identity, "affine" is sum c_j x^(2^j) + delta, and
    "poly" is sum c x^e + delta (used for the denominators of the odd-degree
    involutions, which are not linearized).
    """

    kind: str = "x"
    frob_terms: tuple = ()
    monomials: tuple = ()
    delta: int = 0

    def linear_images(self, ctx: FieldCtx):
        return [_frob_sum(ctx, self.frob_terms, 1 << i) for i in range(ctx.n)]

    def __call__(self, ctx: FieldCtx, a: int) -> int:
        if self.kind == "x":
            return a
        if self.kind == "affine":
            return _frob_sum(ctx, self.frob_terms, a) ^ self.delta
        acc = self.delta
        for c, e in self.monomials:
            acc ^= ctx.mul(c, ctx.pow(a, e))
        return acc

    def eval_all(self, ctx: FieldCtx, xs: np.ndarray) -> np.ndarray:
        if self.kind == "x":
            return xs
        if self.kind == "affine":
            table = ctx.linear_table(self.linear_images(ctx))
            return table[xs] ^ np.uint32(self.delta)
        out = np.full(xs.shape[0], self.delta, dtype=np.uint32)
        for c, e in self.monomials:
            kernels.term_accumulate(out, xs, xs, c, 0, e, ctx.exp, ctx.log)
        return out

    def compose(self, ctx: FieldCtx, other: "Inner") -> "Inner":
        """self(other(x)) for identity or affine pieces."""
        if self.kind == "x":
            return other
        if other.kind == "x":
            return self
        if self.kind == "affine" and other.kind == "affine":
            merged: dict[int, int] = {}
            delta = self.delta
            for c, j in self.frob_terms:
                for d, i in other.frob_terms:
                    k = (i + j) % ctx.n
                    merged[k] = merged.get(k, 0) ^ ctx.mul(c, ctx.frobenius(d, j))
                delta ^= ctx.mul(c, ctx.frobenius(other.delta, j))
            return affine(((c, k) for k, c in sorted(merged.items()) if c), delta)
        raise NotImplementedError("only identity/affine inner maps compose")

    def to_json(self) -> dict:
        if self.kind == "x":
            return {"kind": "x"}
        if self.kind == "affine":
            return {"kind": "affine", "frob_terms": [[fmt_elem(c), j] for c, j in self.frob_terms],
                    "delta": fmt_elem(self.delta)}
        return {"kind": "poly", "monomials": [[fmt_elem(c), e] for c, e in self.monomials],
                "delta": fmt_elem(self.delta)}

    @classmethod
    def from_json(cls, ctx, data) -> "Inner":
        kind = data.get("kind")
        delta = parse_elem(data.get("delta", "0x0"), ctx)
        if kind == "x":
            return IDENTITY
        if kind == "affine":
            return affine(((parse_elem(c, ctx), int(j)) for c, j in data["frob_terms"]), delta)
        if kind == "poly":
            return poly_inner(((parse_elem(c, ctx), int(e)) for c, e in data["monomials"]), delta)
        raise ParseError(f"unknown inner kind {kind!r}")


def _frob_sum(ctx, frob_terms, a):
    acc = 0
    for c, j in frob_terms:
        acc ^= ctx.mul(c, ctx.frobenius(a, j))
    return acc


IDENTITY = Inner()


def affine(frob_terms, delta: int = 0) -> Inner:
    return Inner("affine", frob_terms=tuple((int(c), int(j)) for c, j in frob_terms), delta=int(delta))


def poly_inner(monomials, delta: int = 0) -> Inner:
    return Inner("poly", monomials=tuple((int(c), int(e)) for c, e in monomials), delta=int(delta))


def lam(k: int, delta: int) -> Inner:
    """x^(2^k) + x + delta."""
    return affine([(1, k), (1, 0)], delta)


def trace_inner(ctx: FieldCtx, m: int) -> Inner:
    return affine([(1, m * i) for i in range(ctx.n // m)])


# -- mapping specs ------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """c * x^r * inner(x)^e."""

    c: int
    inner: Inner = IDENTITY
    e: int = 1
    r: int = 0


class MappingSpec:
    """A map of the field given as a sum of terms c * x^r * inner(x)^e."""

    def __init__(self, ctx: FieldCtx, terms):
        self.ctx = ctx
        self.terms = tuple(t for t in terms if t.c)

    def __repr__(self):
        return f"MappingSpec({self.to_json()})"

    @classmethod
    def monomials(cls, ctx, pairs):
        """sum c x^e from (c, e) pairs."""
        return cls(ctx, [Term(int(c), IDENTITY, int(e)) for c, e in pairs])

    @classmethod
    def identity(cls, ctx):
        return cls.monomials(ctx, [(1, 1)])

    @classmethod
    def from_unipoly(cls, p: UniPoly):
        return cls.monomials(p.ctx, [(c, e) for e, c in enumerate(p.coeffs) if c])

    def __call__(self, a: int) -> int:
        F = self.ctx
        acc = 0
        for t in self.terms:
            v = F.mul(t.c, F.pow(t.inner(F, a), t.e))
            if t.r:
                v = F.mul(v, F.pow(a, t.r))
            acc ^= v
        return acc

    def eval_all(self, xs: np.ndarray | None = None) -> np.ndarray:
        F = self.ctx
        xs = F.elements() if xs is None else np.ascontiguousarray(xs, dtype=np.uint32)
        out = np.zeros(xs.shape[0], dtype=np.uint32)
        cache: dict = {}
        for t in self.terms:
            u = cache.get(t.inner)
            if u is None:
                u = cache[t.inner] = np.ascontiguousarray(t.inner.eval_all(F, xs))
            kernels.term_accumulate(out, xs, u, t.c, t.r, t.e, F.exp, F.log)
        return out

    def __add__(self, other: "MappingSpec"):
        return MappingSpec(self.ctx, self.terms + other.terms)

    def scale(self, c: int):
        return MappingSpec(self.ctx, [Term(self.ctx.mul(c, t.c), t.inner, t.e, t.r) for t in self.terms])

    def frobenius(self, k: int):
        """The map x -> self(x)^(2^k), termwise."""
        F = self.ctx
        return MappingSpec(F, [Term(F.frobenius(t.c, k), _frob_inner(F, t.inner, k), t.e, t.r << k)
                               if t.inner.kind != "x" else Term(F.frobenius(t.c, k), t.inner, t.e << k, t.r << k)
                               for t in self.terms])

    def compose_inner(self, inner: Inner):
        """self(inner(x)) for a spec whose terms have no x^r factor."""
        F = self.ctx
        out = []
        for t in self.terms:
            if t.r:
                raise NotImplementedError("cannot compose a term carrying an x^r factor")
            out.append(Term(t.c, t.inner.compose(F, inner), t.e, 0))
        return MappingSpec(F, out)

    def to_json(self) -> dict:
        terms = []
        for t in self.terms:
            d = {"c": fmt_elem(t.c), "inner": t.inner.to_json(), "e": t.e}
            if t.r:
                d["r"] = t.r
            terms.append(d)
        return {"terms": terms}

    @classmethod
    def from_json(cls, ctx, data):
        try:
            return cls(ctx, [Term(parse_elem(d["c"], ctx), Inner.from_json(ctx, d.get("inner", {"kind": "x"})),
                                  int(d.get("e", 1)), int(d.get("r", 0))) for d in data["terms"]])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed mapping spec: {exc}") from None


def _frob_inner(F, inner: Inner, k: int) -> Inner:
    # (inner(x))^(2^k) as an inner map of the same kind
    if inner.kind == "affine":
        return affine(((F.frobenius(c, k), j + k) for c, j in inner.frob_terms), F.frobenius(inner.delta, k))
    return poly_inner(((F.frobenius(c, k), e << k) for c, e in inner.monomials), F.frobenius(inner.delta, k))


class TableMap:
    """A map given by its values on a finite set of points."""

    def __init__(self, ctx: FieldCtx, points, values):
        self.ctx = ctx
        pts = np.asarray(points, dtype=np.uint32)
        order = np.argsort(pts)
        self.points = pts[order]
        self.values = np.asarray(values, dtype=np.uint32)[order]

    @classmethod
    def from_callable(cls, ctx, fn, points=None):
        pts = ctx.elements() if points is None else np.asarray(points, dtype=np.uint32)
        return cls(ctx, pts, [fn(int(a)) for a in pts])

    def __call__(self, a: int) -> int:
        i = int(np.searchsorted(self.points, a))
        if i >= self.points.shape[0] or self.points[i] != a:
            raise KeyError(f"{a:#x} is outside the table")
        return int(self.values[i])

    def eval_all(self, xs=None) -> np.ndarray:
        if xs is None:
            xs = self.ctx.elements()
        idx = np.searchsorted(self.points, xs)
        idx = np.minimum(idx, self.points.shape[0] - 1)
        if not np.array_equal(self.points[idx], xs):
            raise KeyError("some points are outside the table")
        return self.values[idx]


# -- domains ------------------------------------------------------------------


class DomainSet:
    """An enumerable subset of the field; members are sorted and unique."""

    def __init__(self, ctx: FieldCtx, kind: str, **params):
        self.ctx = ctx
        self.kind = kind
        self.params = params
        self._members = None

    @classmethod
    def full(cls, ctx):
        return cls(ctx, "full")

    @classmethod
    def trace_slice(cls, ctx, m: int, gamma: int):
        """{x : Tr^n_m(x) = gamma}."""
        return cls(ctx, "trace", m=m, gamma=gamma)

    @classmethod
    def mu(cls, ctx, d: int, star: bool = False):
        return cls(ctx, "mu", d=d, star=star)

    @classmethod
    def image(cls, ctx, g, source: "DomainSet | None" = None):
        return cls(ctx, "image", map=g, source=source)

    @classmethod
    def explicit(cls, ctx, elements):
        return cls(ctx, "list", elements=tuple(int(a) for a in elements))

    def members(self) -> np.ndarray:
        if self._members is None:
            F = self.ctx
            p = self.params
            if self.kind == "full":
                m = F.elements()
            elif self.kind == "trace":
                m = np.flatnonzero(F.trace_table(p["m"]) == p["gamma"]).astype(np.uint32)
            elif self.kind == "mu":
                m = F.mu(p["d"])
                if p.get("star"):
                    m = m[m != 1]
            elif self.kind == "image":
                src = p.get("source")
                xs = None if src is None else src.members()
                m = np.unique(p["map"].eval_all(xs))
            elif self.kind == "list":
                m = np.unique(np.asarray(p["elements"], dtype=np.uint32))
            else:
                raise ParseError(f"unknown domain kind {self.kind!r}")
            self._members = np.ascontiguousarray(m, dtype=np.uint32)
        return self._members

    def __len__(self):
        return int(self.members().shape[0])

    def __contains__(self, a):
        m = self.members()
        i = np.searchsorted(m, a)
        return bool(i < m.shape[0] and m[i] == a)

    def is_full(self) -> bool:
        return len(self) == self.ctx.order

    def to_json(self) -> dict:
        p = self.params
        if self.kind == "full":
            return {"kind": "full"}
        if self.kind == "trace":
            return {"kind": "trace", "m": p["m"], "gamma": fmt_elem(p["gamma"])}
        if self.kind == "mu":
            return {"kind": "mu", "d": p["d"], "star": bool(p.get("star"))}
        if self.kind == "image":
            d = {"kind": "image", "map": p["map"].to_json()}
            if p.get("source") is not None:
                d["source"] = p["source"].to_json()
            return d
        return {"kind": "list", "elements": [fmt_elem(a) for a in self.members()]}

    @classmethod
    def from_json(cls, ctx, data):
        kind = data.get("kind")
        try:
            if kind == "full":
                return cls.full(ctx)
            if kind == "trace":
                return cls.trace_slice(ctx, int(data["m"]), parse_elem(data["gamma"], ctx))
            if kind == "mu":
                return cls.mu(ctx, int(data["d"]), bool(data.get("star", False)))
            if kind == "image":
                src = data.get("source")
                return cls.image(ctx, MappingSpec.from_json(ctx, data["map"]),
                                 None if src is None else cls.from_json(ctx, src))
            if kind == "list":
                return cls.explicit(ctx, [parse_elem(a, ctx) for a in data["elements"]])
        except KeyError as exc:
            raise ParseError(f"domain {kind!r} is missing {exc}") from None
        raise ParseError(f"unknown domain kind {kind!r}")


def as_domain(ctx, dom) -> DomainSet:
    if dom is None:
        return DomainSet.full(ctx)
    if isinstance(dom, DomainSet):
        return dom
    return DomainSet.explicit(ctx, dom)


# -- profiles and verdicts ----------------------------------------------------


@dataclass(frozen=True)
class PreimageProfile:
    """histogram[k] = number of image values with exactly k preimages."""

    histogram: dict
    domain_size: int
    image_size: int

    def to_json(self):
        return {"histogram": {str(k): v for k, v in sorted(self.histogram.items())},
                "domain_size": self.domain_size, "image_size": self.image_size}


def profile_of_values(vals: np.ndarray, q: int) -> PreimageProfile:
    counts = kernels.value_counts(np.ascontiguousarray(vals, dtype=np.uint32), q)
    hist = np.bincount(counts)
    histogram = {int(k): int(v) for k, v in enumerate(hist) if k and v}
    return PreimageProfile(histogram, int(vals.shape[0]), int(sum(histogram.values())))


def preimage_profile(spec, dom=None) -> PreimageProfile:
    d = as_domain(spec.ctx, dom)
    return profile_of_values(spec.eval_all(d.members()), spec.ctx.order)


def two_to_one_verdict(profile: PreimageProfile) -> bool:
    size = profile.domain_size
    h = profile.histogram
    if size % 2 == 0:
        return set(h) <= {2}
    return h == {2: (size - 1) // 2, 1: 1} or (size == 1 and h == {1: 1})


def is_two_to_one(spec, dom=None) -> bool:
    return two_to_one_verdict(preimage_profile(spec, dom))


# -- pairing tables -----------------------------------------------------------


class PairingTable:
    """An involution given pointwise on a sorted domain."""

    def __init__(self, ctx: FieldCtx, domain, partner, provenance: str = ""):
        self.ctx = ctx
        dom = np.asarray(domain, dtype=np.uint32)
        order = np.argsort(dom)
        self.domain = dom[order]
        self.partner = np.asarray(partner, dtype=np.uint32)[order]
        self.provenance = provenance

    def __len__(self):
        return int(self.domain.shape[0])

    def __getitem__(self, a: int) -> int:
        i = int(np.searchsorted(self.domain, a))
        if i >= len(self) or self.domain[i] != a:
            raise KeyError(f"{a:#x} is not in the domain")
        return int(self.partner[i])

    def __call__(self, a: int) -> int:
        return self[a]

    def eval_all(self, xs=None) -> np.ndarray:
        if xs is None:
            return self.partner.copy()
        idx = np.minimum(np.searchsorted(self.domain, xs), len(self) - 1)
        if not np.array_equal(self.domain[idx], xs):
            raise KeyError("some points are outside the domain")
        return self.partner[idx]

    def __eq__(self, other):
        return (isinstance(other, PairingTable) and np.array_equal(self.domain, other.domain)
                and np.array_equal(self.partner, other.partner))

    def is_involution(self) -> bool:
        return bool(np.isin(self.partner, self.domain).all()
                    and np.array_equal(self.eval_all(self.partner), self.domain))

    def fixed_points(self) -> list[int]:
        return self.domain[self.domain == self.partner].tolist()

    def pairs(self) -> list[tuple[int, int]]:
        keep = self.domain < self.partner
        return list(zip(self.domain[keep].tolist(), self.partner[keep].tolist()))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.domain.tolist(), self.partner.tolist()))

    def to_json(self):
        return [[fmt_elem(a), fmt_elem(b)] for a, b in self.pairs()]

    @classmethod
    def from_json(cls, ctx, data, provenance="json"):
        dom, part = [], []
        for a, b in data:
            a, b = parse_elem(a, ctx), parse_elem(b, ctx)
            dom += [a, b]
            part += [b, a]
        return cls(ctx, dom, part, provenance)

    @classmethod
    def from_function(cls, ctx, fn, domain=None, provenance=""):
        dom = ctx.elements() if domain is None else np.asarray(domain, dtype=np.uint32)
        if hasattr(fn, "eval_all"):
            vals = fn.eval_all(dom)
        else:
            vals = [fn(int(a)) for a in dom]
        return cls(ctx, dom, vals, provenance)


def _pairing_from_values(ctx, members, vals, provenance) -> PairingTable:
    part = kernels.partners(np.ascontiguousarray(vals, dtype=np.uint32))
    if (part < 0).any():
        raise NotTwoToOne("some value does not have exactly two preimages")
    return PairingTable(ctx, members, members[part], provenance)


def derive_involution(spec, dom=None) -> PairingTable:
    """Pair each a with the unique b != a sharing its image."""
    d = as_domain(spec.ctx, dom)
    members = d.members()
    if members.shape[0] % 2:
        raise OddDomain(f"domain has odd size {members.shape[0]}")
    vals = spec.eval_all(members)
    if not two_to_one_verdict(profile_of_values(vals, spec.ctx.order)):
        raise NotTwoToOne("map is not 2-to-1 on the domain")
    return _pairing_from_values(spec.ctx, members, vals, "derived")


# -- interpolation, conjugation, outer bijections, counting ---------------------

INTERPOLATION_MAX_DEGREE = 14


def interpolate_involution(tbl: PairingTable) -> UniPoly:
    """The reduced polynomial (degree < q) agreeing with the table everywhere.

    Uses I(x) = sum_a I(a) (1 + (x + a)^(q-1)); since every binomial
    coefficient of (x + a)^(q-1) is odd, coeff_j = sum_a I(a) a^(q-1-j) for
    0 < j < q, and coeff_0 = I(0).
    """
    F = tbl.ctx
    q = F.order
    if len(tbl) != q:
        raise DomainNotFullField("interpolation needs the whole field as domain")
    if F.n > INTERPOLATION_MAX_DEGREE:
        raise TooLarge(f"interpolation is O(q^2); n <= {INTERPOLATION_MAX_DEGREE}")
    a = tbl.domain
    vals = tbl.partner
    nz = (a != 0) & (vals != 0)
    la = F.log[a[nz]]
    lv = F.log[vals[nz]]
    m1 = q - 1
    coeffs = [0] * q
    coeffs[0] = tbl[0]
    coeffs[q - 1] = int(np.bitwise_xor.reduce(vals)) if q > 1 else 0
    # the a = 0 summand contributes only to j = q-1 (0^0 = 1), already counted above
    for j in range(1, q - 1):
        k = q - 1 - j
        terms = F.exp[(lv + la * k) % m1]
        coeffs[j] = int(np.bitwise_xor.reduce(terms)) if terms.size else 0
    return UniPoly(F, coeffs)


def _as_evaluator(ctx, p):
    if hasattr(p, "eval_all"):
        return p
    return TableMap.from_callable(ctx, p)


def conjugate_involution(I: PairingTable, p, S=None) -> PairingTable:
    """Table a -> p^-1(I(p(a))) on S, for a bijection p from S onto I's domain."""
    F = I.ctx
    dom = as_domain(F, S)
    src = dom.members()
    pv = _as_evaluator(F, p).eval_all(src)
    if np.unique(pv).shape[0] != src.shape[0] or not np.array_equal(np.sort(pv), I.domain):
        raise NotBijective("p is not a bijection from S onto the involution's domain")
    back = np.empty_like(src)
    order = np.argsort(pv)
    back[:] = src[order]  # back[i] = p^-1(I.domain[i]) because I.domain is sorted
    ipv = I.eval_all(pv)
    idx = np.searchsorted(I.domain, ipv)
    return PairingTable(F, src, back[idx], "conjugated")


def outer_bijection_witness(f, fbar, A=None):
    """The bijection p: Im(f) -> Im(fbar) with fbar = p o f.

    Returns (image_of_f, p_values) as aligned sorted arrays. Raises
    NotTwoToOne when either map is not 2-to-1 onto half the domain, and
    InvolutionsDiffer (with the first differing point) otherwise.
    """
    F = f.ctx
    dom = as_domain(F, A)
    members = dom.members()
    size = members.shape[0]
    if size % 2:
        raise OddDomain("outer bijections need an even domain")
    fv = f.eval_all(members)
    gv = fbar.eval_all(members)
    for name, vals in (("f", fv), ("fbar", gv)):
        prof = profile_of_values(vals, F.order)
        if not two_to_one_verdict(prof) or prof.image_size != size // 2:
            raise NotTwoToOne(f"{name} is not 2-to-1 onto |A|/2 values")
    If = _pairing_from_values(F, members, fv, "f")
    Ig = _pairing_from_values(F, members, gv, "fbar")
    diff = np.flatnonzero(If.partner != Ig.partner)
    if diff.size:
        i = int(diff[0])
        raise InvolutionsDiffer((int(If.domain[i]), int(If.partner[i]), int(Ig.partner[i])))
    img, first = np.unique(fv, return_index=True)
    pvals = gv[first]
    # well-defined: every preimage of each f-value has the same fbar-value
    idx = np.searchsorted(img, fv)
    assert np.array_equal(pvals[idx], gv)
    assert np.unique(pvals).shape[0] == img.shape[0]
    return img, pvals


def derivers_formula(n: int) -> int:
    q = 1 << n
    return math.factorial(q) // math.factorial(q // 2)


def _derives(values, I: PairingTable) -> bool:
    vals = np.asarray(values, dtype=np.uint32)
    part = kernels.partners(vals)
    if (part < 0).any():
        return False
    return bool(np.array_equal(I.domain[part], I.partner))


def count_derivers(I: PairingTable) -> int:
    """Number of 2-to-1 maps of GF(2^n) whose derived involution is I (n <= 3).

    Each such map is an injective assignment of values to the q/2 pairs of I;
    every assignment is built and checked.
    """
    F = I.ctx
    if F.n > 3:
        raise TooLarge("constructive count is limited to n <= 3")
    if len(I) != F.order or I.fixed_points() or not I.is_involution():
        raise ValueError("need a fixed-point-free involution of the whole field")
    pairs = I.pairs()
    count = 0
    values = np.zeros(F.order, dtype=np.uint32)
    for assign in itertools.permutations(range(F.order), len(pairs)):
        for (a, b), v in zip(pairs, assign):
            values[a] = v
            values[b] = v
        if _derives(values, I):
            count += 1
    return count


def brute_force_derivers(I: PairingTable) -> int:
    """Scan all q^q functions (n = 2 only) for those deriving I."""
    F = I.ctx
    if F.n > 2:
        raise TooLarge("function scan is limited to n <= 2")
    return sum(1 for vals in itertools.product(range(F.order), repeat=F.order) if _derives(vals, I))

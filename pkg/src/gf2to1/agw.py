"""Commutative-square certificates for 2-to-1 maps and four constructions
built on them.

A diagram is

    A  --f-->  Abar
    |lam        |lambar
    v           v
    S  --fbar-> Sbar

with lambar(f(a)) == fbar(lam(a)). Base mode certifies f from fbar being
2-to-1 plus f being a bijection between matching fibers; fiber mode from
fbar being a bijection plus f being 2-to-1 on every lam-fiber.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionFailed, ParseError
from .field import FieldCtx, create_context, fmt_elem
from .mapping import (
    IDENTITY,
    DomainSet,
    MappingSpec,
    Term,
    affine,
    is_two_to_one,
    lam as lam_inner,
)
from .polyalg import LinearizedMap, kernel_intersection, quartic_two_to_one

DIRECT_CHECK_MAX_DEGREE = 16


@dataclass
class DiagramSpec:
    A: DomainSet
    Abar: DomainSet
    S: DomainSet
    Sbar: DomainSet
    f: MappingSpec
    fbar: MappingSpec
    lam: MappingSpec
    lambar: MappingSpec

    @property
    def ctx(self) -> FieldCtx:
        return self.f.ctx

    def to_json(self) -> dict:
        return {
            "n": self.ctx.n,
            "modulus": fmt_elem(self.ctx.modulus),
            "sets": {k: getattr(self, k).to_json() for k in ("A", "Abar", "S", "Sbar")},
            "maps": {k: getattr(self, k).to_json() for k in ("f", "fbar", "lam", "lambar")},
        }

    @classmethod
    def from_json(cls, data, ctx: FieldCtx | None = None):
        try:
            if ctx is None:
                ctx = create_context(int(data["n"]), int(str(data["modulus"]), 16) if "modulus" in data else None)
            sets = {k: DomainSet.from_json(ctx, v) for k, v in data["sets"].items()}
            maps = {k: MappingSpec.from_json(ctx, v) for k, v in data["maps"].items()}
            return cls(sets["A"], sets["Abar"], sets["S"], sets["Sbar"],
                       maps["f"], maps["fbar"], maps["lam"], maps["lambar"])
        except KeyError as exc:
            raise ParseError(f"diagram is missing {exc}") from None


@dataclass
class CommuteVerdict:
    ok: bool
    witness: int | None = None

    def __bool__(self):
        return self.ok


def verify_commutes(d: DiagramSpec) -> CommuteVerdict:
    a = d.A.members()
    left = d.lambar.eval_all(d.f.eval_all(a))
    right = d.fbar.eval_all(d.lam.eval_all(a))
    bad = np.flatnonzero(left != right)
    if bad.size:
        return CommuteVerdict(False, int(a[bad[0]]))
    return CommuteVerdict(True)


@dataclass
class Certificate:
    """Outcome of a certification attempt; a refusal carries which/witness."""

    mode: str
    certified: bool
    checked: list = field(default_factory=list)
    which: str | None = None
    witness: object = None
    detail: str = ""
    direct: bool | None = None

    def __bool__(self):
        return self.certified

    def raise_if_refused(self):
        if not self.certified:
            raise ConditionFailed(self.which, self.witness, self.detail)
        return self

    def to_json(self) -> dict:
        out = {"mode": self.mode, "certified": self.certified, "checked": list(self.checked),
               "direct": self.direct}
        if not self.certified:
            w = self.witness
            out.update(which=self.which, witness=fmt_elem(w) if isinstance(w, int) else w, detail=self.detail)
        return out


def _same_set(values: np.ndarray, members: np.ndarray) -> bool:
    return np.array_equal(np.unique(values), members)


def _finish(cert: Certificate, d: DiagramSpec) -> Certificate:
    cert.direct = is_two_to_one(d.f, d.A)
    if cert.certified and not cert.direct:  # pragma: no cover - would falsify the criterion
        raise AssertionError("certificate issued for a map the direct check rejects")
    return cert


def _refuse(cert: Certificate, d: DiagramSpec, which, witness=None, detail="", strict=False) -> Certificate:
    cert.certified = False
    cert.which, cert.witness, cert.detail = which, witness, detail
    _finish(cert, d)
    if strict:
        cert.raise_if_refused()
    return cert


def certify_base_mode(d: DiagramSpec, strict: bool = False) -> Certificate:
    """fbar 2-to-1 on S, |S| even, and f a bijection from each lam-fiber
    onto the lambar-fiber over fbar(s) in Abar."""
    cert = Certificate("base", True)
    v = verify_commutes(d)
    cert.checked.append("commutes")
    if not v:
        return _refuse(cert, d, "commutes", v.witness, "lambar(f(a)) != fbar(lam(a))", strict)
    A, Abar, S, Sbar = (x.members() for x in (d.A, d.Abar, d.S, d.Sbar))
    fA, lamA = d.f.eval_all(A), d.lam.eval_all(A)
    fbarS, lambarAbar = d.fbar.eval_all(S), d.lambar.eval_all(Abar)
    for name, vals, target in (("f", fA, Abar), ("lam", lamA, S), ("fbar", fbarS, Sbar),
                               ("lambar", lambarAbar, Sbar)):
        if not _same_set(vals, target):
            return _refuse(cert, d, "surjective", name, f"{name} is not onto its codomain", strict)
    cert.checked.append("surjective")
    if S.shape[0] % 2:
        return _refuse(cert, d, "2", int(S.shape[0]), "|S| is odd", strict)
    if not is_two_to_one(d.fbar, d.S):
        return _refuse(cert, d, "1", None, "fbar is not 2-to-1 on S", strict)
    cert.checked.append("1")
    # fiber sizes over s and over fbar(s); injectivity of f on each fiber
    fiber_size = np.bincount(np.searchsorted(S, lamA), minlength=S.shape[0])
    target_size = np.bincount(np.searchsorted(Sbar, lambarAbar), minlength=Sbar.shape[0])
    need = target_size[np.searchsorted(Sbar, fbarS)]
    bad = np.flatnonzero(fiber_size != need)
    key = (lamA.astype(np.uint64) << np.uint64(32)) | fA.astype(np.uint64)
    uk, counts = np.unique(key, return_counts=True)
    dup = uk[counts > 1]
    witnesses = [int(S[i]) for i in bad[:1]] + [int(k >> np.uint64(32)) for k in dup[:1]]
    if witnesses:
        return _refuse(cert, d, "2", min(witnesses), "f is not a bijection between fibers", strict)
    cert.checked.append("2")
    return _finish(cert, d)


def certify_fiber_mode(d: DiagramSpec, strict: bool = False) -> Certificate:
    """fbar a bijection S -> Sbar, f 2-to-1 on each lam-fiber, at most one odd fiber."""
    cert = Certificate("fiber", True)
    v = verify_commutes(d)
    cert.checked.append("commutes")
    if not v:
        return _refuse(cert, d, "commutes", v.witness, "lambar(f(a)) != fbar(lam(a))", strict)
    A, S, Sbar = d.A.members(), d.S.members(), d.Sbar.members()
    lamA = d.lam.eval_all(A)
    if not np.isin(lamA, S).all():
        return _refuse(cert, d, "lam-range", None, "lam(A) is not inside S", strict)
    fbarS = d.fbar.eval_all(S)
    if S.shape[0] != Sbar.shape[0] or not _same_set(fbarS, Sbar) or np.unique(fbarS).shape[0] != S.shape[0]:
        return _refuse(cert, d, "bijective", None, "fbar is not a bijection from S onto Sbar", strict)
    cert.checked.append("bijective")
    fA = d.f.eval_all(A)
    idx = np.searchsorted(S, lamA)
    key = (lamA.astype(np.uint64) << np.uint64(32)) | fA.astype(np.uint64)
    uk, counts = np.unique(key, return_counts=True)
    owner = np.searchsorted(S, (uk >> np.uint64(32)).astype(np.uint32))
    ones = np.bincount(owner[counts == 1], minlength=S.shape[0])
    over = np.bincount(owner[counts > 2], minlength=S.shape[0])
    size = np.bincount(idx, minlength=S.shape[0])
    odd = size % 2 == 1
    ok = (over == 0) & np.where(odd, ones == 1, ones == 0)
    ok |= size == 0
    bad = np.flatnonzero(~ok)
    if bad.size:
        return _refuse(cert, d, "fiber", int(S[bad[0]]), "f is not 2-to-1 on this fiber", strict)
    cert.checked.append("fiber")
    if int(odd.sum()) > 1:
        return _refuse(cert, d, "odd-fibers", int(odd.sum()), "more than one odd fiber", strict)
    cert.checked.append("odd-fibers")
    return _finish(cert, d)


def base_diagram(f: MappingSpec, lam: MappingSpec, fbar: MappingSpec, lambar: MappingSpec,
                 A: DomainSet | None = None) -> DiagramSpec:
    """Diagram whose corner sets are the images, so every map is onto."""
    ctx = f.ctx
    A = DomainSet.full(ctx) if A is None else A
    S = DomainSet.image(ctx, lam, A)
    return DiagramSpec(A, DomainSet.image(ctx, f, A), S, DomainSet.image(ctx, fbar, S), f, fbar, lam, lambar)


# -- constructions ------------------------------------------------------------


@dataclass
class ConstructionReport:
    name: str
    params: dict
    conditions: dict = field(default_factory=dict)
    certificate: Certificate | None = None
    direct: bool | None = None
    diagram: DiagramSpec | None = None

    @property
    def certified(self) -> bool:
        conds = all(v is True for v in self.conditions.values())
        if self.direct is False:
            return False
        return conds

    def to_json(self) -> dict:
        return {"construction": self.name, "params": self.params, "conditions": self.conditions,
                "certified": self.certified, "direct": self.direct,
                "certificate": None if self.certificate is None else self.certificate.to_json()}


def _require(report: ConstructionReport, name: str, ok: bool, witness=None, detail="", strict=True):
    report.conditions[name] = bool(ok)
    if not ok and strict:
        raise ConditionFailed(name, witness, detail)


def _finalize(report: ConstructionReport, f: MappingSpec):
    if f.ctx.n <= DIRECT_CHECK_MAX_DEGREE:
        report.direct = is_two_to_one(f)
    if report.diagram is not None and report.certified:
        report.certificate = certify_base_mode(report.diagram)


def substitute(g: MappingSpec, inner) -> MappingSpec:
    """g(inner(x)) for a g built from plain monomials."""
    out = []
    for t in g.terms:
        if t.inner.kind != "x":
            raise NotImplementedError("substitution needs a polynomial in x")
        out.append(Term(t.c, inner, t.e + t.r))
    return MappingSpec(g.ctx, out)


def linearized_inner(L: LinearizedMap):
    if L.terms is None:
        raise ValueError("linearized map needs a term list")
    return affine(L.terms)


def linearized_spec(L: LinearizedMap) -> MappingSpec:
    return MappingSpec.monomials(L.ctx, [(c, 1 << j) for c, j in L.terms])


def times_linearized(L: LinearizedMap, g: MappingSpec, inner=IDENTITY) -> MappingSpec:
    """L(x) * g(inner(x))."""
    out = []
    for d, j in L.terms:
        for t in g.terms:
            if t.inner.kind != "x":
                raise NotImplementedError("product needs a polynomial g")
            out.append(Term(g.ctx.mul(d, t.c), inner, t.e + t.r, 1 << j))
    return MappingSpec(g.ctx, out)


def build_construction_1(n: int, m: int, a: int, g: MappingSpec | None = None, strict: bool = True):
    """f = (x^2+x) h(T(x)) + g(T(x))^(2^m) + g(T(x)), h = x^2+x+a, T = Tr^n_m."""
    ctx = create_context(n)
    report = ConstructionReport("construction-1", {"n": n, "m": m, "a": fmt_elem(a)})
    _require(report, "m divides n", m > 0 and n % m == 0, m, strict=strict)
    if not report.conditions["m divides n"]:
        return None, report
    _require(report, "n/m odd", (n // m) % 2 == 1, n // m, strict=strict)
    in_sub = ctx.in_subfield(a, m)
    _require(report, "a in F_2^m", in_sub, a, strict=strict)
    tr = ctx.trace_sub(a, m) if in_sub else 0
    _require(report, "Tr_m(a) != 0", tr != 0, a, strict=strict)
    if g is None:
        g = MappingSpec.identity(ctx)
    T = affine([(1, m * i) for i in range(n // m)])
    terms = []
    # (x^2 + x)(T^2 + T + a)
    for r in (1, 2):
        terms += [Term(1, T, 2, r), Term(1, T, 1, r), Term(a, IDENTITY, r)]
    gT = substitute(g, T)
    f = MappingSpec(ctx, terms) + gT + gT.frobenius(m)
    phi = LinearizedMap(ctx, [(1, 1), (1, 0)])
    psi = LinearizedMap.trace_map(ctx, m)
    _require(report, "ker(x^2+x) & ker(T) = 0", kernel_intersection(phi, psi) == 0, strict=strict)
    sub = DomainSet.explicit(ctx, ctx.subfield_elements(m))
    hvals = MappingSpec.monomials(ctx, [(1, 2), (1, 1), (a, 0)]).eval_all(sub.members())
    report.params["h_form"] = "strict" if (hvals != 0).all() else ("weak" if in_sub else "none")
    _require(report, "h(T(F)) in F_2^m*", bool((hvals != 0).all()), strict=strict)
    fbar = MappingSpec.monomials(ctx, [(1, 4), (1 ^ a, 2), (a, 1)])
    quart = quartic_two_to_one(ctx, 0, 1 ^ a, a, degree=m)
    report.conditions["quartic criterion"] = bool(quart)
    _require(report, "1", is_two_to_one(fbar, sub), strict=strict)
    Tspec = MappingSpec(ctx, [Term(1, T, 1)])
    report.diagram = base_diagram(f, Tspec, fbar, Tspec)
    _finalize(report, f)
    return f, report


def build_construction_3(L1: LinearizedMap, L2: LinearizedMap, L3: LinearizedMap, g: MappingSpec,
                         k: int = 1, strict: bool = True):
    """f = L1(x) + L2(x) g(L3(x)) with q = 2^k-linearized L1, L2, L3 over F_q."""
    ctx = L1.ctx
    report = ConstructionReport("construction-3", {"n": ctx.n, "k": k})
    # the square only needs L3 to be F_q-linear and to commute with L1 and L2
    ok = all(j % k == 0 and ctx.in_subfield(c, k) for c, j in L3.terms)
    _require(report, "L3 is q-linearized over F_q", ok, strict=strict)
    t3 = L3.table
    for name, L in (("L1", L1), ("L2", L2)):
        t = L.table
        _require(report, f"{name} commutes with L3", np.array_equal(t3[t], t[t3]), strict=strict)
    inner3 = linearized_inner(L3)
    S = DomainSet.image(ctx, MappingSpec(ctx, [Term(1, inner3, 1)]))
    ys = S.members()
    gy = g.eval_all(ys)
    sub_ok = bool(np.isin(gy, ctx.subfield_elements(k)).all())
    _require(report, "g(L3(F)) in F_q", sub_ok, strict=strict)
    f = linearized_spec(L1) + times_linearized(L2, g, inner3)
    fbar = linearized_spec(L1) + times_linearized(L2, g)
    _require(report, "1", is_two_to_one(fbar, S), detail="fbar is not 2-to-1 on L3(F)", strict=strict)
    bad = None
    for y, c in zip(ys.tolist(), gy.tolist()):
        Fy = L1 + L2.scale(int(c))
        if kernel_intersection(Fy, L3):
            bad = y
            break
    _require(report, "2", bad is None, bad, "ker(F_y) & ker(L3) != 0", strict=strict)
    L3spec = MappingSpec(ctx, [Term(1, inner3, 1)])
    report.diagram = base_diagram(f, L3spec, fbar, L3spec)
    _finalize(report, f)
    return f, report


def build_construction_2(k: int, n: int, b: int, a: int, strict: bool = True):
    """f = x^2 + x g(Tr^(kn)_k(x)) on GF(2^(kn)) with g = x^3 + b x + a over GF(2^k)."""
    ctx = create_context(k * n)
    report = ConstructionReport("construction-2", {"k": k, "n": n, "a": fmt_elem(a), "b": fmt_elem(b)})
    _require(report, "n odd", n % 2 == 1, n, strict=strict)
    _require(report, "a != 0", a != 0, a, strict=strict)
    _require(report, "a, b in F_q", ctx.in_subfield(a, k) and ctx.in_subfield(b, k), strict=strict)
    if not all(report.conditions.values()):
        return None, report
    t = ctx.div(ctx.pow(b ^ 1, 3), ctx.mul(a, a)) ^ 1
    _require(report, "trace condition", ctx.trace_sub(t, k) != 0, strict=strict)
    report.conditions["quartic criterion"] = bool(quartic_two_to_one(ctx, 0, b ^ 1, a, degree=k))
    L1 = LinearizedMap(ctx, [(1, 1)])
    L2 = LinearizedMap(ctx, [(1, 0)])
    L3 = LinearizedMap.trace_map(ctx, k)
    g = MappingSpec.monomials(ctx, [(1, 3), (b, 1), (a, 0)])
    f, sub = build_construction_3(L1, L2, L3, g, k=k, strict=strict)
    report.conditions.update(sub.conditions)
    report.diagram = sub.diagram
    _finalize(report, f)
    return f, report


def construction_2_fiber_diagram(f: MappingSpec, k: int, base: DiagramSpec) -> DiagramSpec:
    """Fiber-mode square for construction 2: lam = Tr o f, lambar = Tr, fbar = id on Tr(f(F)).

    ``base`` is the base-mode diagram of the same f; its fbar gives Tr o f as
    fbar(Tr(x)).
    """
    ctx = f.ctx
    tr = linearized_inner(LinearizedMap.trace_map(ctx, k))
    lam_map = substitute(base.fbar, tr)
    lambar = MappingSpec(ctx, [Term(1, tr, 1)])
    A = DomainSet.full(ctx)
    S = DomainSet.image(ctx, lam_map, A)
    return DiagramSpec(A, DomainSet.image(ctx, f, A), S, S, f, MappingSpec.identity(ctx), lam_map, lambar)


def build_construction_4(n: int, k: int, delta: int, g: MappingSpec, L: LinearizedMap, strict: bool = True):
    """f = g(x^(2^k)+x+delta) + L(x); h = g^(2^k) + g + L on S = {x^(2^k)+x+delta}."""
    ctx = create_context(n)
    import math

    ell = math.gcd(n, k)
    report = ConstructionReport("construction-4", {"n": n, "k": k, "delta": fmt_elem(delta)})
    _require(report, "L over F_2^l", all(ctx.in_subfield(c, ell) for c, _ in L.terms), strict=strict)
    lam_i = lam_inner(k, delta)
    Lspec = linearized_spec(L)
    f = substitute(g, lam_i) + Lspec
    h = g.frobenius(k) + g + Lspec
    S = DomainSet.image(ctx, MappingSpec(ctx, [Term(1, lam_i, 1)]))
    _require(report, "1", is_two_to_one(h, S), detail="h is not 2-to-1 on S", strict=strict)
    kk = LinearizedMap(ctx, [(1, k), (1, 0)])
    _require(report, "2", kernel_intersection(L, kk) == 0, detail="ker(L) & ker(x^2^k+x) != 0", strict=strict)
    lam_spec = MappingSpec(ctx, [Term(1, lam_i, 1)])
    lambar = MappingSpec(ctx, [Term(1, lam_inner(k, L(delta)), 1)])
    report.diagram = base_diagram(f, lam_spec, h, lambar)
    _finalize(report, f)
    return f, report


# -- random diagrams for soundness testing --------------------------------------


def random_f2_linearized(ctx: FieldCtx, rng: random.Random) -> LinearizedMap:
    js = [j for j in range(ctx.n) if rng.random() < 0.5] or [rng.randrange(ctx.n)]
    return LinearizedMap(ctx, [(1, j) for j in js])


def random_square_diagram(ctx: FieldCtx, rng: random.Random) -> DiagramSpec:
    """f = L1 + L2 * g(L3) with g(y) = Tr(beta y) + eps, over the L3-square."""
    L1, L2, L3 = (random_f2_linearized(ctx, rng) for _ in range(3))
    beta, eps = rng.randrange(ctx.order), rng.randrange(2)
    inner3 = linearized_inner(L3)
    g = affine([(ctx.frobenius(beta, i), i) for i in range(ctx.n)], eps)
    f = linearized_spec(L1) + MappingSpec(ctx, [Term(d, g.compose(ctx, inner3), 1, 1 << j) for d, j in L2.terms])
    fbar = linearized_spec(L1) + MappingSpec(ctx, [Term(d, g, 1, 1 << j) for d, j in L2.terms])
    L3spec = MappingSpec(ctx, [Term(1, inner3, 1)])
    return base_diagram(f, L3spec, fbar, L3spec)


def random_fiber_diagram(ctx: FieldCtx, rng: random.Random) -> DiagramSpec:
    """f = L(x) + c * lam(x)^e with L, lam over F_2, squared against fbar = L + lam(c y^e).

    Maps with F_2 coefficients commute, so lam(f(x)) = fbar(lam(x)) for every
    choice; fiber-mode hypotheses hold only for some draws.
    """
    L, lam_map = random_f2_linearized(ctx, rng), random_f2_linearized(ctx, rng)
    c, e = rng.randrange(1, ctx.order), rng.randrange(1, ctx.order)
    inner = linearized_inner(lam_map)
    f = linearized_spec(L) + MappingSpec(ctx, [Term(c, inner, e)])
    fbar = linearized_spec(L) + MappingSpec.monomials(ctx, [(ctx.frobenius(c, j), e << j) for _, j in lam_map.terms])
    lam_spec = MappingSpec(ctx, [Term(1, inner, 1)])
    A = DomainSet.full(ctx)
    S = DomainSet.image(ctx, lam_spec, A)
    return DiagramSpec(A, DomainSet.image(ctx, f, A), S, DomainSet.image(ctx, fbar, S), f, fbar, lam_spec, lam_spec)

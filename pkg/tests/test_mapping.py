import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gf2to1.errors import (
    DomainNotFullField,
    InvolutionsDiffer,
    NotBijective,
    NotTwoToOne,
    OddDomain,
    ParseError,
    TooLarge,
)
from gf2to1.field import create_context
from gf2to1.mapping import (
    DomainSet,
    Inner,
    MappingSpec,
    PairingTable,
    TableMap,
    Term,
    affine,
    brute_force_derivers,
    conjugate_involution,
    count_derivers,
    derive_involution,
    derivers_formula,
    interpolate_involution,
    is_two_to_one,
    lam,
    outer_bijection_witness,
    poly_inner,
    preimage_profile,
)
from conftest import ref_is_two_to_one, ref_mul

F4, F8, F16 = (create_context(n) for n in (2, 3, 4))

FAMILY_JSON = {"terms": [{"c": "0x1", "inner": {"kind": "affine", "frob_terms": [["0x1", 1], ["0x1", 0]],
                                                  "delta": "0x8"}, "e": 5},
                         {"c": "0x1", "inner": {"kind": "x"}, "e": 1}]}


def sq_plus_x(F):
    return MappingSpec.monomials(F, [(1, 2), (1, 1)])


def test_eval_examples():
    assert MappingSpec.identity(F16)(0x7) == 0x7
    assert sq_plus_x(F4)(0x3) == 0x1
    f = MappingSpec.from_json(F16, FAMILY_JSON)
    assert len(DomainSet.image(F16, f)) == 8


def test_spec_json_roundtrip():
    f = MappingSpec.from_json(F16, FAMILY_JSON)
    assert f.to_json() == FAMILY_JSON
    g = MappingSpec(F16, [Term(3, poly_inner([(1, 3), (2, 1)], 5), 2, 1)])
    assert MappingSpec.from_json(F16, json.loads(json.dumps(g.to_json()))).eval_all().tolist() == g.eval_all().tolist()
    with pytest.raises(ParseError):
        MappingSpec.from_json(F16, {"terms": [{"e": 1}]})
    with pytest.raises(ParseError):
        MappingSpec.from_json(F16, {"terms": [{"c": "0x1", "inner": {"kind": "bogus"}}]})


def _ref_eval(F, terms, a):
    # terms: (c, inner_fn, e, r) evaluated with schoolbook arithmetic
    acc = 0
    for c, inner, e, r in terms:
        u = inner(a)
        v = c
        for _ in range(e):
            v = ref_mul(v, u, F.modulus, F.n)
        for _ in range(r):
            v = ref_mul(v, a, F.modulus, F.n)
        acc ^= v
    return acc


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_eval_all_matches_pointwise(seed):
    rng = random.Random(seed)
    F = create_context(rng.choice([3, 4, 5]))
    terms = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(["x", "affine", "poly"])
        if kind == "x":
            inner = Inner()
        elif kind == "affine":
            inner = affine([(rng.randrange(F.order), rng.randrange(F.n))], rng.randrange(F.order))
        else:
            inner = poly_inner([(rng.randrange(1, F.order), rng.randrange(1, 9))], rng.randrange(F.order))
        terms.append(Term(rng.randrange(1, F.order), inner, rng.randrange(0, 20), rng.randrange(0, 3)))
    spec = MappingSpec(F, terms)
    vals = spec.eval_all()
    ref = [(t.c, (lambda a, t=t: t.inner(F, a)), t.e, t.r) for t in terms]
    for a in range(F.order):
        assert int(vals[a]) == spec(a) == _ref_eval(F, ref, a)


def test_frobenius_of_spec():
    f = MappingSpec.from_json(F16, FAMILY_JSON)
    g = f.frobenius(1)
    for a in range(16):
        assert g(a) == F16.mul(f(a), f(a))


def test_profiles():
    sq = MappingSpec.monomials(F4, [(1, 2)])
    assert preimage_profile(sq).histogram == {1: 4}
    assert preimage_profile(sq_plus_x(F4)).histogram == {2: 2}
    assert is_two_to_one(sq_plus_x(F4)) and not is_two_to_one(sq)
    g = MappingSpec.monomials(F16, [(1, 1), (1, 14)])  # x + x^-1
    mu5 = DomainSet.mu(F16, 5)
    assert preimage_profile(g, mu5).histogram == {1: 1, 2: 2}
    assert is_two_to_one(g, mu5)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdict_matches_reference(seed):
    rng = random.Random(seed)
    F = create_context(rng.choice([2, 3, 4]))
    spec = MappingSpec.monomials(F, [(rng.randrange(F.order), rng.randrange(F.order)) for _ in range(3)])
    size = rng.randint(1, F.order)
    dom = DomainSet.explicit(F, rng.sample(range(F.order), size))
    vals = spec.eval_all(dom.members()).tolist()
    prof = preimage_profile(spec, dom)
    assert sum(k * v for k, v in prof.histogram.items()) == len(dom)
    assert is_two_to_one(spec, dom) == ref_is_two_to_one(vals)


def test_domains():
    assert len(DomainSet.full(F16)) == 16
    ts = DomainSet.trace_slice(F16, 2, 0)
    assert len(ts) == 4 and all(F16.trace_rel(a, 2) == 0 for a in ts.members().tolist())
    assert len(DomainSet.mu(F16, 5, star=True)) == 4
    dup = DomainSet.explicit(F16, [3, 3, 5])
    assert dup.members().tolist() == [3, 5] and 5 in dup and 4 not in dup
    for d in (ts, DomainSet.mu(F16, 5, True), DomainSet.image(F16, sq_plus_x(F16)), dup):
        back = DomainSet.from_json(F16, json.loads(json.dumps(d.to_json())))
        assert back.members().tolist() == d.members().tolist()
    with pytest.raises(ParseError):
        DomainSet.from_json(F16, {"kind": "nope"})


def test_lam_inner():
    lam1 = lam(1, 0x8)
    for a in range(16):
        assert lam1(F16, a) == F16.mul(a, a) ^ a ^ 0x8


def test_derive_involution_examples():
    tbl = derive_involution(sq_plus_x(F16))
    assert all(tbl[a] == a ^ 1 for a in range(16))
    # difference map of x^3 on F8 pairs x with x + a
    for a in range(1, 8):
        D = MappingSpec(F8, [Term(1, Inner(), 3), Term(1, affine([(1, 0)], a), 3)])
        t = derive_involution(D)
        assert all(t[x] == x ^ a for x in range(8))
    with pytest.raises(NotTwoToOne):
        derive_involution(MappingSpec.monomials(F4, [(1, 2)]))
    with pytest.raises(OddDomain):
        derive_involution(MappingSpec.monomials(F16, [(1, 1), (1, 14)]), DomainSet.mu(F16, 5))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_derived_tables_are_fixed_point_free_involutions(seed):
    rng = random.Random(seed)
    F = create_context(rng.choice([3, 4, 5, 6]))
    # a linearized map with one-dimensional kernel followed by a random permutation
    alpha = rng.randrange(1, F.order)
    perm = list(range(F.order))
    rng.shuffle(perm)
    vals = [perm[F.mul(a, a) ^ F.mul(alpha, a)] for a in range(F.order)]
    assert ref_is_two_to_one(vals)
    f = TableMap(F, F.elements(), vals)
    tbl = derive_involution(f)
    assert tbl.is_involution() and not tbl.fixed_points()
    fv = f.eval_all()
    assert np.array_equal(fv[tbl.partner], fv)
    assert all(tbl[a] == a ^ alpha for a in range(F.order))


def test_pairing_table_json():
    tbl = derive_involution(sq_plus_x(F8))
    back = PairingTable.from_json(F8, json.loads(json.dumps(tbl.to_json())))
    assert back == tbl and back.pairs() == tbl.pairs()


def test_interpolation():
    xs = F4.elements()
    poly = interpolate_involution(PairingTable(F4, xs, xs ^ 1))
    assert poly.coeffs == (1, 1)
    f = MappingSpec.from_json(F16, FAMILY_JSON)
    tbl = derive_involution(f)
    p = interpolate_involution(tbl)
    assert p.deg < 16
    assert [p(a) for a in range(16)] == tbl.partner.tolist()
    den = [F16.pow(a, 8) ^ F16.pow(a, 4) ^ F16.mul(a, a) ^ a ^ 0x6 for a in range(16)]
    assert [p(a) for a in range(16)] == [a ^ 1 ^ F16.inv(d) for a, d in zip(range(16), den)]
    with pytest.raises(DomainNotFullField):
        interpolate_involution(PairingTable(F16, [1, 2], [2, 1]))


@pytest.mark.parametrize("n", [3, 5])
def test_interpolation_random(n):
    F = create_context(n)
    rng = random.Random(n)
    for _ in range(5):
        elems = list(range(F.order))
        rng.shuffle(elems)
        dom, part = [], []
        for a, b in zip(elems[::2], elems[1::2]):
            dom += [a, b]
            part += [b, a]
        tbl = PairingTable(F, dom, part)
        p = interpolate_involution(tbl)
        assert [p(a) for a in range(F.order)] == tbl.partner.tolist()


def test_conjugation():
    f = sq_plus_x(F16)
    I = derive_involution(f)
    assert conjugate_involution(I, MappingSpec.identity(F16)) == I
    w = 0x6
    p = MappingSpec.monomials(F16, [(w, 1)])
    fp = MappingSpec.monomials(F16, [(F16.mul(w, w), 2), (w, 1)])
    assert conjugate_involution(I, p) == derive_involution(fp)
    with pytest.raises(NotBijective):
        conjugate_involution(I, MappingSpec.monomials(F16, [(3, 0)]))


def test_outer_bijection():
    f = MappingSpec.from_json(F16, FAMILY_JSON)
    img, p = outer_bijection_witness(f, f)
    assert np.array_equal(img, p)
    sq = f.frobenius(1)
    img, p = outer_bijection_witness(f, sq)
    assert p.tolist() == [F16.mul(a, a) for a in img.tolist()]
    with pytest.raises(NotTwoToOne):
        outer_bijection_witness(sq_plus_x(F16), MappingSpec.monomials(F16, [(1, 4), (1, 1)]))
    # a 2-to-1 map pairing x with x + w for w != 1
    other = MappingSpec.monomials(F16, [(1, 2), (0x2, 1)])
    with pytest.raises(InvolutionsDiffer) as exc:
        outer_bijection_witness(sq_plus_x(F16), other)
    a, b1, b2 = exc.value.witness
    assert b1 == a ^ 1 and b2 == a ^ 2


def _involutions(F, k):
    """k distinct fixed-point-free involutions of F."""
    out = []
    for w in range(1, F.order):
        xs = F.elements()
        out.append(PairingTable(F, xs, xs ^ np.uint32(w)))
        if len(out) == k:
            return out


def test_counting():
    assert derivers_formula(2) == 12 and derivers_formula(3) == 1680
    for I in _involutions(F4, 2):
        assert count_derivers(I) == 12
        assert brute_force_derivers(I) == 12
    for I in _involutions(F8, 2):
        assert count_derivers(I) == 1680
    with pytest.raises(TooLarge):
        count_derivers(_involutions(F16, 1)[0])


def test_count_rejects_non_involution():
    xs = F4.elements()
    with pytest.raises(ValueError):
        count_derivers(PairingTable(F4, xs, xs))


def test_brute_force_matches_definition():
    # independent check of the n = 2 oracle: scan by hand with dict grouping
    I = _involutions(F4, 1)[0].as_dict()
    count = 0
    for vals in itertools.product(range(4), repeat=4):
        groups = {}
        for a, v in enumerate(vals):
            groups.setdefault(v, []).append(a)
        if all(len(g) == 2 and I[g[0]] == g[1] for g in groups.values()):
            count += 1
    assert count == 12

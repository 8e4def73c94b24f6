import json
import random

import pytest

from gf2to1.agw import (
    DiagramSpec,
    base_diagram,
    build_construction_1,
    build_construction_2,
    build_construction_3,
    build_construction_4,
    certify_base_mode,
    certify_fiber_mode,
    construction_2_fiber_diagram,
    random_fiber_diagram,
    random_square_diagram,
    verify_commutes,
)
from gf2to1.errors import ConditionFailed, ParseError
from gf2to1.field import create_context
from gf2to1.mapping import DomainSet, MappingSpec, Term, is_two_to_one, lam
from gf2to1.polyalg import LinearizedMap
from conftest import ref_is_two_to_one

F4, F16, F64 = (create_context(n) for n in (2, 4, 6))


def _c1_param():
    # a in F_4 with Tr_2(a) = 1
    return next(int(a) for a in F64.subfield_elements(2) if F64.trace_sub(int(a), 2) == 1)


def _c2_params(k=2, n=3):
    ctx = create_context(k * n)
    sub = [int(a) for a in ctx.subfield_elements(k)]
    for a in sub[1:]:
        for b in sub:
            f, rep = build_construction_2(k, n, b, a, strict=False)
            if rep.certified:
                return f, rep, a, b
    raise AssertionError("no parameters found")


def identity_diagram(F):
    A = DomainSet.full(F)
    ident = MappingSpec.identity(F)
    return DiagramSpec(A, A, A, A, ident, ident, ident, ident)


def test_commutes():
    d = identity_diagram(F4)
    assert verify_commutes(d)
    d.lambar = MappingSpec.monomials(F4, [(1, 1), (1, 0)])
    v = verify_commutes(d)
    assert not v and v.witness == 0


def test_construction_1_base_mode():
    a = _c1_param()
    f, rep = build_construction_1(6, 2, a)
    assert rep.certified and rep.direct
    assert ref_is_two_to_one(f.eval_all().tolist())
    assert verify_commutes(rep.diagram)
    cert = certify_base_mode(rep.diagram)
    assert cert.certified and cert.direct
    assert cert.checked == ["commutes", "surjective", "1", "2"]


def test_construction_1_refusals():
    with pytest.raises(ConditionFailed) as exc:
        build_construction_1(6, 2, 0)
    assert "Tr" in exc.value.which
    with pytest.raises(ConditionFailed) as exc:
        build_construction_1(4, 2, 1)
    assert exc.value.which == "n/m odd"
    _, rep = build_construction_1(4, 2, 1, strict=False)
    assert not rep.certified


def test_base_mode_rejects_bijective_fbar():
    # fbar = x^2 is a bijection of S: condition (1) fails
    F = F16
    ident = MappingSpec.identity(F)
    sq = MappingSpec.monomials(F, [(1, 2)])
    d = base_diagram(sq, ident, sq, ident)
    cert = certify_base_mode(d)
    assert not cert.certified and cert.which == "1"
    with pytest.raises(ConditionFailed):
        certify_base_mode(d, strict=True)
    with pytest.raises(ConditionFailed):
        cert.raise_if_refused()


def test_base_mode_odd_S():
    # lam constant onto a 1-point S
    F = F4
    f = MappingSpec.monomials(F, [(1, 2), (1, 1)])
    zero = MappingSpec(F, [])
    d = base_diagram(f, zero, zero, zero)
    cert = certify_base_mode(d)
    assert not cert.certified and cert.which == "2" and "odd" in cert.detail


def test_non_completeness():
    # x^2 + x is 2-to-1 on F16, yet the trace square fails the fiber-bijection clause
    F = F16
    f = MappingSpec.monomials(F, [(1, 2), (1, 1)])
    tr = MappingSpec.monomials(F, [(1, 1), (1, 2), (1, 4), (1, 8)])
    fbar = MappingSpec.monomials(F, [(1, 2), (1, 1)])
    d = base_diagram(f, tr, fbar, tr)
    cert = certify_base_mode(d)
    assert not cert.certified and cert.which == "2"
    assert cert.direct is True


def test_fiber_mode_trivial():
    F = F16
    f = MappingSpec.monomials(F, [(1, 2), (1, 1)])
    zero = MappingSpec(F, [])
    A = DomainSet.full(F)
    S = DomainSet.explicit(F, [0])
    d = DiagramSpec(A, DomainSet.image(F, f), S, S, f, MappingSpec.identity(F), zero, zero)
    cert = certify_fiber_mode(d)
    assert cert.certified and cert.direct


def test_fiber_mode_rejects_two_to_one_fbar():
    F = F16
    f = MappingSpec.monomials(F, [(1, 2), (1, 1)])
    ident = MappingSpec.identity(F)
    d = base_diagram(f, ident, f, ident)
    cert = certify_fiber_mode(d)
    assert not cert.certified and cert.which == "bijective"


def test_construction_2_fiber_mode():
    f, rep, a, b = _c2_params()
    assert rep.conditions["quartic criterion"]
    d = construction_2_fiber_diagram(f, 2, rep.diagram)
    cert = certify_fiber_mode(d)
    assert cert.certified and cert.direct
    assert ref_is_two_to_one(f.eval_all().tolist())


def test_construction_2_refusals():
    with pytest.raises(ConditionFailed):
        build_construction_2(2, 3, 0, 0)
    with pytest.raises(ConditionFailed):
        build_construction_2(2, 2, 0, 1)


def test_construction_3_specialization():
    f2, rep, a, b = _c2_params()
    ctx = f2.ctx
    g = MappingSpec.monomials(ctx, [(1, 3), (b, 1), (a, 0)])
    f3, rep3 = build_construction_3(LinearizedMap(ctx, [(1, 1)]), LinearizedMap(ctx, [(1, 0)]),
                                    LinearizedMap.trace_map(ctx, 2), g, k=2)
    assert f3.eval_all().tolist() == f2.eval_all().tolist()
    assert rep3.certified


def test_construction_3_zero_g():
    ctx = F64
    g = MappingSpec(ctx, [])
    with pytest.raises(ConditionFailed) as exc:
        build_construction_3(LinearizedMap(ctx, [(1, 1)]), LinearizedMap(ctx, [(1, 0)]),
                             LinearizedMap.trace_map(ctx, 2), g, k=2)
    assert exc.value.which == "1"


def test_construction_3_random():
    rng = random.Random(4)
    certified = 0
    for _ in range(200):
        L = [LinearizedMap(F16, [(1, j) for j in range(4) if rng.random() < 0.5] or [(1, 0)]) for _ in range(3)]
        g = MappingSpec.monomials(F16, [(rng.randrange(2), rng.randrange(1, 4)), (rng.randrange(2), 0)])
        f, rep = build_construction_3(*L, g, strict=False)
        if rep.certified:
            certified += 1
            assert is_two_to_one(f)
            assert ref_is_two_to_one(f.eval_all().tolist())
    assert certified > 0


def test_construction_4():
    F = F16
    delta = next(a for a in range(16) if F.trace_abs(a) == 1)
    g = MappingSpec.monomials(F, [(1, 5)])
    f, rep = build_construction_4(4, 1, delta, g, LinearizedMap(F, [(1, 0)]))
    assert rep.certified and rep.direct
    assert rep.certificate.certified
    with pytest.raises(ConditionFailed) as exc:
        build_construction_4(4, 1, delta, g, LinearizedMap(F, [(1, 1), (1, 0)]))
    assert exc.value.which in ("1", "2")
    _, rep2 = build_construction_4(4, 1, delta, g, LinearizedMap(F, [(1, 1), (1, 0)]), strict=False)
    assert rep2.conditions["2"] is False
    # the specialization g = x^s, L = c x gives the family shape
    c = 1
    fam = MappingSpec(F, [Term(1, lam(1, delta), 5), Term(c)])
    assert f.eval_all().tolist() == fam.eval_all().tolist()


def test_random_diagrams_soundness():
    rng = random.Random(7)
    issued = 0
    for _ in range(100):
        d = random_fiber_diagram(F16, rng)
        for cert in (certify_fiber_mode(d), certify_base_mode(d)):
            assert cert.direct == ref_is_two_to_one(d.f.eval_all().tolist())
            if cert.certified:
                issued += 1
                assert cert.direct
        d = random_square_diagram(F16, rng)
        cert = certify_base_mode(d)
        if cert.certified:
            issued += 1
            assert cert.direct
    assert issued > 0


def test_diagram_json_roundtrip():
    a = _c1_param()
    _, rep = build_construction_1(6, 2, a)
    data = json.loads(json.dumps(rep.diagram.to_json()))
    d = DiagramSpec.from_json(data)
    assert certify_base_mode(d).certified
    assert json.loads(json.dumps(rep.to_json()))["certified"]
    with pytest.raises(ParseError):
        DiagramSpec.from_json({"n": 4, "sets": {}})

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from torusspd.intlat import Coset, Subgroup
from torusspd.support import (
    CircleSupport, MinTail, Outcome, Periodic, Progression, SchemaError,
    SupportSpec, coset_avoids_view, decide_spd, decide_spd_bounded,
    decide_spd_circle, in_view, intersection_sampler, member,
)

FULL = SupportSpec(tail=Periodic(1, {(0, 0)}))
BOTH_EVEN = SupportSpec(tail=Periodic(2, {(0, 0)}))
SUM_EVEN = SupportSpec(tail=Periodic(2, {(0, 0), (1, 1)}))


def catalog():
    P = Periodic
    return {
        "full": FULL,
        "both-even": BOTH_EVEN,
        "sum-even": SUM_EVEN,
        "min0": SupportSpec(tail=MinTail(0)),
        "min3": SupportSpec(tail=MinTail(3)),
        "min10-removed": SupportSpec(tail=MinTail(10), removed={(10, 10)}),
        "origin": SupportSpec(explicit={(0, 0)}),
        "finite5": SupportSpec(explicit={(0, 0), (1, 0), (0, 1), (1, 1), (2, 3)}),
        "empty": SupportSpec(),
        "mod3-low": SupportSpec(tail=P(3, {(0, 0), (0, 1), (1, 0), (1, 1)})),
        "mod3-single": SupportSpec(tail=P(3, {(1, 1)})),
        "mod4-reflect": SupportSpec(tail=P(4, {(r, s) for r in range(3) for s in range(4)})),
        "mod4-parity": SupportSpec(tail=P(4, {(r, s) for r in range(4) for s in range(4) if (r + s) % 2 == 0})),
        "both-even+1": SupportSpec(explicit={(1, 0)}, tail=P(2, {(0, 0)})),
        "both-even+3": SupportSpec(explicit={(1, 0), (0, 1), (1, 1)}, tail=P(2, {(0, 0)})),
        "full-minus": SupportSpec(tail=P(1, {(0, 0)}), removed={(0, 0), (1, 2)}),
        "complex-min0": SupportSpec(mode="complex", tail=MinTail(0)),
        "complex-both-even": SupportSpec(mode="complex", tail=P(2, {(0, 0)})),
        "complex-mod3": SupportSpec(mode="complex", tail=P(3, {(1, 1)})),
        "complex-mod3-diag": SupportSpec(mode="complex",
                                         tail=P(3, {(r, s) for r in range(3) for s in range(3) if r != 2 or s != 2})),
    }


EXPECTED = {
    "full": True, "both-even": False, "sum-even": False, "min0": True, "min3": True,
    "min10-removed": True, "origin": False, "finite5": False, "empty": False,
    "mod3-low": True, "mod3-single": False, "mod4-reflect": True, "mod4-parity": False,
    "both-even+1": False, "both-even+3": False, "full-minus": True,
    "complex-min0": True, "complex-both-even": False, "complex-mod3": False,
    "complex-mod3-diag": False,
}


def test_member_examples():
    origin = SupportSpec(explicit={(0, 0)})
    assert member(origin, (0, 0)) and not member(origin, (1, 0))
    periodic = SupportSpec(tail=Periodic(2, {(0, 0)}))
    assert member(periodic, (4, 6)) and not member(periodic, (4, 5))
    tail = SupportSpec(tail=MinTail(3), removed={(5, 5)})
    assert not member(tail, (5, 5)) and member(tail, (5, 6))


def test_real_mode_support_is_nonnegative():
    assert not member(FULL, (-1, 0))
    assert in_view(FULL, (-1, 0))
    with pytest.raises(SchemaError):
        SupportSpec(explicit={(-1, 0)})


def test_schema_errors():
    with pytest.raises(SchemaError):
        SupportSpec(explicit={(1, 1)}, removed={(1, 1)})
    with pytest.raises(SchemaError):
        SupportSpec(tail=Periodic(2, {(2, 0)}))
    with pytest.raises(SchemaError):
        SupportSpec.from_json({"tail": {"kind": "weird"}})
    with pytest.raises(SchemaError):
        SupportSpec.from_json({"explicit": [[1, 2, 3]]})


def test_json_roundtrip():
    for spec in catalog().values():
        assert SupportSpec.from_json(spec.to_json()) == spec


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(catalog())), st.integers(-20, 20), st.integers(-20, 20))
def test_view_symmetry(name, k, l):
    spec = catalog()[name]
    if spec.mode != "real":
        return
    vals = {in_view(spec, (s * k, t * l)) for s in (1, -1) for t in (1, -1)}
    assert len(vals) == 1


def test_decide_examples():
    assert decide_spd(FULL).strict
    v = decide_spd(BOTH_EVEN)
    assert v.outcome is Outcome.NOT_STRICTLY_PD
    assert v.witness == Coset((1, 0), Subgroup.rect(2, 2))
    assert decide_spd(SupportSpec(tail=MinTail(10), removed={(10, 10)})).strict


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_decide_catalog(name):
    spec = catalog()[name]
    v = decide_spd(spec)
    assert v.strict == EXPECTED[name]
    if not v.strict:
        W = v.witness
        assert W.group.is_rectangular
        assert coset_avoids_view(spec, W)
        for p in W.points_in_box(-30, 30):
            assert not in_view(spec, p)


def test_bounded_examples():
    v = decide_spd_bounded(BOTH_EVEN, 2)
    assert v.outcome is Outcome.NOT_STRICTLY_PD
    assert v.witness == Coset((1, 0), Subgroup.rect(2, 2))
    assert decide_spd_bounded(FULL, 6).outcome is Outcome.STRICTLY_PD
    v = decide_spd_bounded(SupportSpec(explicit={(0, 0)}), 4)
    assert v.outcome is Outcome.NOT_STRICTLY_PD
    assert not v.witness.contains((0, 0))


def test_bounded_weakens_to_unknown():
    # witness needs modulus 7 (all four reflections of (3, 3) removed);
    # a search capped at 6 cannot conclude
    holes = {(3, 3), (4, 3), (3, 4), (4, 4)}
    spec = SupportSpec(tail=Periodic(7, {(r, s) for r in range(7) for s in range(7)} - holes))
    assert not decide_spd(spec).strict
    v = decide_spd_bounded(spec, 6)
    assert v.outcome is Outcome.UNKNOWN and v.bound == 6
    assert decide_spd_bounded(spec, 7).outcome is Outcome.NOT_STRICTLY_PD


@pytest.mark.parametrize("name", sorted(catalog()))
def test_oracle_agreement(name):
    spec = catalog()[name]
    exact = decide_spd(spec)
    oracle = decide_spd_bounded(spec, 12)
    if oracle.outcome is Outcome.UNKNOWN:
        return
    assert oracle.strict == exact.strict
    if not oracle.strict:
        assert coset_avoids_view(spec, oracle.witness)


def test_finite_corrections_never_flip():
    base = SUM_EVEN
    for extra in ([(1, 0)], [(1, 0), (0, 1), (3, 0), (2, 1)], [(5, 7), (0, 3)]):
        spec = SupportSpec(explicit=set(extra), tail=base.tail)
        v = decide_spd(spec)
        assert not v.strict
        assert coset_avoids_view(spec, v.witness)


def test_witness_exact_vs_window():
    # exact residue check agrees with a plain window scan on many translates
    for name, spec in catalog().items():
        for a, b in itertools.product(range(1, 5), repeat=2):
            for j, jp in itertools.product(range(a), range(b)):
                C = Coset((j, jp), Subgroup.rect(a, b))
                scan = not any(in_view(spec, p) for p in C.points_in_box(-40, 41))
                assert coset_avoids_view(spec, C) == scan, (name, C)


def test_circle_examples():
    v = decide_spd_circle(CircleSupport(tail=Periodic(2, {0})))
    assert v.outcome is Outcome.NOT_STRICTLY_PD and v.witness == Progression(1, 2)
    assert decide_spd_circle(CircleSupport(tail=Periodic(1, {0}))).strict
    assert decide_spd_circle(CircleSupport(tail=MinTail(5))).strict


def circle_oracle(spec, max_step, window):
    for a in range(1, max_step + 1):
        for j in range(a):
            if not any(spec.in_view(k) for k in range(-window + (j + window) % a, window + 1, a)):
                return Progression(j, a)
    return None


@pytest.mark.parametrize("spec", [
    CircleSupport(tail=MinTail(5)),
    CircleSupport(tail=Periodic(2, {0})),
    CircleSupport(tail=Periodic(3, {1})),
    CircleSupport(tail=Periodic(4, {0, 1})),
    CircleSupport(tail=Periodic(6, {0, 1, 2})),
    CircleSupport(explicit={0, 1, 2}),
    CircleSupport(explicit={1, 3}, tail=Periodic(2, {0})),
])
def test_circle_vs_bounded_oracle(spec):
    v = decide_spd_circle(spec)
    found = circle_oracle(spec, 12, 400)
    assert v.strict == (found is None)
    if not v.strict:
        P = v.witness
        assert not any(spec.in_view(k) for k in range(-400, 401) if P.contains(k))


def test_sampler_examples():
    assert intersection_sampler(FULL, Coset((0, 0), Subgroup.full(1, 0, 1)), 3) == [(0, 0), (0, 1), (1, 0)]
    assert intersection_sampler(SupportSpec(tail=MinTail(2)), Coset((1, 1), Subgroup.rect(2, 2)), 2) == \
        [(3, 3), (3, 5)]
    assert intersection_sampler(FULL, Coset((0, 1), Subgroup.full(1, 1, 2)), 2) == [(0, 1), (1, 0)]


def test_sampler_brute_force():
    spec = SupportSpec(tail=MinTail(2))
    C = Coset((1, 1), Subgroup.rect(2, 2))
    brute = sorted((p for p in C.points_in_box(0, 20) if in_view(spec, p)),
                   key=lambda p: (max(p), p))
    assert intersection_sampler(spec, C, 10) == brute[:10]


def test_sampler_leaves_first_quadrant_when_needed():
    spec = catalog()["mod3-low"]
    C = Coset((2, 2), Subgroup.rect(3, 3))
    pts = intersection_sampler(spec, C, 5)
    assert all(C.contains(p) and in_view(spec, p) for p in pts)
    assert all(p[0] < 0 and p[1] < 0 for p in pts)


SAMPLER_COSETS = [
    Coset((0, 0), Subgroup.full(1, 0, 1)), Coset((1, 0), Subgroup.rect(2, 2)),
    Coset((0, 1), Subgroup.full(1, 1, 2)), Coset((2, 1), Subgroup.full(2, 1, 3)),
    Coset((1, 3), Subgroup.rect(5, 4)), Coset((4, 4), Subgroup.rect(5, 5)),
    Coset((3, 2), Subgroup.full(3, 2, 4)), Coset((1, 1), Subgroup.full(1, 3, 5)),
    Coset((0, 2), Subgroup.full(5, 1, 3)), Coset((2, 0), Subgroup.full(4, 0, 1)),
]


@pytest.mark.parametrize("name", [n for n, ok in EXPECTED.items() if ok])
def test_sampler_corpus(name):
    spec = catalog()[name]
    for C in SAMPLER_COSETS:
        pts = intersection_sampler(spec, C, 25)
        assert len(set(pts)) == 25
        assert all(C.contains(p) and in_view(spec, p) for p in pts)


def test_sampler_requires_strict():
    with pytest.raises(ValueError):
        intersection_sampler(BOTH_EVEN, Coset((0, 0), Subgroup.rect(1, 1)), 2)

import pytest

from fanlim.errors import NoRhoConstraint, RankMismatch
from fanlim.regions import Region, chamber_patterns, chamber_witnesses


def region(*cs):
    return Region.make(cs)


def test_membership_basic(p1):
    r = region((0, "ge", -1))  # m >= -1
    assert r.contains(p1, (-1,))
    assert not r.contains(p1, (-2,))
    with pytest.raises(RankMismatch):
        r.contains(p1, (0, 0))


def test_membership_empty_constraints(p1):
    assert Region.whole().contains(p1, (123,))


def test_membership_p2(p2):
    # B((-1,-1,-1)) at cone(e1,e2): <m, e_i> >= 1
    r = region((0, "ge", 1), (1, "ge", 1))
    assert not r.contains(p2, (0, 0))
    assert r.contains(p2, (1, 1))


def test_merge_tightest():
    r = region((0, "ge", 1), (0, "ge", 3))
    assert r.constraints == ((0, "ge", 3),)
    r = region((0, "eq", 2), (0, "ge", 1))
    assert r.constraints == ((0, "eq", 2),)
    assert region((0, "eq", 0), (0, "ge", 1)).empty
    assert region((0, "eq", 0), (0, "eq", 1)).empty


def test_translate(p1):
    r = region((0, "ge", 0), (1, "ge", 0))  # rays (1), (-1)
    t = r.translate(p1, (5,))
    assert t.bound_at(0) == ("ge", 5)
    assert t.bound_at(1) == ("ge", -5)


def test_drop_rays_localization():
    r = region((0, "ge", 0), (1, "ge", 2))
    assert r.drop_rays([0]).constraints == ((1, "ge", 2),)
    assert r.drop_rays([0, 1]) == Region.whole()
    # equality at a dropped ray kills the module
    r = region((0, "eq", 0), (1, "ge", 2))
    assert r.drop_rays([0]).empty


def test_restrict_ray_to_level():
    r = region((0, "ge", 3), (1, "ge", 0))
    out, level = r.restrict_ray_to_level(0)
    assert level == 3
    assert out.bound_at(0) == ("eq", 3)
    # idempotent
    out2, level2 = out.restrict_ray_to_level(0)
    assert out2 == out and level2 == 3
    with pytest.raises(NoRhoConstraint):
        region((1, "ge", 0)).restrict_ray_to_level(0)


def test_implies():
    big = region((0, "ge", 0))
    small = region((0, "ge", 1))
    assert small.implies(big)
    assert not big.implies(small)
    assert region((0, "eq", 2)).implies(big)
    assert Region.empty_region().implies(small)


def test_difference_single_step():
    big = region((0, "ge", 0), (1, "ge", 0))
    small = region((0, "ge", 1), (1, "ge", 0))
    d = big.difference(small)
    assert d.constraints == ((0, "eq", 0), (1, "ge", 0))
    # equal regions: empty difference
    assert big.difference(big).empty
    # removing the equality slice leaves the shifted lower bound
    d2 = big.difference(region((0, "eq", 0), (1, "ge", 0)))
    assert d2.constraints == ((0, "ge", 1), (1, "ge", 0))
    # relaxation by two is not representable
    assert big.difference(region((0, "ge", 2), (1, "ge", 0))) is None


def test_chamber_witnesses_cover_all_patterns(p1):
    regions = [region((0, "ge", 1)), region((1, "ge", 1))]
    ws = chamber_witnesses(p1, regions)
    pats = {tuple(r.contains(p1, m) for r in regions) for m in ws}
    # exhaustive scan oracle on a window
    expected = {
        tuple(r.contains(p1, (m,)) for r in regions) for m in range(-3, 4)
    }
    assert pats == expected


def test_chamber_patterns_spec_example(p1):
    # constraints m >= 1 and -m >= 1: three feasible patterns
    out = chamber_patterns(p1, [(0, "ge", 1), (1, "ge", 1)])
    assert len(out.feasible) == 3
    assert (True, True) in [p for p, _ in out.infeasible] or \
        (True, True) in out.infeasible


def test_chamber_patterns_no_constraints(p1):
    out = chamber_patterns(p1, [])
    assert out.feasible == (((), (0,)),)


def test_chamber_patterns_contradiction(p1):
    out = chamber_patterns(p1, [(0, "ge", 1), (0, "eq", 0)])
    assert (True, True) in out.infeasible


def test_chambers_p2_cover_window(p2):
    regions = [
        region((0, "ge", 0), (1, "ge", 0)),
        region((1, "ge", -1), (2, "ge", 0)),
        region((0, "eq", 2)),
    ]
    ws = chamber_witnesses(p2, regions)
    got = {tuple(r.contains(p2, m) for r in regions) for m in ws}
    expected = set()
    for x in range(-6, 7):
        for y in range(-6, 7):
            expected.add(tuple(r.contains(p2, (x, y)) for r in regions))
    assert expected <= got

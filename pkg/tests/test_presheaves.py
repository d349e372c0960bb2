import random

import pytest

from fanlim.diagrams import derived_limit_oracle
from fanlim.errors import InvalidWindow, NotMonomialInclusion, WrongQuotient
from fanlim.fan import quotient_fan
from fanlim.presheaves import (
    acyclic_path_presheaf,
    cofibre,
    direct_sum_presheaves,
    evaluate_presheaf_degree,
    extension_by_zero,
    free_presheaf,
    holim_graded,
    holim_zero_everywhere,
    identity_presheaf_map,
    line_bundle,
    line_bundle_inclusion,
    mapping_cone,
    monomial_multiplication,
    presheaf_path,
    restriction,
    sphere_pattern,
    structure_sheaf,
    twist,
    twist_map,
    zero_presheaf,
    zero_presheaf_map,
)
from fanlim.regions import Region


def cech_p1_dims(k1, k2, m):
    """Independent oracle on the projective line: two-set cover sections."""
    plus = m >= -k1
    minus = -m >= -k2
    both = True
    # 0 -> H0 -> C(plus) + C(minus) -> C(intersection) -> H1 -> 0
    c0 = int(plus) + int(minus)
    c1 = int(both)
    rank = int(plus or minus)  # the restriction map's rank at this degree
    h0 = c0 - rank
    h1 = c1 - rank
    return h0, h1


def test_line_bundle_regions_p1(p1):
    o = line_bundle(p1, (3, -1))
    assert o.complex((0,)).summands[0][0].constraints == ((0, "ge", -3),)
    assert o.complex((1,)).summands[0][0].constraints == ((1, "ge", 1),)
    assert o.complex(()).summands[0][0] == Region.whole()


def test_line_bundle_validates(p1, p2):
    for fan, k in ((p1, (1, 2)), (p2, (1, 1, 1))):
        line_bundle(fan, k).validate()


def test_evaluate_structure_o0_constant(p1):
    o = structure_sheaf(p1)
    d = evaluate_presheaf_degree(o, (0,))
    assert all(d.value(e).dims == {0: 1} for e in d.poset.elements)


def test_evaluate_o_minus1_minus1(p1):
    o = line_bundle(p1, (-1, -1))
    d = evaluate_presheaf_degree(o, (0,))
    assert d.value(()).dims == {0: 1}
    assert d.value((0,)).dims == {}
    assert d.value((1,)).dims == {}


def test_free_presheaf_values(p1):
    f = free_presheaf(p1, frozenset(), sphere_pattern(p1))
    assert f.complex(()).summands[0][0] == Region.whole()
    assert f.complex((0,)).is_zero()
    f2 = free_presheaf(p1, {0}, sphere_pattern(p1))
    assert f2.complex((0,)).summands[0][0].constraints == ((0, "ge", 0),)
    assert f2.complex(()).summands[0][0] == Region.whole()
    assert f2.complex((1,)).is_zero()


def test_free_presheaf_on_maximal_cone(a2):
    f = free_presheaf(a2, {0, 1}, sphere_pattern(a2))
    for key in f.poset.elements:
        assert not f.complex(key).is_zero()


def test_twist_of_o_is_o(p1, p2):
    for fan, k, l in ((p1, (1, 2), (-2, 5)), (p2, (1, 0, 2), (0, 1, -1))):
        ok = line_bundle(fan, k)
        twisted = twist(ok, l)
        expected = line_bundle(fan, tuple(a + b for a, b in zip(k, l)))
        for key in twisted.poset.elements:
            assert (twisted.complex(key).summands
                    == expected.complex(key).summands)
    # twist by zero is the identity on regions
    o = line_bundle(p1, (2, 2))
    assert twist(o, (0, 0)).complex((0,)).summands == o.complex((0,)).summands


def test_twist_composition_exact(p2):
    c = line_bundle(p2, (1, -1, 0))
    k, l = (1, 0, 2), (-1, 1, 1)
    a = twist(twist(c, k), l)
    b = twist(c, tuple(x + y for x, y in zip(k, l)))
    for key in a.poset.elements:
        assert a.complex(key).summands == b.complex(key).summands
    # round trip
    rt = twist(twist(c, k), tuple(-x for x in k))
    for key in rt.poset.elements:
        assert rt.complex(key).summands == c.complex(key).summands


def test_extension_by_zero_regions(p2):
    rho = 0
    qd = quotient_fan(p2, rho)
    oq = line_bundle(qd.fan, (2, 3))
    z = extension_by_zero(oq, p2, rho, qd)
    # zero off the star
    assert z.complex((1, 2)).is_zero()
    assert z.complex((1,)).is_zero()
    # on the star: equality at rho plus pulled-back bounds
    reg = z.complex((0,)).summands[0][0]
    assert reg.bound_at(0) == ("eq", 0)
    two_cone = z.complex(tuple(sorted((0, qd.parent_ray(0))))).summands[0][0]
    assert two_cone.bound_at(0) == ("eq", 0)
    z.validate()


def test_extension_wrong_quotient(p2):
    # a presheaf on the fan itself cannot be extended along its own ray
    o = line_bundle(p2, (0, 0, 0))
    with pytest.raises(WrongQuotient):
        extension_by_zero(o, p2, 0)


def test_restriction_of_line_bundle(p2):
    # k with k_rho = 0 restricts to the line bundle of the matched entries
    rho = 0
    qd = quotient_fan(p2, rho)
    k = (0, 2, 3)
    r = restriction(line_bundle(p2, k), rho, qd)
    ell = tuple(k[qd.parent_ray(q)] for q in range(len(qd.fan.rays)))
    expected = line_bundle(qd.fan, ell)
    for key in r.poset.elements:
        assert r.complex(key).summands == expected.complex(key).summands
    r.validate()


def test_restriction_p2_spec_vector(p2):
    qd = quotient_fan(p2, 0)
    r = restriction(line_bundle(p2, (0, 2, 3)), 0, qd)
    got = {qd.parent_ray(q): -r.complex((q,)).summands[0][0].bound_at(q)[1]
           for q in range(2)}
    assert got == {1: 2, 2: 3}


def test_cofibre_identity_with_extension(p2, p1):
    rng = random.Random(9)
    for fan in (p1, p2):
        for rho in range(len(fan.rays)):
            qd = quotient_fan(fan, rho)
            for _ in range(3):
                k = tuple(0 if r == rho else rng.randint(-3, 3)
                          for r in range(len(fan.rays)))
                km = tuple(x - (1 if r == rho else 0)
                           for r, x in enumerate(k))
                inc = line_bundle_inclusion(fan, km, k)
                cof = cofibre(inc)
                zeta = extension_by_zero(restriction(line_bundle(fan, k),
                                                     rho, qd), fan, rho, qd)
                for key in cof.poset.elements:
                    a = cof.complex(key).summands
                    b = zeta.complex(key).summands
                    stripped = {
                        n: tuple(r for r in regs if not r.empty)
                        for n, regs in a.items()
                    }
                    stripped = {n: regs for n, regs in stripped.items() if regs}
                    assert stripped == b, (fan.rank, rho, k, key)


def test_cofibre_of_identity_is_zero(p1):
    o = line_bundle(p1, (1, 1))
    c = cofibre(identity_presheaf_map(o))
    assert all(all(r.empty for r in regs)
               for mc in c.complexes.values()
               for regs in mc.summands.values())


def test_cofibre_rejects_wide_relaxation(p1):
    inc = line_bundle_inclusion(p1, (-2, 0), (0, 0))
    with pytest.raises(NotMonomialInclusion):
        cofibre(inc)


def test_mapping_cone_objectwise(p1):
    inc = line_bundle_inclusion(p1, (-1, 0), (0, 0))
    cone = mapping_cone(inc)
    ok, defects = holim_zero_everywhere(cone)
    assert not ok
    # H^0 drops by one: the twist gap contributes at exactly one m
    assert [m for m, _ in defects] == [(0,)]


def test_mapping_cone_of_identity_holim_zero(p1, p2):
    for fan in (p1, p2):
        o = line_bundle(fan, tuple(1 for _ in fan.rays))
        cone = mapping_cone(identity_presheaf_map(o))
        ok, defects = holim_zero_everywhere(cone)
        assert ok, defects


def test_presheaf_path_contract(p1):
    from fanlim.chains import is_quasi_iso

    o = line_bundle(p1, (1, 0))
    f = identity_presheaf_map(o)
    p, i, pr = presheaf_path(f)
    p.validate()
    i.validate()
    pr.validate()
    for m in p.witnesses():
        _, _, ci = i.evaluate(m)
        _, _, cp = pr.evaluate(m)
        _, _, cf = f.evaluate(m)
        for key in p.poset.elements:
            comp = cp[key].compose(ci[key])
            for n in set(comp.comps) | set(cf[key].comps):
                assert comp.f(n).rows == cf[key].f(n).rows
            assert cp[key].is_surjective()
            assert is_quasi_iso(ci[key])


def test_acyclic_path_presheaf(p1):
    o = line_bundle(p1, (2, 1))
    ap = acyclic_path_presheaf(o)
    ok, defects = holim_zero_everywhere(ap)
    assert ok, defects


def test_monomial_multiplication_is_valid_map(p1):
    f, l = monomial_multiplication(p1, (0, 0), (1,))
    assert l == (-1, 1)
    f.validate()
    cone = mapping_cone(f)
    ok, _ = holim_zero_everywhere(cone)
    assert ok  # multiplication by a monomial is an isomorphism of bundles


def test_holim_graded_p1_degree_minus1(p1):
    o = line_bundle(p1, (-1, -1))
    table = holim_graded(o, "auto")
    assert table.complete
    assert table.total() == {-1: 1}
    assert table.entries == (((0,), -1, 1),)


def test_holim_graded_p1_sections(p1):
    o = line_bundle(p1, (1, 0))
    table = holim_graded(o, "auto")
    assert table.total() == {0: 2}
    ms = sorted(m[0] for m, _, _ in table.entries)
    assert ms == [-1, 0]


def test_holim_graded_matches_cech_oracle(p1):
    for k1 in range(-3, 3):
        for k2 in range(-3, 3):
            o = line_bundle(p1, (k1, k2))
            table = holim_graded(o, "auto")
            total = table.total()
            h0 = sum(cech_p1_dims(k1, k2, m)[0] for m in range(-8, 9))
            h1 = sum(cech_p1_dims(k1, k2, m)[1] for m in range(-8, 9))
            assert total.get(0, 0) == h0
            assert total.get(-1, 0) == h1


def test_holim_graded_explicit_window(p1):
    o = line_bundle(p1, (1, 1))
    table = holim_graded(o, [(-5, 5)])
    assert table.window["mode"] == "box"
    assert table.complete
    assert table.total() == {0: 3}


def test_holim_graded_zero_presheaf(p2):
    table = holim_graded(zero_presheaf(p2), "auto")
    assert table.entries == ()
    assert table.complete


def test_auto_window_requires_complete(a2):
    o = structure_sheaf(a2)
    with pytest.raises(InvalidWindow):
        holim_graded(o, "auto")


def test_oracle_agrees_with_holim_graded(p1):
    # per-degree check through the independent cosimplicial oracle
    o = line_bundle(p1, (2, 1))
    table = holim_graded(o, "auto")
    for m in range(-6, 7):
        d = evaluate_presheaf_degree(o, (m,))
        lims = derived_limit_oracle(d)
        row = {deg: dim for (mm, deg, dim) in table.entries if mm == (m,)}
        assert row == {-k: v for k, v in lims.items()}


def test_direct_sum_presheaves(p1):
    a = line_bundle(p1, (1, 0))
    b = line_bundle(p1, (-1, -1))
    s = direct_sum_presheaves([a, b])
    s.validate()
    table = holim_graded(s, "auto")
    assert table.total() == {0: 2, -1: 1}


def test_twist_map_and_zero_map(p1):
    f = line_bundle_inclusion(p1, (0, 0), (1, 0))
    g = twist_map(f, (-1, 0))
    g.validate()
    z = zero_presheaf_map(line_bundle(p1, (0, 0)), line_bundle(p1, (1, 0)))
    z.validate()

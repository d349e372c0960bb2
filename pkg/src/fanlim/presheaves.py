"""Diagrams of monomial complexes on a fan: line bundles, twisting,
extension by zero, restriction to a divisor, cofibres, and graded
homotopy limits.

A presheaf assigns a monomial complex to every cone and a monomial
structure matrix to every covering relation (bigger cone to its facet).
Construction normalizes all entry shifts away (translating regions), so
stored presheaves always have shift-zero entries with honest M-degree
labels; functoriality and the chain-map property are then verified
exactly, one witness per chamber of the full constraint arrangement.
"""

from dataclasses import dataclass
from fractions import Fraction

from .chains import ChainMap, homology_dims
from .diagrams import DiagramComplex, Poset, holim
from .errors import (
    GradingError,
    InvalidWindow,
    NotMonomialInclusion,
    NotRegular,
    WindowInsufficient,
    WrongQuotient,
)
from .exactmat import Mat
from .fan import quotient_fan
from .lattice import dot, vec_sub
from .monomial import MonomialComplex, MonomialEntry, identity_entry
from .regions import Region, chamber_witnesses


class MonomialPresheaf:
    """Functor from the fan poset (arrows big cone -> facet) to monomial
    complexes, with monomial structure matrices.

    complexes: dict cone_key -> MonomialComplex
    structure: dict (big_key, small_key) -> {degree: {(i, j): MonomialEntry}}
    """

    def __init__(self, fan, complexes, structure, check=True):
        self.fan = fan
        self.poset = Poset.from_fan(fan)
        self.complexes = {}
        for key in self.poset.elements:
            mc = complexes.get(key)
            if mc is None:
                mc = MonomialComplex(fan, {}, {})
            self.complexes[key] = mc
        self.structure = {pair: {int(n): dict(es) for n, es in mats.items() if es}
                          for pair, mats in structure.items()}
        self._normalize()
        if check:
            self.validate()

    # -- shift normalization across the whole diagram -------------------

    def _normalize(self):
        zero = tuple(0 for _ in range(self.fan.rank))
        nodes = []
        for key in self.poset.elements:
            mc = self.complexes[key]
            for n in mc.degrees():
                for i in range(mc.summand_count(n)):
                    nodes.append((key, n, i))
        adj = {v: [] for v in nodes}
        known = set(nodes)

        def connect(src, tgt, shift):
            if src not in known or tgt not in known:
                raise ValueError(f"entry references missing summand {src}->{tgt}")
            adj[src].append((tgt, shift))
            adj[tgt].append((src, tuple(-x for x in shift)))

        for key in self.poset.elements:
            mc = self.complexes[key]
            for n, es in mc.diff.items():
                for (i, j), e in es.items():
                    connect((key, n, j), (key, n - 1, i), e.shift)
        for (big, small), mats in self.structure.items():
            for n, es in mats.items():
                for (i, j), e in es.items():
                    connect((big, n, j), (small, n, i), e.shift)

        offset = {}
        for start in sorted(nodes):
            if start in offset:
                continue
            offset[start] = zero
            stack = [start]
            while stack:
                v = stack.pop()
                for w, rel in adj[v]:
                    t = vec_sub(offset[v], rel)
                    if w in offset:
                        if offset[w] != t:
                            raise GradingError(
                                "presheaf entries admit no consistent grading")
                    else:
                        offset[w] = t
                        stack.append(w)

        if any(v != zero for v in offset.values()):
            new_complexes = {}
            for key in self.poset.elements:
                mc = self.complexes[key]
                summands = {
                    n: tuple(reg.translate(self.fan, offset[(key, n, i)])
                             for i, reg in enumerate(mc.summands[n]))
                    for n in mc.degrees()
                }
                diff = {n: {ij: MonomialEntry(e.coeff, zero)
                            for ij, e in es.items()}
                        for n, es in mc.diff.items()}
                new_complexes[key] = MonomialComplex(self.fan, summands, diff)
            self.complexes = new_complexes
            self.structure = {
                pair: {n: {ij: MonomialEntry(e.coeff, zero)
                           for ij, e in es.items()}
                       for n, es in mats.items()}
                for pair, mats in self.structure.items()
            }
        else:
            # entries may still carry explicit zero shifts of wrong arity
            self.structure = {
                pair: {n: dict(es) for n, es in mats.items()}
                for pair, mats in self.structure.items()
            }

    # -- accessors -------------------------------------------------------

    def complex(self, key):
        return self.complexes[tuple(key)]

    def structure_entries(self, big, small, degree):
        return (self.structure.get((tuple(big), tuple(small)), {})
                .get(degree, {}))

    def all_regions(self):
        out = []
        for key in self.poset.elements:
            out.extend(self.complexes[key].all_regions())
        return out

    def is_zero(self):
        return all(mc.is_zero() for mc in self.complexes.values())

    def witnesses(self):
        return chamber_witnesses(self.fan, self.all_regions())

    # -- validation -------------------------------------------------------

    def validate(self):
        for key in self.poset.elements:
            mc = self.complexes[key]
            rays = set(key)
            for reg in mc.all_regions():
                if not set(reg.rays()) <= rays:
                    raise ValueError(
                        f"regions at cone {key} must only involve its rays")
        for m in self.witnesses():
            self.evaluate(m)  # raises on broken differentials/functoriality
        return True

    # -- evaluation --------------------------------------------------------

    def selection(self, m):
        return {key: self.complexes[key].evaluate_selection(m)
                for key in self.poset.elements}

    def selection_key(self, m):
        out = []
        for key in sorted(self.poset.elements):
            mc = self.complexes[key]
            for n in mc.degrees():
                for i, reg in enumerate(mc.summands[n]):
                    out.append(reg.contains(self.fan, m))
        return tuple(out)

    def evaluate(self, m):
        """The degree-m slice as a functorial diagram of chain complexes."""
        values = {}
        sels = {}
        for key in self.poset.elements:
            mc = self.complexes[key]
            values[key] = mc.evaluate(m)
            sels[key] = mc.evaluate_selection(m)
        maps = {}
        for big, small in self.poset.covers():
            comps = {}
            for n in set(values[big].dims) | set(values[small].dims):
                rows = []
                es = self.structure_entries(big, small, n)
                for i in sels[small].get(n, ()):
                    row = []
                    for j in sels[big].get(n, ()):
                        e = es.get((i, j))
                        row.append(e.coeff if e is not None else Fraction(0))
                    rows.append(tuple(row))
                comps[n] = Mat(tuple(rows),
                               (values[small].dim(n), values[big].dim(n)))
            maps[(big, small)] = ChainMap.make(values[big], values[small],
                                               comps)
        return DiagramComplex(self.poset, values, maps, check=True)

    def holim_at(self, m):
        return homology_dims(holim(self.evaluate(m)))


def evaluate_presheaf_degree(c, m):
    return c.evaluate(m)


# ------------------------------------------------------------------ zoo


def zero_presheaf(fan):
    return MonomialPresheaf(fan, {}, {}, check=False)


def line_bundle(fan, k):
    """The strict sheaf with one degree-0 summand per cone, with region
    bounded below by -k at each of the cone's rays; structure maps are
    the evident inclusions."""
    if not fan.is_regular():
        raise NotRegular("line bundles require a regular fan")
    if len(k) != len(fan.rays):
        raise ValueError("twist vector length must equal the number of rays")
    complexes = {}
    structure = {}
    poset = Poset.from_fan(fan)
    for key in poset.elements:
        reg = Region.make([(r, "ge", -k[r]) for r in key])
        complexes[key] = MonomialComplex(fan, {0: (reg,)}, {})
    for big, small in poset.covers():
        structure[(big, small)] = {0: {(0, 0): identity_entry(fan.rank)}}
    return MonomialPresheaf(fan, complexes, structure, check=False)


def structure_sheaf(fan):
    return line_bundle(fan, tuple(0 for _ in fan.rays))


def free_presheaf(fan, tau, pattern):
    """The diagram that is `pattern` with the cone's positivity constraints
    added on every face of tau, and zero elsewhere."""
    tau = frozenset(tau)
    if tau not in fan.cones:
        raise ValueError(f"{sorted(tau)} is not a cone of the fan")
    for reg in pattern.all_regions():
        if reg.constraints or reg.empty:
            raise ValueError("free presheaf patterns must be constraint-free")
    poset = Poset.from_fan(fan)
    complexes = {}
    structure = {}
    for key in poset.elements:
        if not set(key) <= tau:
            continue
        summands = {
            n: tuple(Region.make([(r, "ge", 0) for r in key])
                     for _ in pattern.summands[n])
            for n in pattern.degrees()
        }
        complexes[key] = MonomialComplex(fan, summands, pattern.diff)
    for big, small in poset.covers():
        if not set(big) <= tau:
            continue
        mats = {}
        for n in pattern.degrees():
            mats[n] = {(i, i): identity_entry(fan.rank)
                       for i in range(len(pattern.summands[n]))}
        structure[(big, small)] = mats
    return MonomialPresheaf(fan, complexes, structure, check=False)


def sphere_pattern(fan, degree=0):
    return MonomialComplex(fan, {degree: (Region.whole(),)}, {})


def twist(c, k):
    """Tensor with the line bundle of k: bounds at each cone's rays move
    by -k there; entries are untouched."""
    fan = c.fan
    if not fan.is_regular():
        raise NotRegular("twisting requires a regular fan")
    complexes = {}
    for key in c.poset.elements:
        delta = {r: -k[r] for r in key}
        mc = c.complexes[key]
        complexes[key] = MonomialComplex(
            fan,
            {n: tuple(reg.shift_bounds(delta) for reg in mc.summands[n])
             for n in mc.degrees()},
            mc.diff,
        )
    return MonomialPresheaf(fan, complexes, c.structure, check=False)


def extension_by_zero(c, fan, rho, qd=None):
    """Extend a presheaf on the quotient fan of `rho` by zero.

    Values away from the star of rho are zero; on the star, regions pull
    back along the projection and pick up the equality at rho."""
    qd = qd or quotient_fan(fan, rho)
    if (c.fan.rank, c.fan.rays, c.fan.cones) != (
            qd.fan.rank, qd.fan.rays, qd.fan.cones):
        raise WrongQuotient("presheaf does not live on the quotient fan")
    inv_cone = {tuple(sorted(q)): parent
                for parent, q in ((p, qd.cone_map[p]) for p in qd.cone_map)}

    def pull_region(reg):
        if reg.empty:
            return reg
        cs = [(qd.parent_ray(r), rel, b) for r, rel, b in reg.constraints]
        cs.append((rho, "eq", 0))
        return Region.make(cs)

    def pull_entry(e):
        return MonomialEntry(e.coeff, qd.lift_dual(e.shift))

    complexes = {}
    structure = {}
    for qkey, parent in sorted(inv_cone.items()):
        mc = c.complexes[qkey]
        pkey = tuple(sorted(parent))
        complexes[pkey] = MonomialComplex(
            fan,
            {n: tuple(pull_region(r) for r in mc.summands[n])
             for n in mc.degrees()},
            {n: {ij: pull_entry(e) for ij, e in es.items()}
             for n, es in mc.diff.items()},
        )
    parent_poset = Poset.from_fan(fan)
    for big, small in parent_poset.covers():
        if rho not in small:
            continue
        qbig = qd.cone_map[frozenset(big)]
        qsmall = qd.cone_map[frozenset(small)]
        mats = c.structure.get((qbig, qsmall), {})
        structure[(big, small)] = {
            n: {ij: pull_entry(e) for ij, e in es.items()}
            for n, es in mats.items()
        }
    return MonomialPresheaf(fan, complexes, structure, check=False)


def restriction(c, rho, qd=None):
    """Restriction to the divisor of rho, as a presheaf on the quotient fan.

    Conewise this kills every basis element above the minimal level at
    rho; the surviving slice is rewritten in the quotient fan's dual
    coordinates via the chosen splitting of the level form."""
    from .monomial import restrict_to_divisor
    fan = c.fan
    qd = qd or quotient_fan(fan, rho)
    w = qd.level_form

    def convert_region(reg):
        if reg.empty:
            return reg
        level = dict((r, b) for r, rel, b in reg.constraints if r == rho)[rho]
        cs = []
        for r, rel, b in reg.constraints:
            if r == rho:
                continue
            qray = next(q for q, t in qd.ray_map.items() if t == r)
            cs.append((qray, rel, b - level * dot(w, fan.rays[r])))
        return Region.make(cs)

    complexes = {}
    structure = {}
    star = sorted(qd.cone_map, key=lambda cn: tuple(sorted(cn)))
    levels = {}
    restricted = {}
    for parent in star:
        pkey = tuple(sorted(parent))
        restricted[pkey] = restrict_to_divisor(c.complexes[pkey], rho)
        lv = {}
        for n in restricted[pkey].degrees():
            for i, reg in enumerate(restricted[pkey].summands[n]):
                if reg.empty:
                    lv[(n, i)] = None
                else:
                    lv[(n, i)] = reg.bound_at(rho)[1]
        levels[pkey] = lv
    for parent in star:
        pkey = tuple(sorted(parent))
        mc = restricted[pkey]
        qkey = qd.cone_map[frozenset(parent)]
        complexes[qkey] = MonomialComplex(
            qd.fan,
            {n: tuple(convert_region(r) for r in mc.summands[n])
             for n in mc.degrees()},
            {n: {ij: MonomialEntry(e.coeff, qd.push_dual(e.shift))
                 for ij, e in es.items()
                 if levels[pkey].get((n, ij[1])) is not None
                 and levels[pkey].get((n - 1, ij[0])) is not None}
             for n, es in mc.diff.items()},
        )
    for (big, small), mats in c.structure.items():
        bigf, smallf = frozenset(big), frozenset(small)
        if rho not in bigf or rho not in smallf:
            continue
        qbig, qsmall = qd.cone_map[bigf], qd.cone_map[smallf]
        out = {}
        for n, es in mats.items():
            kept = {}
            for (i, j), e in es.items():
                src_l = levels[big].get((n, j))
                tgt_l = levels[small].get((n, i))
                if src_l is None or tgt_l is None:
                    continue
                if src_l + dot(e.shift, fan.rays[rho]) != tgt_l:
                    continue
                kept[(i, j)] = MonomialEntry(e.coeff, qd.push_dual(e.shift))
            if kept:
                out[n] = kept
        structure[(qbig, qsmall)] = out
    return MonomialPresheaf(qd.fan, complexes, structure, check=False)


# ------------------------------------------------------------------ maps


class PresheafMap:
    """A map of presheaves given by monomial components, all sharing one
    common shift (a homogeneous monomial map)."""

    def __init__(self, source, target, comps, check=True):
        self.source = source
        self.target = target
        self.comps = {tuple(key): {int(n): dict(es) for n, es in mats.items()}
                      for key, mats in comps.items()}
        shifts = {e.shift for mats in self.comps.values()
                  for es in mats.values() for e in es.values()}
        if len(shifts) > 1:
            raise GradingError("map components must share a single shift")
        rank = source.fan.rank
        self.shift = shifts.pop() if shifts else tuple(0 for _ in range(rank))
        if check:
            self.validate()

    def component(self, key, degree):
        return self.comps.get(tuple(key), {}).get(degree, {})

    def shifted_source(self):
        """The source with regions translated by the map's shift, making
        the components label-preserving."""
        if all(x == 0 for x in self.shift):
            return self.source
        fan = self.source.fan
        complexes = {}
        for key in self.source.poset.elements:
            mc = self.source.complexes[key]
            complexes[key] = MonomialComplex(
                fan,
                {n: tuple(r.translate(fan, self.shift) for r in mc.summands[n])
                 for n in mc.degrees()},
                mc.diff,
            )
        return MonomialPresheaf(fan, complexes, self.source.structure,
                                check=False)

    def validate(self):
        src = self.shifted_source()
        tgt = self.target
        fan = src.fan
        regions = src.all_regions() + tgt.all_regions()
        for m in chamber_witnesses(fan, regions):
            dsrc = src.evaluate(m)
            dtgt = tgt.evaluate(m)
            comps = _evaluated_components(self, src, tgt, m, dsrc, dtgt)
            for key in src.poset.elements:
                comps[key].check_chain_map()
            for big, small in src.poset.covers():
                left = comps[small].compose(dsrc.map_for(big, small))
                right = dtgt.map_for(big, small).compose(comps[big])
                for n in set(left.comps) | set(right.comps):
                    if left.f(n).rows != right.f(n).rows:
                        raise ValueError(
                            f"map is not natural at {big} -> {small}, m={m}")
        return True

    def evaluate(self, m):
        """Slice at m: (diagram of source, diagram of target, components)."""
        src = self.shifted_source()
        tgt = self.target
        dsrc = src.evaluate(m)
        dtgt = tgt.evaluate(m)
        comps = _evaluated_components(self, src, tgt, m, dsrc, dtgt)
        return dsrc, dtgt, comps


def _evaluated_components(fmap, src, tgt, m, dsrc, dtgt):
    out = {}
    for key in src.poset.elements:
        mc_s = src.complexes[key]
        mc_t = tgt.complexes[key]
        sel_s = mc_s.evaluate_selection(m)
        sel_t = mc_t.evaluate_selection(m)
        comps = {}
        for n in set(dsrc.value(key).dims) | set(dtgt.value(key).dims):
            es = fmap.component(key, n)
            rows = []
            for i in sel_t.get(n, ()):
                row = []
                for j in sel_s.get(n, ()):
                    e = es.get((i, j))
                    row.append(e.coeff if e is not None else Fraction(0))
                rows.append(tuple(row))
            comps[n] = Mat(tuple(rows), (dtgt.value(key).dim(n),
                                         dsrc.value(key).dim(n)))
        out[key] = ChainMap.make(dsrc.value(key), dtgt.value(key), comps,
                                 check=False)
    return out


def identity_presheaf_map(c):
    comps = {}
    for key in c.poset.elements:
        mc = c.complexes[key]
        comps[key] = {n: {(i, i): identity_entry(c.fan.rank)
                          for i in range(mc.summand_count(n))}
                      for n in mc.degrees()}
    return PresheafMap(c, c, comps, check=False)


def zero_presheaf_map(source, target):
    return PresheafMap(source, target, {}, check=False)


def line_bundle_inclusion(fan, smaller, bigger):
    """The canonical inclusion of line bundles for componentwise smaller
    twists."""
    if any(a > b for a, b in zip(smaller, bigger)):
        raise ValueError("inclusion requires componentwise smaller twist")
    return PresheafMap(line_bundle(fan, smaller), line_bundle(fan, bigger),
                       {key: {0: {(0, 0): identity_entry(fan.rank)}}
                        for key in Poset.from_fan(fan).elements},
                       check=False)


def monomial_multiplication(fan, k, s):
    """Multiplication by the monomial of exponent s, as a map of line
    bundles O(k) -> O(l) with l_r = k_r - <s, n_r>; never truncates."""
    s = tuple(int(x) for x in s)
    l = tuple(k[r] - dot(s, fan.rays[r]) for r in range(len(fan.rays)))
    comps = {key: {0: {(0, 0): MonomialEntry(1, s)}}
             for key in Poset.from_fan(fan).elements}
    return PresheafMap(line_bundle(fan, k), line_bundle(fan, l), comps,
                       check=False), l


def mapping_cone(fmap):
    """Cone of a presheaf map, a presheaf again: the source sits one
    degree up with negated differential, d(x, y) = (-dx, dy - f(x))."""
    src = fmap.shifted_source()
    tgt = fmap.target
    fan = src.fan
    complexes = {}
    structure = {}
    for key in src.poset.elements:
        s, t = src.complexes[key], tgt.complexes[key]
        degrees = sorted({n + 1 for n in s.degrees()} | set(t.degrees()))
        summands = {}
        for n in degrees:
            summands[n] = tuple(s.summands.get(n - 1, ())) + tuple(
                t.summands.get(n, ()))
        diff = {}
        for n in degrees:
            t_off = len(s.summands.get(n - 2, ()))
            ns = len(s.summands.get(n - 1, ()))
            entries = {}
            for (i, j), e in s.entries(n - 1).items():
                entries[(i, j)] = MonomialEntry(-e.coeff, e.shift)
            for (i, j), e in fmap.component(key, n - 1).items():
                entries[(t_off + i, j)] = MonomialEntry(-e.coeff,
                                                        _zero(fan.rank))
            for (i, j), e in t.entries(n).items():
                entries[(t_off + i, ns + j)] = e
            if entries:
                diff[n] = entries
        complexes[key] = MonomialComplex(fan, summands, diff)
    for big, small in src.poset.covers():
        mats = {}
        sb, st_ = src.complexes[big], src.complexes[small]
        tb, tt = tgt.complexes[big], tgt.complexes[small]
        degrees = sorted({n + 1 for n in sb.degrees()} | set(tb.degrees())
                         | {n + 1 for n in st_.degrees()} | set(tt.degrees()))
        for n in degrees:
            entries = {}
            src_es = src.structure.get((big, small), {}).get(n - 1, {})
            tgt_es = tgt.structure.get((big, small), {}).get(n, {})
            off_row = len(st_.summands.get(n - 1, ()))
            off_col = len(sb.summands.get(n - 1, ()))
            for (i, j), e in src_es.items():
                entries[(i, j)] = e
            for (i, j), e in tgt_es.items():
                entries[(off_row + i, off_col + j)] = e
            if entries:
                mats[n] = entries
        structure[(big, small)] = mats
    return MonomialPresheaf(fan, complexes, structure, check=False)


def _zero(rank):
    return tuple(0 for _ in range(rank))


def twist_map(fmap, k):
    """Twist a presheaf map: both sides are twisted, components kept."""
    return PresheafMap(twist(fmap.source, k), twist(fmap.target, k),
                       fmap.comps, check=False)


def direct_sum_presheaves(cs):
    from .monomial import direct_sum_complexes
    fan = cs[0].fan
    complexes = {}
    structure = {}
    poset = Poset.from_fan(fan)
    for key in poset.elements:
        complexes[key] = direct_sum_complexes([c.complexes[key] for c in cs])
    for big, small in poset.covers():
        mats = {}
        degrees = {n for c in cs
                   for n in c.structure.get((big, small), {})}
        degrees |= {n for c in cs for n in c.complexes[big].degrees()}
        for n in sorted(degrees):
            entries = {}
            off_r = 0
            off_c = 0
            for c in cs:
                for (i, j), e in c.structure.get((big, small), {}).get(n, {}).items():
                    entries[(off_r + i, off_c + j)] = e
                off_r += c.complexes[small].summand_count(n)
                off_c += c.complexes[big].summand_count(n)
            if entries:
                mats[n] = entries
        structure[(big, small)] = mats
    return MonomialPresheaf(fan, complexes, structure, check=False)


def shift_presheaf(c, k):
    """Conewise degree shift by k (odd shifts negate the differentials)."""
    from .monomial import shift_complex
    complexes = {key: shift_complex(mc, k) for key, mc in c.complexes.items()}
    structure = {pair: {n + k: es for n, es in mats.items()}
                 for pair, mats in c.structure.items()}
    return MonomialPresheaf(c.fan, complexes, structure, check=False)


def cone_inclusion(fmap, cone_presheaf=None):
    """The degreewise-split inclusion of the target into the cone."""
    cone_presheaf = cone_presheaf or mapping_cone(fmap)
    src = fmap.shifted_source()
    tgt = fmap.target
    comps = {}
    for key in tgt.poset.elements:
        mats = {}
        s, t = src.complexes[key], tgt.complexes[key]
        for n in t.degrees():
            off = len(s.summands.get(n - 1, ()))
            mats[n] = {(off + i, i): identity_entry(tgt.fan.rank)
                       for i in range(t.summand_count(n))}
        comps[key] = mats
    return PresheafMap(tgt, cone_presheaf, comps, check=False)


def cone_projection(fmap, cone_presheaf=None):
    """The degreewise-split projection of the cone onto the shifted source."""
    cone_presheaf = cone_presheaf or mapping_cone(fmap)
    src = fmap.shifted_source()
    shifted = shift_presheaf(src, 1)
    comps = {}
    for key in src.poset.elements:
        mats = {}
        s = src.complexes[key]
        for n in s.degrees():
            mats[n + 1] = {(i, i): identity_entry(src.fan.rank)
                           for i in range(s.summand_count(n))}
        comps[key] = mats
    return PresheafMap(cone_presheaf, shifted, comps, check=False)


def direct_sum_maps(fmaps):
    """Block-diagonal sum of presheaf maps with a common shift."""
    sources = [f.source for f in fmaps]
    targets = [f.target for f in fmaps]
    src = direct_sum_presheaves(sources)
    tgt = direct_sum_presheaves(targets)
    comps = {}
    for key in src.poset.elements:
        mats = {}
        degrees = {n for f in fmaps for n in f.comps.get(key, {})}
        degrees |= {n for f in fmaps for n in f.source.complexes[key].degrees()}
        for n in sorted(degrees):
            entries = {}
            off_r = 0
            off_c = 0
            for f in fmaps:
                for (i, j), e in f.component(key, n).items():
                    entries[(off_r + i, off_c + j)] = e
                off_r += f.target.complexes[key].summand_count(n)
                off_c += f.source.complexes[key].summand_count(n)
            if entries:
                mats[n] = entries
        comps[key] = mats
    return PresheafMap(src, tgt, comps, check=False)


def presheaf_path(fmap):
    """The conewise canonical path space of a presheaf map, with the
    factorisation maps: returns (P, i, p)."""
    src = fmap.shifted_source()
    tgt = fmap.target
    fan = src.fan
    rank = fan.rank
    complexes = {}
    structure = {}
    layout = {}
    for key in src.poset.elements:
        s, t = src.complexes[key], tgt.complexes[key]
        degrees = sorted(set(s.degrees()) | set(t.degrees())
                         | {n - 1 for n in t.degrees()})
        summands = {}
        lay = {}
        for n in degrees:
            cs = tuple(s.summands.get(n, ()))
            dup = tuple(t.summands.get(n + 1, ()))
            dn = tuple(t.summands.get(n, ()))
            lay[n] = (len(cs), len(dup), len(dn))
            summands[n] = cs + dup + dn
        layout[key] = lay
        diff = {}
        for n in degrees:
            if n - 1 not in lay:
                continue
            a, b, c_ = lay[n]
            a2, b2, c2 = lay[n - 1]
            entries = {}
            for (i, j), e in s.entries(n).items():
                entries[(i, j)] = e
            for (i, j), e in fmap.component(key, n).items():
                entries[(a2 + i, j)] = MonomialEntry(-e.coeff, _zero(rank))
            for (i, j), e in t.entries(n + 1).items():
                entries[(a2 + i, a + j)] = MonomialEntry(-e.coeff, e.shift)
            for i in range(c_):
                entries[(a2 + i, a + b + i)] = identity_entry(rank)
            for (i, j), e in t.entries(n).items():
                entries[(a2 + b2 + i, a + b + j)] = e
            if entries:
                diff[n] = entries
        complexes[key] = MonomialComplex(fan, summands, diff)
    for big, small in src.poset.covers():
        mats = {}
        lb, ls = layout[big], layout[small]
        for n in sorted(set(lb) | set(ls)):
            if n not in lb or n not in ls:
                continue
            entries = {}
            a, b, c_ = lb[n]
            a2, b2, c2 = ls[n]
            for (i, j), e in src.structure.get((big, small), {}).get(n, {}).items():
                entries[(i, j)] = e
            for (i, j), e in tgt.structure.get((big, small), {}).get(n + 1, {}).items():
                entries[(a2 + i, a + j)] = e
            for (i, j), e in tgt.structure.get((big, small), {}).get(n, {}).items():
                entries[(a2 + b2 + i, a + b + j)] = e
            if entries:
                mats[n] = entries
        structure[(big, small)] = mats
    p_presheaf = MonomialPresheaf(fan, complexes, structure, check=False)

    i_comps = {}
    p_comps = {}
    for key in src.poset.elements:
        s, t = src.complexes[key], tgt.complexes[key]
        lay = layout[key]
        i_mats = {}
        p_mats = {}
        for n in lay:
            a, b, c_ = lay[n]
            entries = {}
            for i in range(a):
                entries[(i, i)] = identity_entry(rank)
            for (i, j), e in fmap.component(key, n).items():
                entries[(a + b + i, j)] = MonomialEntry(e.coeff, _zero(rank))
            if entries:
                i_mats[n] = entries
            pentries = {}
            for i in range(c_):
                pentries[(i, a + b + i)] = identity_entry(rank)
            if pentries:
                p_mats[n] = pentries
        i_comps[key] = i_mats
        p_comps[key] = p_mats
    i_map = PresheafMap(src, p_presheaf, i_comps, check=False)
    p_map = PresheafMap(p_presheaf, tgt, p_comps, check=False)
    return p_presheaf, i_map, p_map


def acyclic_path_presheaf(c):
    """The path presheaf of 0 -> c: objectwise acyclic, a homotopy sheaf
    whenever c is."""
    z = zero_presheaf(c.fan)
    p, _, _ = presheaf_path(zero_presheaf_map(z, c))
    return p


def cofibre(fmap):
    """Cokernel of a componentwise region inclusion, as a presheaf.

    Each target summand's region is replaced by the set difference with
    the included summand; representability failures raise
    NotMonomialInclusion."""
    src = fmap.shifted_source()
    tgt = fmap.target
    fan = src.fan
    new_complexes = {}
    for key in src.poset.elements:
        s, t = src.complexes[key], tgt.complexes[key]
        summands = {}
        for n in t.degrees():
            s_regs = s.summands.get(n, ())
            t_regs = t.summands[n]
            if len(s_regs) != len(t_regs):
                raise NotMonomialInclusion(
                    f"summand counts differ at cone {key}, degree {n}")
            es = fmap.component(key, n)
            if set(es) - {(i, i) for i in range(len(t_regs))}:
                raise NotMonomialInclusion("inclusion must be diagonal")
            out = []
            for i, treg in enumerate(t_regs):
                e = es.get((i, i))
                sreg = s_regs[i] if e is not None else Region.empty_region()
                diff = treg.difference(sreg)
                if diff is None:
                    raise NotMonomialInclusion(
                        f"difference not region-representable at {key}")
                out.append(diff)
            summands[n] = tuple(out)
        for n in s.degrees():
            if n not in t.summands and s.summands[n]:
                raise NotMonomialInclusion(
                    f"source has summands outside the target at degree {n}")
        new_complexes[key] = MonomialComplex(fan, summands, t.diff)
    return MonomialPresheaf(fan, new_complexes, tgt.structure, check=False)


# ------------------------------------------------------------- tables


@dataclass(frozen=True)
class GradedCohomologyTable:
    """Per-degree homology dimensions of a graded homotopy limit."""

    window: dict
    complete: bool
    entries: tuple  # sorted tuple of (m, degree, dim)

    def total(self):
        out = {}
        for _, degree, dim in self.entries:
            out[degree] = out.get(degree, 0) + dim
        return out

    def nonzero(self):
        return bool(self.entries)


def _polytope_points(fan, bound):
    """Integer points with |<m, n_rho>| <= bound for every ray.

    Scans a coordinate box and doubles it until no polytope point touches
    the box boundary, so the enumeration provably covers the polytope."""
    from itertools import product as iproduct
    maxray = max((max(abs(x) for x in r) for r in fan.rays), default=1)
    span = max(1, bound * fan.rank * maxray)
    while True:
        pts = []
        touches = False
        for tup in iproduct(range(-span, span + 1), repeat=fan.rank):
            if all(abs(dot(tup, r)) <= bound for r in fan.rays):
                pts.append(tuple(tup))
                if any(abs(x) == span for x in tup):
                    touches = True
        if not touches:
            return sorted(pts)
        span *= 2


def _ray_norm(fan, m):
    return max((abs(dot(m, r)) for r in fan.rays), default=0)


def _sweep_chunk(args):
    c, points = args
    cache = {}
    out = {}
    for m in points:
        key = c.selection_key(m)
        if key not in cache:
            cache[key] = c.holim_at(m)
        if cache[key]:
            out[m] = cache[key]
    return out


def _sweep(c, points, jobs=1):
    """Homotopy limit homology at each point, cached per membership pattern.

    With jobs > 1 the points are chunked over a process pool; the merged
    result is independent of the chunking."""
    points = list(points)
    if jobs <= 1 or len(points) < 4:
        return _sweep_chunk((c, points))
    import multiprocessing as mp
    chunks = [points[i::jobs] for i in range(jobs)]
    ctx = mp.get_context("fork")
    with ctx.Pool(jobs) as pool:
        parts = pool.map(_sweep_chunk, [(c, ch) for ch in chunks])
    out = {}
    for part in parts:
        out.update(part)
    return out


def holim_graded(c, window="auto", jobs=1):
    """Graded homotopy limit table of a monomial presheaf.

    window: "auto" (complete fans only; self-verifying shell check with
    up to two widenings) or an explicit box, a list of (lo, hi) pairs per
    coordinate.  Homology is computed once per membership pattern.
    """
    fan = c.fan
    if window == "auto":
        if not fan.is_complete():
            raise InvalidWindow("auto window requires a complete fan")
        bounds = [abs(b) for reg in c.all_regions() if not reg.empty
                  for _, _, b in reg.constraints]
        b = 1 + max(bounds, default=0) + fan.rank
        for attempt in range(3):
            pts = _polytope_points(fan, b)
            table = _sweep(c, pts, jobs)
            shell_dirty = any(_ray_norm(fan, m) > b - 1 for m in table)
            if not shell_dirty:
                entries = tuple(sorted(
                    (m, n, d) for m, h in table.items() for n, d in h.items()))
                return GradedCohomologyTable(
                    {"mode": "auto", "ray_bound": b}, True, entries)
            b += fan.rank + 1
        raise WindowInsufficient(
            "nonzero homology on the window shell after two widenings")

    box = [(int(lo), int(hi)) for lo, hi in window]
    if len(box) != fan.rank or any(lo > hi for lo, hi in box):
        raise InvalidWindow(f"bad window {window!r}")
    from itertools import product as iproduct
    pts = list(iproduct(*[range(lo, hi + 1) for lo, hi in box]))
    table = _sweep(c, pts, jobs)
    shell_clean = not any(
        any(x == lo or x == hi for x, (lo, hi) in zip(m, box))
        for m in table)
    entries = tuple(sorted(
        (m, n, d) for m, h in table.items() for n, d in h.items()))
    return GradedCohomologyTable({"mode": "box", "box": box}, shell_clean,
                                 entries)


def holim_zero_everywhere(c):
    """Exact test that the homotopy limit vanishes at every m in M.

    One homotopy limit per chamber of the presheaf's arrangement."""
    cache = {}
    defects = []
    for m in c.witnesses():
        key = c.selection_key(m)
        if key not in cache:
            cache[key] = c.holim_at(m)
        if cache[key]:
            defects.append((m, cache[key]))
    return (not defects), defects

"""Diagrams of chain complexes over finite posets, and their limits.

The indexing convention matches contravariant diagrams on a fan: a
diagram stores one complex per poset element and one chain map per
covering pair (big, small), the map going from the big element's value
to the small one's.  Limits, the canonical fibrant replacement, homotopy
limits and the cosimplicial derived-limit oracle all live here.
"""

from dataclasses import dataclass

from .chains import (
    ChainMap,
    FiniteChainComplex,
    homology_dims,
    path_factorisation,
    zero_complex,
)
from .errors import InconsistentDiagram
from .exactmat import Mat


@dataclass(frozen=True)
class Poset:
    """Finite poset with explicit order; elements are hashable keys."""

    elements: tuple
    below: frozenset  # pairs (a, b) with b < a, transitively closed

    @staticmethod
    def from_order(elements, less_than):
        """Build from a comparison predicate less_than(a, b) meaning b < a."""
        elements = tuple(elements)
        below = frozenset((a, b) for a in elements for b in elements
                          if a != b and less_than(a, b))
        return Poset(elements, below)

    @staticmethod
    def from_fan(fan):
        keys = tuple(fan.cone_key(c) for c in fan.sorted_cones())
        return Poset.from_order(keys, lambda a, b: set(b) < set(a))

    def lt(self, a, b):
        """True iff b is strictly below a."""
        return (a, b) in self.below

    def covers(self):
        """Pairs (a, b) with b covered by a (nothing strictly between)."""
        out = []
        for a, b in sorted(self.below):
            if not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                out.append((a, b))
        return out

    def strictly_below(self, a):
        return tuple(b for b in self.elements if self.lt(a, b))

    def restrict(self, keep):
        keep = tuple(k for k in self.elements if k in set(keep))
        below = frozenset((a, b) for (a, b) in self.below
                          if a in set(keep) and b in set(keep))
        return Poset(keep, below)

    def sorted_elements(self):
        """Elements ordered by poset height, ties by key."""
        height = {}
        for e in sorted(self.elements, key=lambda e: (len(self.strictly_below(e)), e)):
            height[e] = len(self.strictly_below(e))
        return tuple(sorted(self.elements, key=lambda e: (height[e], e)))


class DiagramComplex:
    """A functor from a finite poset (arrows big -> small) to complexes."""

    def __init__(self, poset, values, maps, check=True):
        self.poset = poset
        self.values = {e: values.get(e, zero_complex()) for e in poset.elements}
        self.maps = dict(maps)
        self._hom = None
        if check:
            self.validate()

    def value(self, e):
        return self.values[e]

    def cover_map(self, a, b):
        m = self.maps.get((a, b))
        if m is None:
            raise InconsistentDiagram(f"missing structure map {a} -> {b}")
        return m

    def map_for(self, a, b):
        """The composite map value(a) -> value(b) for any b <= a."""
        if a == b:
            from .chains import identity_map
            return identity_map(self.values[a])
        return self._homs()[(a, b)]

    def _homs(self):
        if self._hom is not None:
            return self._hom
        covers = self.poset.covers()
        hom = {}
        for a, b in covers:
            hom[(a, b)] = self.cover_map(a, b)
        # close under composition, checking independence of the path
        order = self.poset.sorted_elements()
        for a in order:
            for b in order:
                if not self.poset.lt(a, b) or (a, b) in hom:
                    continue
                candidates = []
                for (x, y) in covers:
                    if x == a and (self.poset.lt(y, b) or y == b):
                        tail = hom[(y, b)] if y != b else None
                        comp = (tail.compose(hom[(a, y)])
                                if tail is not None else hom[(a, y)])
                        candidates.append(comp)
                if not candidates:
                    raise InconsistentDiagram(f"no path from {a} to {b}")
                first = candidates[0]
                for other in candidates[1:]:
                    for n in set(first.comps) | set(other.comps):
                        if first.f(n).rows != other.f(n).rows:
                            raise InconsistentDiagram(
                                f"inconsistent composites {a} -> {b}")
                hom[(a, b)] = first
        self._hom = hom
        return hom

    def validate(self):
        for a, b in self.poset.covers():
            m = self.cover_map(a, b)
            if m.source.dims != self.values[a].dims:
                raise InconsistentDiagram(f"map {a}->{b} has wrong source")
            if m.target.dims != self.values[b].dims:
                raise InconsistentDiagram(f"map {a}->{b} has wrong target")
            m.check_chain_map()
        self._homs()

    def restrict(self, keep):
        sub = self.poset.restrict(keep)
        values = {e: self.values[e] for e in sub.elements}
        maps = {}
        for a, b in sub.covers():
            maps[(a, b)] = self.map_for(a, b)
        return DiagramComplex(sub, values, maps, check=False)

    def degrees(self):
        degs = set()
        for v in self.values.values():
            degs |= set(v.dims)
        return sorted(degs)


def constant_diagram(poset, c):
    from .chains import identity_map
    values = {e: c for e in poset.elements}
    maps = {(a, b): identity_map(c) for a, b in poset.covers()}
    return DiagramComplex(poset, values, maps, check=False)


def finite_limit(d):
    """The limit complex of a diagram, with its projection maps.

    Per chain degree the limit is the solution space of
    x_small = f(x_big) over all covering pairs, realised as a subcomplex
    of the product with a canonical (reduced row echelon) basis.
    """
    elems = tuple(sorted(d.poset.elements))
    covers = d.poset.covers()
    degs = d.degrees()

    offsets = {}
    bases = {}
    dims = {}
    for n in degs:
        off = {}
        total = 0
        for e in elems:
            off[e] = total
            total += d.value(e).dim(n)
        offsets[n] = (off, total)
        rows = []
        for a, b in covers:
            f = d.map_for(a, b).f(n)
            tb = d.value(b).dim(n)
            if tb == 0:
                continue
            for i in range(tb):
                row = [0] * total
                for j in range(d.value(a).dim(n)):
                    row[off[a] + j] = f[i, j]
                row[off[b] + i] -= 1
                rows.append(tuple(row))
        if total == 0:
            bases[n] = Mat.zero(0, 0)
            dims[n] = 0
            continue
        constraint = Mat(tuple(rows), (len(rows), total)) if rows else Mat.zero(0, total)
        kern = constraint.nullspace()  # total x k
        bases[n] = kern
        dims[n] = kern.n

    boundary = {}
    for n in degs:
        if dims.get(n, 0) == 0 or dims.get(n - 1, 0) == 0:
            continue
        off_n, total_n = offsets[n]
        off_p, total_p = offsets[n - 1]
        # product boundary applied to the kernel basis
        bd = Mat.zero(total_p, total_n)
        rows = [[0] * total_n for _ in range(total_p)]
        for e in elems:
            de = d.value(e).d(n)
            for i in range(de.m):
                for j in range(de.n):
                    rows[off_p[e] + i][off_n[e] + j] = de[i, j]
        bd = Mat(tuple(tuple(r) for r in rows), (total_p, total_n))
        image = bd @ bases[n]
        sol = bases[n - 1].solve(image)
        if sol is None:
            raise InconsistentDiagram("boundary does not preserve the limit")
        boundary[n] = sol

    lim = FiniteChainComplex.make(dims, boundary, check=False)
    projections = {}
    for e in elems:
        comps = {}
        for n in degs:
            off, total = offsets[n]
            de = d.value(e).dim(n)
            rows = []
            for i in range(de):
                base_row = tuple(bases[n][off[e] + i, j] for j in range(dims[n]))
                rows.append(base_row)
            comps[n] = Mat(tuple(rows), (de, dims[n]))
        projections[e] = ChainMap.make(lim, d.value(e), comps, check=False)
    return lim, projections


def fibrant_replacement(d):
    """Inductive path-space replacement of a diagram.

    Processes elements in ascending poset height (ties by key); each value
    is replaced by the canonical path space of its map into the limit of
    the already-replaced strictly smaller part.  Returns (PC, j) with j a
    dict of objectwise quasi-isomorphisms value -> PC value.
    """
    order = d.poset.sorted_elements()
    pc_values = {}
    pc_maps = {}
    j = {}
    partial = None

    for e in order:
        below = d.poset.strictly_below(e)
        sub_poset = d.poset.restrict(below)
        sub_values = {b: pc_values[b] for b in below}
        sub_maps = {}
        for a, b in sub_poset.covers():
            sub_maps[(a, b)] = pc_maps[(a, b)]
        sub = DiagramComplex(sub_poset, sub_values, sub_maps, check=False)
        lim, projections = finite_limit(sub)

        # induced map value(e) -> lim of replaced faces
        comps = {}
        for n in lim.degrees():
            cols = d.value(e).dim(n)
            if lim.dim(n) == 0 or cols == 0:
                comps[n] = Mat.zero(lim.dim(n), cols)
                continue
            # solve: limit coordinates of the tuple (j_b . d_{e,b})
            off = {}
            total = 0
            elems = tuple(sorted(sub_poset.elements))
            for b in elems:
                off[b] = total
                total += pc_values[b].dim(n)
            rows = [[0] * cols for _ in range(total)]
            for b in elems:
                g = j[b].compose(d.map_for(e, b)).f(n)
                for i in range(g.m):
                    for jj in range(g.n):
                        rows[off[b] + i][jj] = g[i, jj]
            tup = Mat(tuple(tuple(r) for r in rows), (total, cols))
            # limit basis solves uniquely
            basis_rows = []
            for b in elems:
                pr = projections[b].f(n)
                for i in range(pr.m):
                    basis_rows.append(tuple(pr[i, jj] for jj in range(lim.dim(n))))
            basis = Mat(tuple(basis_rows), (total, lim.dim(n)))
            sol = basis.solve(tup)
            if sol is None:
                raise InconsistentDiagram("matching tuple misses the limit")
            comps[n] = sol
        f = ChainMap.make(d.value(e), lim, comps, check=False)
        p_complex, i_map, p_map = path_factorisation(f)
        pc_values[e] = p_complex
        j[e] = i_map
        for b in below:
            pc_maps[(e, b)] = projections[b].compose(p_map)

    full_maps = {}
    for a, b in d.poset.covers():
        full_maps[(a, b)] = pc_maps[(a, b)]
    pc = DiagramComplex(d.poset, pc_values, full_maps, check=False)
    return pc, j


def holim(d):
    """Homotopy limit: the limit of the canonical fibrant replacement."""
    pc, _ = fibrant_replacement(d)
    lim, _ = finite_limit(pc)
    return lim


def holim_homology(d):
    return homology_dims(holim(d))


@dataclass(frozen=True)
class DiagramMap:
    source: DiagramComplex
    target: DiagramComplex
    comps: dict  # element -> ChainMap

    def validate(self):
        for a, b in self.source.poset.covers():
            left = self.comps[b].compose(self.source.map_for(a, b))
            right = self.target.map_for(a, b).compose(self.comps[a])
            for n in set(left.comps) | set(right.comps):
                if left.f(n).rows != right.f(n).rows:
                    raise InconsistentDiagram(f"map not natural at {a} -> {b}")

    def is_objectwise_quasi_iso(self):
        from .chains import is_quasi_iso
        return all(is_quasi_iso(f) for f in self.comps.values())


def holim_map(fmap):
    """The induced map holim(source) -> holim(target) of a diagram map.

    Path spaces and limits are functorial; this replays the fibrant
    replacement on both sides, threading the comparison through.
    """
    src, tgt = fmap.source, fmap.target
    order = src.poset.sorted_elements()
    pcs, js, pcs2, js2 = {}, {}, {}, {}
    src_maps, tgt_maps = {}, {}
    carried = {}  # element -> ChainMap pcs[e] -> pcs2[e]

    for e in order:
        below = src.poset.strictly_below(e)
        sub_poset = src.poset.restrict(below)
        sub1 = DiagramComplex(sub_poset, {b: pcs[b] for b in below},
                              {c: src_maps[c] for c in sub_poset.covers()},
                              check=False)
        sub2 = DiagramComplex(sub_poset, {b: pcs2[b] for b in below},
                              {c: tgt_maps[c] for c in sub_poset.covers()},
                              check=False)
        lim1, proj1 = finite_limit(sub1)
        lim2, proj2 = finite_limit(sub2)
        f1 = _matching_map(src, e, sub_poset, pcs, js, lim1, proj1)
        f2 = _matching_map(tgt, e, sub_poset, pcs2, js2, lim2, proj2)
        p1, i1, pr1 = path_factorisation(f1)
        p2, i2, pr2 = path_factorisation(f2)
        pcs[e], js[e] = p1, i1
        pcs2[e], js2[e] = p2, i2
        for b in below:
            src_maps[(e, b)] = proj1[b].compose(pr1)
            tgt_maps[(e, b)] = proj2[b].compose(pr2)
        # limit comparison lim1 -> lim2 via the carried component maps
        lim_comp = {}
        for n in set(lim1.dims) | set(lim2.dims):
            if lim1.dim(n) == 0 or lim2.dim(n) == 0:
                lim_comp[n] = Mat.zero(lim2.dim(n), lim1.dim(n))
                continue
            elems = tuple(sorted(sub_poset.elements))
            rows = []
            for b in elems:
                g = carried[b].compose(proj1[b]).f(n)
                rows.extend(g.rows)
            total = sum(pcs2[b].dim(n) for b in elems)
            tup = Mat(tuple(rows), (total, lim1.dim(n)))
            basis_rows = []
            for b in elems:
                basis_rows.extend(proj2[b].f(n).rows)
            basis = Mat(tuple(basis_rows), (total, lim2.dim(n)))
            sol = basis.solve(tup)
            if sol is None:
                raise InconsistentDiagram("limit comparison failed")
            lim_comp[n] = sol
        lim_map = ChainMap.make(lim1, lim2, lim_comp, check=False)
        # path space functoriality: (c, d', d) -> (alpha c, beta d', beta d)
        alpha = fmap.comps[e]
        comps = {}
        for n in set(p1.dims) | set(p2.dims):
            blocks = [
                [alpha.f(n), Mat.zero(alpha.target.dim(n), lim1.dim(n + 1)),
                 Mat.zero(alpha.target.dim(n), lim1.dim(n))],
                [Mat.zero(lim2.dim(n + 1), alpha.source.dim(n)),
                 lim_map.f(n + 1), Mat.zero(lim2.dim(n + 1), lim1.dim(n))],
                [Mat.zero(lim2.dim(n), alpha.source.dim(n)),
                 Mat.zero(lim2.dim(n), lim1.dim(n + 1)), lim_map.f(n)],
            ]
            comps[n] = Mat.block(blocks)
        carried[e] = ChainMap.make(p1, p2, comps, check=False)

    diag1 = DiagramComplex(src.poset, pcs,
                           {c: src_maps[c] for c in src.poset.covers()},
                           check=False)
    diag2 = DiagramComplex(tgt.poset, pcs2,
                           {c: tgt_maps[c] for c in tgt.poset.covers()},
                           check=False)
    lim1, proj1 = finite_limit(diag1)
    lim2, proj2 = finite_limit(diag2)
    comps = {}
    for n in set(lim1.dims) | set(lim2.dims):
        if lim1.dim(n) == 0 or lim2.dim(n) == 0:
            comps[n] = Mat.zero(lim2.dim(n), lim1.dim(n))
            continue
        elems = tuple(sorted(src.poset.elements))
        rows = []
        for b in elems:
            rows.extend(carried[b].compose(proj1[b]).f(n).rows)
        total = sum(pcs2[b].dim(n) for b in elems)
        tup = Mat(tuple(rows), (total, lim1.dim(n)))
        basis_rows = []
        for b in elems:
            basis_rows.extend(proj2[b].f(n).rows)
        basis = Mat(tuple(basis_rows), (total, lim2.dim(n)))
        sol = basis.solve(tup)
        if sol is None:
            raise InconsistentDiagram("holim comparison failed")
        comps[n] = sol
    return ChainMap.make(lim1, lim2, comps, check=False)


def _matching_map(d, e, sub_poset, pc_values, j, lim, projections):
    comps = {}
    for n in lim.degrees():
        cols = d.value(e).dim(n)
        if lim.dim(n) == 0 or cols == 0:
            comps[n] = Mat.zero(lim.dim(n), cols)
            continue
        elems = tuple(sorted(sub_poset.elements))
        rows = []
        for b in elems:
            rows.extend(j[b].compose(d.map_for(e, b)).f(n).rows)
        total = sum(pc_values[b].dim(n) for b in elems)
        tup = Mat(tuple(rows), (total, cols))
        basis_rows = []
        for b in elems:
            basis_rows.extend(projections[b].f(n).rows)
        basis = Mat(tuple(basis_rows), (total, lim.dim(n)))
        sol = basis.solve(tup)
        if sol is None:
            raise InconsistentDiagram("matching tuple misses the limit")
        comps[n] = sol
    return ChainMap.make(d.value(e), lim, comps, check=False)


def derived_limit_oracle(d):
    """Higher inverse limits of a diagram of modules in chain degree 0.

    Independent of the path-space machinery: computes the cohomology of
    the normalized cosimplicial replacement, whose p-cochains are the
    product over strict chains a_0 > a_1 > ... > a_p of the value at a_p
    with the alternating-sum differential.
    """
    for e, v in d.values.items():
        if any(n != 0 for n in v.dims):
            raise ValueError("oracle needs modules concentrated in degree 0")

    poset = d.poset
    chains_by_len = {0: [(e,) for e in sorted(poset.elements)]}
    p = 0
    while chains_by_len[p]:
        nxt = []
        for ch in chains_by_len[p]:
            for b in sorted(poset.elements):
                if poset.lt(ch[-1], b):
                    nxt.append(ch + (b,))
        p += 1
        chains_by_len[p] = nxt
    max_p = p - 1

    def chain_dim(ch):
        return d.value(ch[-1]).dim(0)

    offsets = {}
    totals = {}
    for q in range(max_p + 1):
        off = {}
        t = 0
        for ch in chains_by_len[q]:
            off[ch] = t
            t += chain_dim(ch)
        offsets[q], totals[q] = off, t

    dims_out = {}
    mats = {}
    for q in range(max_p):
        rows = [[0] * totals[q] for _ in range(totals[q + 1])]
        for ch in chains_by_len[q + 1]:
            tgt_off = offsets[q + 1][ch]
            tdim = chain_dim(ch)
            for i in range(q + 1):
                face = ch[:i] + ch[i + 1:]
                sign = (-1) ** i
                src_off = offsets[q][face]
                for t in range(tdim):
                    rows[tgt_off + t][src_off + t] += sign
            face = ch[:-1]
            sign = (-1) ** (q + 1)
            src_off = offsets[q][face]
            g = d.map_for(ch[-2], ch[-1]).f(0)
            for t in range(tdim):
                for s in range(g.n):
                    rows[tgt_off + t][src_off + s] += sign * g[t, s]
        mats[q] = Mat(tuple(tuple(r) for r in rows), (totals[q + 1], totals[q]))

    out = {}
    for q in range(max_p + 1):
        d_in = mats.get(q - 1, Mat.zero(totals.get(q, 0), 0))
        d_out = mats.get(q, Mat.zero(0, totals.get(q, 0)))
        h = totals.get(q, 0) - d_in.rank() - d_out.rank()
        if h:
            out[q] = h
    return out

"""Decision procedures on presheaves: the recursive weak-generator twist
set, homotopy-sheaf detection, and colocal equivalence and acyclicity.

The generator set is built by induction on dimension via quotient fans;
for complete fans it consists of the indicator vectors of the cones.
All verdicts default to the exact chamber mode (one computation per
chamber of the relevant arrangement covers every degree m of the dual
lattice); a windowed mode with the shell check is available as well.
"""

from dataclasses import dataclass
from itertools import permutations

from .chains import homology_dims
from .errors import NotHomotopySheaf, NotRegular, WindowInsufficient
from .fan import quotient_fan
from .lattice import hnf_rows
from .monomial import complex_cone, localize_along_face
from .presheaves import holim_graded, holim_zero_everywhere, mapping_cone, twist, twist_map
from .regions import chamber_witnesses


@dataclass(frozen=True)
class GeneratorSet:
    """A finite set of twist vectors attached to a fan."""

    vectors: frozenset
    fan: object

    def sorted_vectors(self):
        return sorted(self.vectors)

    def __iter__(self):
        return iter(self.sorted_vectors())

    def __len__(self):
        return len(self.vectors)


_MEMO = {}
_PERMUTATION_CAP = 7


def _canonical_key(fan):
    """A fan-isomorphism invariant, with the ray permutation realizing it.

    The evaluation lattice {(<m, n_r>)_r : m in M} together with the cone
    list determines the fan up to unimodular change of coordinates; taking
    the lexicographically smallest Hermite basis over all ray orderings
    makes the key permutation-invariant too.  Returns (key, perm) where
    perm maps canonical positions to original ray indices.
    """
    k = len(fan.rays)
    if k > _PERMUTATION_CAP:
        perms = [tuple(range(k))]
    else:
        perms = list(permutations(range(k)))
    best = None
    for perm in perms:
        rows = tuple(tuple(fan.rays[perm[j]][i] for j in range(k))
                     for i in range(fan.rank))
        basis = hnf_rows(rows)
        inv = {orig: pos for pos, orig in enumerate(perm)}
        cones = tuple(sorted(tuple(sorted(inv[r] for r in c))
                             for c in fan.cones))
        cand = (fan.rank, basis, cones)
        if best is None or cand < best[0]:
            best = (cand, perm)
    return best


def r_sigma(fan):
    """The recursive twist-vector generator set of a regular fan.

    A fan with a unique maximal cone contributes only the zero vector;
    otherwise the sets of all ray quotients are pulled back through the
    ray correspondence and unioned with their unit-vector translates.
    Results are memoized on the fan isomorphism type.
    """
    if not fan.is_regular():
        raise NotRegular("generator sets are defined for regular fans")
    key, perm = _canonical_key(fan)
    cached = _MEMO.get(key)
    if cached is not None:
        return GeneratorSet(
            frozenset(_unpermute(v, perm) for v in cached), fan)

    nrays = len(fan.rays)
    maxc = fan.maximal_cones()
    if len(maxc) == 1:
        vectors = {tuple(0 for _ in range(nrays))}
    else:
        vectors = set()
        for rho in range(nrays):
            qd = quotient_fan(fan, rho)
            sub = r_sigma(qd.fan)
            for v in sub.vectors:
                lifted = [0] * nrays
                for qray, entry in enumerate(v):
                    lifted[qd.parent_ray(qray)] = entry
                vectors.add(tuple(lifted))
                translated = list(lifted)
                translated[rho] += 1
                vectors.add(tuple(translated))
    _MEMO[key] = frozenset(_permute(v, perm) for v in vectors)
    return GeneratorSet(frozenset(vectors), fan)


def _permute(v, perm):
    return tuple(v[perm[j]] for j in range(len(v)))


def _unpermute(v, perm):
    out = [0] * len(v)
    for j, orig in enumerate(perm):
        out[orig] = v[j]
    return tuple(out)


def indicator_vectors(fan):
    """The cone indicator twist vectors, one per cone of the fan."""
    return {fan.indicator(c) for c in fan.cones}


# ------------------------------------------------------------- sheaves


@dataclass(frozen=True)
class SheafVerdict:
    """Outcome of the homotopy-sheaf test, per covering relation."""

    mode: str
    relations: tuple  # ((big, small), passed, defects)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.relations)

    def failures(self):
        return tuple((pair, defects) for pair, ok, defects in self.relations
                     if not ok)


def _comparison_cone(c, big, small):
    """Mapping cone of localize(C^big, small) -> C^small along the
    structure matrix."""
    localized = localize_along_face(c.complexes[big], frozenset(big),
                                    frozenset(small))
    comps = c.structure.get((big, small), {})
    return complex_cone(comps, localized, c.complexes[small])


def is_homotopy_sheaf(c, mode="chambers", window=None):
    """Test whether every face comparison map is a quasi-isomorphism.

    For each covering relation the complex over the bigger cone is
    localized to the facet and compared with the facet's value; the
    verdict records the homology of the mapping cone wherever nonzero.
    """
    relations = []
    for big, small in c.poset.covers():
        cone = _comparison_cone(c, big, small)
        if mode == "chambers":
            defects = _cone_defects_chambers(cone)
        elif mode == "window":
            defects = _cone_defects_window(cone, window)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        relations.append(((big, small), not defects, tuple(defects)))
    return SheafVerdict(mode, tuple(relations))


def _cone_defects_chambers(cone):
    g = cone.graded_form()
    defects = []
    for m in chamber_witnesses(g.fan, g.all_regions()):
        h = homology_dims(g.evaluate(m))
        if h:
            defects.append((m, h))
    return defects


def _cone_defects_window(cone, window):
    g = cone.graded_form()
    fan = g.fan
    if window is None:
        raise ValueError("window mode needs an explicit window")
    from itertools import product
    box = [(int(lo), int(hi)) for lo, hi in window]
    defects = []
    shell_defect = False
    for tup in product(*[range(lo, hi + 1) for lo, hi in box]):
        h = homology_dims(g.evaluate(tup))
        if h:
            defects.append((tup, h))
            if any(x == lo or x == hi for x, (lo, hi) in zip(tup, box)):
                shell_defect = True
    if shell_defect:
        raise WindowInsufficient("sheaf defect on the window shell")
    return defects


# ------------------------------------------------------------- colocal


def _neg(k):
    return tuple(-x for x in k)


def is_colocally_acyclic(c, generators, window=None):
    """True iff the homotopy limit of every generator-twisted copy
    vanishes in all degrees, at every m."""
    for k in generators:
        twisted = twist(c, _neg(k))
        if window is None:
            ok, _ = holim_zero_everywhere(twisted)
            if not ok:
                return False
        else:
            table = holim_graded(twisted, window)
            if table.nonzero():
                return False
    return True


def colocal_acyclicity_report(c, generators, window=None):
    """Per-generator defect report; see the JSON report format."""
    checks = []
    for k in generators:
        twisted = twist(c, _neg(k))
        if window is None:
            ok, defects = holim_zero_everywhere(twisted)
        else:
            table = holim_graded(twisted, window)
            ok = not table.nonzero()
            defects = [(m, {deg: dim}) for m, deg, dim in table.entries]
        checks.append({"k": list(k), "acyclic": ok,
                       "defects": [[list(m), {str(d): v for d, v in h.items()}]
                                   for m, h in defects]})
    return checks


def is_colocal_equivalence(f, generators, window=None):
    """True iff twisting by minus each generator makes the map a homotopy
    limit quasi-isomorphism; computed through the cone presheaf."""
    for k in generators:
        cone = mapping_cone(twist_map(f, _neg(k)))
        if window is None:
            ok, _ = holim_zero_everywhere(cone)
            if not ok:
                return False
        else:
            table = holim_graded(cone, window)
            if table.nonzero():
                return False
    return True


def objectwise_quasi_iso(f):
    """Exact objectwise quasi-isomorphism test of a presheaf map."""
    from .monomial import MonomialEntry
    src = f.shifted_source()
    tgt = f.target
    zero = tuple(0 for _ in range(src.fan.rank))
    for key in src.poset.elements:
        comps = {}
        for n in (set(src.complexes[key].degrees())
                  | set(tgt.complexes[key].degrees())):
            es = f.component(key, n)
            if es:
                # in shifted-source labels the components preserve degree
                comps[n] = {ij: MonomialEntry(e.coeff, zero)
                            for ij, e in es.items()}
        cone = complex_cone(comps, src.complexes[key], tgt.complexes[key])
        g = cone.graded_form()
        for m in chamber_witnesses(g.fan, g.all_regions()):
            if homology_dims(g.evaluate(m)):
                return False
    return True


def weak_generator_report(f, fan=None, generators=None, window=None):
    """Both routes to 'is this map of homotopy sheaves an equivalence':
    the objectwise quasi-isomorphism check and the colocal check against
    the generator set.  Only licensed for homotopy sheaves."""
    fan = fan or f.source.fan
    if not is_homotopy_sheaf(f.source).passed:
        raise NotHomotopySheaf("source is not a homotopy sheaf")
    if not is_homotopy_sheaf(f.target).passed:
        raise NotHomotopySheaf("target is not a homotopy sheaf")
    generators = generators or r_sigma(fan)
    return {
        "objectwise_qiso": objectwise_quasi_iso(f),
        "colocal": is_colocal_equivalence(f, generators, window),
    }

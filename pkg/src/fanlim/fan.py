"""Regular rational fans as combinatorial objects.

Cones are stored as frozensets of ray indices; because all fans here are
simplicial, the face lattice of a cone is the subset lattice of its rays.
All data is exact (integer ray generators, rational witnesses).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, combinations

from . import lattice
from .errors import (
    FanError,
    IntersectionNotFace,
    NonPrimitiveRay,
    NotPointed,
    NotRegular,
    UnknownRay,
)


def _subsets(s):
    s = tuple(sorted(s))
    return chain.from_iterable(combinations(s, r) for r in range(len(s) + 1))


class Fan:
    """A fan of pointed simplicial rational cones, validated on construction.

    Use :func:`validate_fan` (or :meth:`Fan.from_data`) rather than the raw
    constructor; construction checks primitivity of the rays, pointedness of
    each cone, face closure, and the pairwise fan condition.
    """

    def __init__(self, rank, rays, max_cones, _validated=False):
        self.rank = int(rank)
        self.rays = tuple(tuple(int(x) for x in r) for r in rays)
        closure = set()
        for c in max_cones:
            c = frozenset(int(i) for i in c)
            for f in _subsets(c):
                closure.add(frozenset(f))
        closure.add(frozenset())
        self.cones = frozenset(closure)
        self._regular = None
        self._complete = None
        if not _validated:
            self._validate()

    # -- construction-time checks -------------------------------------

    def _validate(self):
        if self.rank < 0:
            raise FanError("rank must be nonnegative")
        for r in self.rays:
            if len(r) != self.rank:
                raise FanError(f"ray {r} does not have rank {self.rank}")
            if lattice.vec_gcd(r) != 1:
                raise NonPrimitiveRay(f"ray {r} is zero or not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("duplicate ray generators")
        used = set().union(*self.cones) if self.cones else set()
        for i in used:
            if not 0 <= i < len(self.rays):
                raise UnknownRay(f"cone references ray index {i}")
        if used != set(range(len(self.rays))):
            raise FanError("every listed ray must appear in some cone")
        for c in self.cones:
            vecs = [self.rays[i] for i in sorted(c)]
            if vecs and not _independent(vecs):
                raise NotPointed(f"cone {sorted(c)} has dependent generators")
        maxc = self.maximal_cones()
        for a in maxc:
            for b in maxc:
                if a < b or (a == b):
                    continue
                _check_pair(self, a, b)

    # -- basic combinatorics ------------------------------------------

    def cone_key(self, cone):
        return tuple(sorted(cone))

    def sorted_cones(self):
        return sorted(self.cones, key=lambda c: (len(c), tuple(sorted(c))))

    def maximal_cones(self):
        return [c for c in self.cones
                if not any(c < d for d in self.cones)]

    def dim(self, cone):
        return len(cone)

    def star(self, rho):
        """All cones containing the ray `rho`."""
        if not 0 <= rho < len(self.rays):
            raise UnknownRay(f"no ray with index {rho}")
        return {c for c in self.cones if rho in c}

    def covering_pairs(self):
        """Pairs (big, small) with small a facet of big."""
        out = []
        for c in self.cones:
            for i in sorted(c):
                out.append((c, c - {i}))
        return sorted(set(out), key=lambda p: (len(p[0]), tuple(sorted(p[0])),
                                               tuple(sorted(p[1]))))

    def indicator(self, cone):
        """The twist vector with 1 at the rays of `cone` and 0 elsewhere."""
        return tuple(1 if i in cone else 0 for i in range(len(self.rays)))

    def unit_twist(self, rho):
        return tuple(1 if i == rho else 0 for i in range(len(self.rays)))

    # -- membership and global geometry --------------------------------

    def cone_contains(self, cone, point):
        """Exact membership of a rational point in the closed cone."""
        vecs = [self.rays[i] for i in sorted(cone)]
        point = tuple(Fraction(x) for x in point)
        if not vecs:
            return all(x == 0 for x in point)
        coeffs = _solve_in_span(vecs, point)
        if coeffs is None:
            return False
        return all(c >= 0 for c in coeffs)

    def supports(self, point):
        return any(self.cone_contains(c, point) for c in self.maximal_cones())

    def is_regular(self):
        """Every cone is spanned by part of a Z-basis of the lattice."""
        if self._regular is None:
            self._regular = all(
                lattice.spans_saturated([self.rays[i] for i in sorted(c)], self.rank)
                for c in self.maximal_cones()
            )
        return self._regular

    def is_complete(self):
        """Support equals the whole space.

        Criterion: the fan is nonempty, every maximal cone has dimension
        equal to the rank, and every facet (codimension-1 cone) lies in
        exactly two maximal cones.
        """
        if self._complete is None:
            self._complete = self._compute_complete()
        return self._complete

    def _compute_complete(self):
        maxc = self.maximal_cones()
        if not maxc:
            return False
        if any(len(c) != self.rank for c in maxc):
            return False
        if self.rank == 0:
            return True
        for facet in (c for c in self.cones if len(c) == self.rank - 1):
            count = sum(1 for m in maxc if facet < m)
            if count != 2:
                return False
        return True


def _independent(vecs):
    d, _, _ = lattice.smith_normal_form(tuple(tuple(v) for v in vecs))
    return len(d) == len(vecs)


def _solve_in_span(vecs, point):
    """Coefficients expressing `point` in the linearly independent `vecs`."""
    n = len(point)
    k = len(vecs)
    # solve sum a_i vecs[i] = point by Gaussian elimination over Q
    rows = [[Fraction(vecs[j][i]) for j in range(k)] + [point[i]] for i in range(n)]
    piv = 0
    pivots = []
    for col in range(k):
        sel = next((r for r in range(piv, n) if rows[r][col] != 0), None)
        if sel is None:
            continue
        rows[piv], rows[sel] = rows[sel], rows[piv]
        pv = rows[piv][col]
        rows[piv] = [x / pv for x in rows[piv]]
        for r in range(n):
            if r != piv and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[piv])]
        pivots.append(col)
        piv += 1
    coeffs = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        coeffs[col] = rows[r][-1]
    # consistency: rows beyond the pivots must have zero rhs
    for r in range(piv, n):
        if rows[r][-1] != 0:
            return None
    return tuple(coeffs)


def _check_pair(fan, a, b):
    """Fan condition for two maximal cones: their intersection is the cone
    on their common rays."""
    common = a & b
    ga = [fan.rays[i] for i in sorted(a)]
    gb = [fan.rays[i] for i in sorted(b)]
    ka, kb = len(ga), len(gb)
    # variables: (alpha_1..alpha_ka, beta_1..beta_kb)
    nv = ka + kb
    base = []
    for coord in range(fan.rank):
        coeffs = tuple(ga[j][coord] for j in range(ka)) + tuple(
            -gb[j][coord] for j in range(kb))
        base.append((coeffs, "eq", 0))
    for v in range(nv):
        coeffs = tuple(1 if j == v else 0 for j in range(nv))
        base.append((coeffs, "ge", 0))
    for pos, i in enumerate(sorted(a)):
        if i in common:
            continue
        coeffs = tuple(1 if j == pos else 0 for j in range(nv))
        system = base + [(coeffs, "ge", 1)]
        if lattice.feasible_rational(system, nv) is not None:
            raise IntersectionNotFace(
                f"cones {sorted(a)} and {sorted(b)} overlap beyond "
                f"their common face {sorted(common)}")


def validate_fan(rank, rays, max_cones):
    """Build a Fan from raw data, verifying all invariants."""
    return Fan(rank, rays, max_cones)


@dataclass(frozen=True)
class QuotientData:
    """The quotient fan of a divisor ray, with the bookkeeping needed to
    move module data between the fan and its quotient.

    fields:
      fan: the quotient fan (rank n-1)
      rho: the collapsed ray's index in the parent fan
      ray_map: quotient ray index -> parent ray index
      cone_map: parent cone (in st(rho)) -> quotient cone key
      projection: rows of the lattice projection N -> Z^{n-1}
      level_form: w in M with <w, n_rho> = 1 and the chosen complement
      dual_projection: rows mapping rho-perp dual vectors to quotient duals
    """

    fan: Fan
    rho: int
    ray_map: dict
    cone_map: dict
    projection: tuple
    level_form: tuple
    dual_projection: tuple

    def parent_ray(self, qray):
        return self.ray_map[qray]

    def push_dual(self, m):
        """Image of m in the quotient dual coordinates (level stripped)."""
        return lattice.mat_vec(self.dual_projection, m)

    def lift_dual(self, mbar):
        """The unique lift of a quotient dual vector into rho-perp."""
        n = len(self.level_form)
        return tuple(
            sum(self.projection[j][i] * mbar[j] for j in range(len(self.projection)))
            for i in range(n)
        )


def quotient_fan(fan, rho):
    """The fan of the divisor of `rho`, together with the correspondence
    of rays and the lattice projection."""
    if not 0 <= rho < len(fan.rays):
        raise UnknownRay(f"no ray with index {rho}")
    if not fan.is_regular():
        raise NotRegular("quotient fan requires a regular fan")
    n = fan.rank
    u = lattice.basis_change_killing(fan.rays[rho])
    projection = u[1:]
    uinv = lattice.int_matrix_inverse(u)
    # level form: first row of u pairs to 1 with n_rho
    level_form = u[0]
    # dual projection: rows are the last n-1 columns of u^{-1}, transposed
    dual_projection = tuple(tuple(uinv[i][j] for i in range(n))
                            for j in range(1, n))

    star2 = sorted(c for c in fan.star(rho) if len(c) == 2)
    qrays = []
    ray_map = {}
    seen = {}
    for c in star2:
        (tau,) = sorted(c - {rho})
        img = lattice.mat_vec(projection, fan.rays[tau])
        if lattice.vec_gcd(img) != 1:
            raise NotRegular(f"projected ray {img} is not primitive")
        if img in seen:
            raise FanError("quotient rays collide; fan condition violated")
        seen[img] = len(qrays)
        ray_map[len(qrays)] = tau
        qrays.append(img)

    inv_ray = {tau: q for q, tau in ray_map.items()}
    cone_map = {}
    qcones = []
    for c in fan.star(rho):
        key = tuple(sorted(inv_ray[t] for t in c - {rho}))
        cone_map[frozenset(c)] = key
        qcones.append(key)
    qfan = validate_fan(n - 1, qrays, [k for k in qcones if k])
    if len(qfan.cones) != len(fan.star(rho)):
        raise FanError("quotient fan poset does not match the star")
    return QuotientData(qfan, rho, ray_map, cone_map, projection,
                        level_form, dual_projection)


def _canonical_coset(fan, cone, values):
    """The canonical integral form with the given values on the cone's
    primitive generators.

    Among all integral forms with those values, the representative is
    reduced modulo the Hermite basis of the annihilator lattice of the
    cone, so the output is deterministic.
    """
    idx = sorted(cone)
    if not fan.is_regular():
        raise NotRegular("canonical forms require a regular fan")
    rows = tuple(fan.rays[i] for i in idx)
    if not idx:
        return tuple(0 for _ in range(fan.rank))
    f = lattice.int_solve(rows, tuple(values))
    if f is None:
        raise NotRegular("no integral form with the required values")
    ann = lattice.int_kernel(rows, fan.rank)
    basis = lattice.hnf_rows(ann)
    f = list(f)
    for row in basis:
        p_col = next(j for j, x in enumerate(row) if x != 0)
        q = f[p_col] // row[p_col]
        if q:
            f = [x - q * y for x, y in zip(f, row)]
    return tuple(f)


def separating_form(fan, cone, rho):
    """The canonical f in M with f(n_rho) = 1 and f = 0 on the cone's
    other primitive generators."""
    cone = frozenset(cone)
    if rho not in cone:
        raise UnknownRay(f"ray {rho} is not a ray of the cone")
    values = [1 if i == rho else 0 for i in sorted(cone)]
    return _canonical_coset(fan, cone, values)


def support_form(fan, cone, k):
    """The canonical f_sigma in M with f(n_rho) = -k_rho on the cone's rays."""
    cone = frozenset(cone)
    if len(k) != len(fan.rays):
        raise FanError("twist vector length must equal the number of rays")
    values = [-k[i] for i in sorted(cone)]
    return _canonical_coset(fan, cone, values)

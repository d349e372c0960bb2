"""Regions of the dual lattice cut out by ray constraints, and the chamber
decomposition they induce.

A region is a conjunction of constraints <m, n_rho> >= c or == c indexed
by rays of a fan.  Monomial modules have one basis element per lattice
point of their region; all membership logic is exact integer arithmetic.

Chambers: the homology of an evaluated monomial complex at m depends only
on which regions m belongs to, hence only on the position of the values
<m, n_rho> relative to the finitely many bounds that occur.  The chamber
machinery enumerates one exact integral witness per realizable position
pattern, which turns "for all m in M" questions into finite ones.
"""

from dataclasses import dataclass
from itertools import product

from .errors import NoRhoConstraint, RankMismatch
from .lattice import dot, feasible_rational, integer_point

GE = "ge"
EQ = "eq"


@dataclass(frozen=True)
class Region:
    """Conjunction of ray constraints; `empty` marks the empty region."""

    constraints: tuple  # sorted tuple of (ray, rel, bound)
    empty: bool = False

    @staticmethod
    def make(constraints):
        """Normalize: at most one constraint per ray (tightest bound wins);
        contradictions collapse to the canonical empty region."""
        merged = {}
        for ray, rel, bound in constraints:
            ray, bound = int(ray), int(bound)
            if rel not in (GE, EQ):
                raise ValueError(f"unknown relation {rel!r}")
            if ray not in merged:
                merged[ray] = (rel, bound)
                continue
            prel, pbound = merged[ray]
            if prel == GE and rel == GE:
                merged[ray] = (GE, max(pbound, bound))
            elif prel == EQ and rel == EQ:
                if pbound != bound:
                    return Region.empty_region()
            else:
                eq_bound = pbound if prel == EQ else bound
                ge_bound = bound if prel == EQ else pbound
                if eq_bound < ge_bound:
                    return Region.empty_region()
                merged[ray] = (EQ, eq_bound)
        cs = tuple(sorted((r, rel, b) for r, (rel, b) in merged.items()))
        return Region(cs)

    @staticmethod
    def empty_region():
        return Region((), empty=True)

    @staticmethod
    def whole():
        return Region(())

    def rays(self):
        return tuple(c[0] for c in self.constraints)

    def bound_at(self, ray):
        for r, rel, b in self.constraints:
            if r == ray:
                return (rel, b)
        return None

    def contains(self, fan, m):
        if self.empty:
            return False
        if len(m) != fan.rank:
            raise RankMismatch(f"point {m} does not have rank {fan.rank}")
        for ray, rel, bound in self.constraints:
            v = dot(m, fan.rays[ray])
            if rel == GE and v < bound:
                return False
            if rel == EQ and v != bound:
                return False
        return True

    def translate(self, fan, vec):
        """The translated region R + vec (bounds move by <vec, n_ray>)."""
        if self.empty:
            return self
        return Region(tuple((r, rel, b + dot(vec, fan.rays[r]))
                            for r, rel, b in self.constraints))

    def shift_bounds(self, delta):
        """Shift bounds per ray by the map `delta` (missing rays: 0)."""
        if self.empty:
            return self
        return Region(tuple((r, rel, b + delta.get(r, 0))
                            for r, rel, b in self.constraints))

    def drop_rays(self, rays):
        """Localization: drop >= constraints at the given rays.

        A region with an equality constraint at a dropped ray denotes a
        module killed by the localization; the empty region is returned.
        """
        if self.empty:
            return self
        rays = set(rays)
        kept = []
        for r, rel, b in self.constraints:
            if r in rays:
                if rel == EQ:
                    return Region.empty_region()
                continue
            kept.append((r, rel, b))
        return Region(tuple(kept))

    def restrict_ray_to_level(self, ray):
        """Replace the lower bound at `ray` by equality at that bound.

        Returns (region, level).  Models passage to the divisor: basis
        elements above the minimal level at `ray` are killed.
        """
        if self.empty:
            return self, 0
        found = self.bound_at(ray)
        if found is None:
            raise NoRhoConstraint(f"region has no constraint at ray {ray}")
        rel, bound = found
        if rel == EQ:
            return self, bound
        cs = tuple((r, EQ, b) if r == ray else (r, rel0, b)
                   for r, rel0, b in self.constraints)
        return Region(cs), bound

    def implies(self, other):
        """Containment test on the constraint level: self subset of other."""
        if self.empty:
            return True
        if other.empty:
            return False
        for r, rel, b in other.constraints:
            mine = self.bound_at(r)
            if mine is None:
                return False
            mrel, mb = mine
            if rel == GE:
                if mrel == GE and mb < b:
                    return False
                if mrel == EQ and mb < b:
                    return False
            else:
                if not (mrel == EQ and mb == b):
                    return False
        return True

    def difference(self, smaller):
        """The region self minus smaller, when representable.

        Supported shapes: equal regions (empty difference), a single ray
        whose >= bound is relaxed by exactly 1, and a single ray where an
        equality slice is removed from its own lower bound.  Returns None
        when the set difference is not cut out by ray constraints.
        """
        if smaller.empty:
            return self
        if self.empty:
            return Region.empty_region()
        if not smaller.implies(self):
            return None
        mine = dict((r, (rel, b)) for r, rel, b in self.constraints)
        theirs = dict((r, (rel, b)) for r, rel, b in smaller.constraints)
        if set(mine) - set(theirs):
            return None
        diffs = sorted(r for r in theirs if mine.get(r) != theirs[r])
        if not diffs:
            return Region.empty_region()
        if len(diffs) != 1:
            return None
        r = diffs[0]
        if r not in mine:
            return None
        mrel, mb = mine[r]
        srel, sb = theirs[r]
        if mrel == GE and srel == GE and sb == mb + 1:
            return Region.make(
                tuple((rr, EQ, mb) if rr == r else (rr, rel0, bb)
                      for rr, rel0, bb in self.constraints))
        if mrel == GE and srel == EQ and sb == mb:
            return Region.make(
                tuple((rr, rel0, bb + 1) if rr == r else (rr, rel0, bb)
                      for rr, rel0, bb in self.constraints))
        return None


# ---------------------------------------------------------------- chambers


def _thresholds(regions):
    out = {}
    for region in regions:
        if region.empty:
            continue
        for ray, rel, bound in region.constraints:
            out.setdefault(ray, set()).add(bound)
    return {r: tuple(sorted(bs)) for r, bs in out.items()}


def _interval_index(bounds, v):
    """Index of v in the partition (-inf,t1), {t1}, (t1,t2), {t2}, ..., (tk,inf)."""
    idx = 0
    for t in bounds:
        if v < t:
            return idx
        if v == t:
            return idx + 1
        idx += 2
    return idx


def _interval_system(fan, ray, bounds, idx):
    """Linear constraints pinning <m, n_ray> into the idx-th interval."""
    coeffs = tuple(fan.rays[ray])
    neg = tuple(-c for c in coeffs)
    k = len(bounds)
    if idx == 0:
        return [(neg, GE, -(bounds[0] - 1))]
    if idx == 2 * k:
        return [(coeffs, GE, bounds[-1] + 1)]
    if idx % 2 == 1:
        return [(coeffs, EQ, bounds[(idx - 1) // 2])]
    lo = bounds[idx // 2 - 1] + 1
    hi = bounds[idx // 2] - 1
    return [(coeffs, GE, lo), (neg, GE, -hi)]


def chamber_witnesses(fan, regions):
    """One integral witness per realizable chamber of the arrangement
    generated by all (ray, bound) pairs in the given regions.

    Region membership, and hence any evaluated monomial complex, is
    constant on each chamber; quantifying over the witnesses therefore
    quantifies over all of M.
    """
    atoms = _thresholds(regions)
    rays = sorted(atoms)
    if not rays:
        return [tuple(0 for _ in range(fan.rank))]
    witnesses = []
    index_ranges = [range(2 * len(atoms[r]) + 1) for r in rays]
    for combo in product(*index_ranges):
        system = []
        for r, idx in zip(rays, combo):
            system.extend(_interval_system(fan, r, atoms[r], idx))
        if feasible_rational(system, fan.rank) is None:
            continue
        m = integer_point(system, fan.rank)
        if m is None:
            continue  # no lattice point realizes this chamber
        witnesses.append(m)
    return sorted(set(witnesses))


@dataclass(frozen=True)
class ChamberPatterns:
    """Realizable membership patterns of an explicit constraint list."""

    constraints: tuple
    feasible: tuple    # (pattern, witness) pairs, pattern = tuple of bools
    infeasible: tuple  # patterns with no integral witness


def chamber_patterns(fan, constraints):
    """All realizable satisfaction patterns of the given constraints.

    Each feasible pattern (a tuple of booleans, one per constraint)
    carries an integral witness; the remaining boolean patterns are
    reported as infeasible.
    """
    constraints = tuple((int(r), rel, int(b)) for r, rel, b in constraints)
    regions = [Region.make([c]) for c in constraints]
    witnesses = chamber_witnesses(fan, regions)
    feasible = {}
    for m in witnesses:
        pattern = tuple(reg.contains(fan, m) for reg in regions)
        if pattern not in feasible:
            feasible[pattern] = m
    infeasible = []
    if len(constraints) <= 16:
        for pattern in product((False, True), repeat=len(constraints)):
            if pattern not in feasible:
                infeasible.append(pattern)
    return ChamberPatterns(
        constraints,
        tuple(sorted(feasible.items())),
        tuple(sorted(infeasible)),
    )

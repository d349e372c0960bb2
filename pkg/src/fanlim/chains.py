"""Finite-dimensional chain complexes over the rationals.

A complex stores per-degree dimensions (finite support) and exact
boundary matrices d_n : C_n -> C_{n-1}.  Quasi-isomorphism testing goes
through acyclicity of the mapping cone.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotAChainMap
from .exactmat import Mat


@dataclass(frozen=True)
class FiniteChainComplex:
    dims: dict
    boundary: dict  # n -> Mat of shape dims[n-1] x dims[n]

    @staticmethod
    def make(dims, boundary=None, check=True):
        dims = {int(n): int(d) for n, d in dims.items() if d > 0}
        boundary = dict(boundary or {})
        full = {}
        for n, d in dims.items():
            prev = dims.get(n - 1, 0)
            b = boundary.get(n)
            if b is None or prev == 0 or d == 0:
                b = Mat.zero(prev, d)
            assert (b.m, b.n) == (prev, d), f"boundary {n} has shape {(b.m, b.n)}"
            full[n] = b
        c = FiniteChainComplex(dims, full)
        if check:
            c.check_boundary()
        return c

    def check_boundary(self):
        for n in self.dims:
            if n - 1 in self.dims and n + 1 in self.dims:
                prod = self.boundary[n] @ self.boundary[n + 1]
                if not prod.is_zero():
                    raise ValueError(f"boundary squared nonzero at degree {n + 1}")

    def dim(self, n):
        return self.dims.get(n, 0)

    def d(self, n):
        b = self.boundary.get(n)
        if b is None:
            return Mat.zero(self.dim(n - 1), self.dim(n))
        return b

    def degrees(self):
        return sorted(self.dims)

    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return not self.dims


def zero_complex():
    return FiniteChainComplex.make({})


def homology_dims(c):
    """dim H_n = dim C_n - rank d_n - rank d_{n+1}, per degree."""
    out = {}
    for n in c.degrees():
        h = c.dim(n) - c.d(n).rank() - c.d(n + 1).rank()
        if h:
            out[n] = h
    return out


def is_acyclic(c):
    return not homology_dims(c)


def euler_characteristic(c):
    return sum((-1) ** n * d for n, d in c.dims.items())


@dataclass(frozen=True)
class ChainMap:
    source: FiniteChainComplex
    target: FiniteChainComplex
    comps: dict  # n -> Mat of shape target.dims[n] x source.dims[n]

    @staticmethod
    def make(source, target, comps, check=True):
        full = {}
        for n in set(source.dims) | set(target.dims):
            f = comps.get(n)
            if f is None:
                f = Mat.zero(target.dim(n), source.dim(n))
            assert (f.m, f.n) == (target.dim(n), source.dim(n))
            full[n] = f
        fmap = ChainMap(source, target, full)
        if check:
            fmap.check_chain_map()
        return fmap

    def check_chain_map(self):
        for n in set(self.source.dims) | set(self.target.dims):
            lhs = self.target.d(n) @ self.f(n)
            rhs = self.f(n - 1) @ self.source.d(n)
            if lhs.rows != rhs.rows:
                raise NotAChainMap(f"square at degree {n} does not commute")

    def f(self, n):
        m = self.comps.get(n)
        if m is None:
            return Mat.zero(self.target.dim(n), self.source.dim(n))
        return m

    def is_surjective(self):
        return all(self.f(n).rank() == self.target.dim(n)
                   for n in self.target.dims)

    def compose(self, other):
        """self after other."""
        assert other.target is self.source or other.target.dims == self.source.dims
        comps = {}
        for n in set(other.source.dims) | set(self.target.dims):
            comps[n] = self.f(n) @ other.f(n)
        return ChainMap.make(other.source, self.target, comps, check=False)


def identity_map(c):
    return ChainMap.make(c, c, {n: Mat.identity(d) for n, d in c.dims.items()},
                         check=False)


def zero_map(source, target):
    return ChainMap.make(source, target, {}, check=False)


def mapping_cone(f):
    """Cone(f)_n = C_{n-1} + D_n with d(x, y) = (-dx, dy - f(x))."""
    c, d = f.source, f.target
    dims = {}
    degs = set()
    for n in c.dims:
        degs.add(n + 1)
    degs |= set(d.dims)
    for n in degs:
        dims[n] = c.dim(n - 1) + d.dim(n)
    boundary = {}
    for n in dims:
        top = Mat.block([[(-c.d(n - 1)), Mat.zero(c.dim(n - 2), d.dim(n))]])
        bot = Mat.block([[(-f.f(n - 1)), d.d(n)]])
        boundary[n] = top.vstack(bot)
    return FiniteChainComplex.make(dims, boundary, check=False)


def is_quasi_iso(f):
    """True iff the mapping cone of f is acyclic in every degree."""
    f.check_chain_map()
    return is_acyclic(mapping_cone(f))


def path_factorisation(f):
    """The canonical path space factorisation C -> P(f) -> D of a chain map.

    P(f)_n = C_n x D_{n+1} x D_n with differential
    (c, d', d) |-> (dc, -f(c) - dd' + d, dd); the first map
    i = (id, 0, f) is a chain homotopy equivalence and the second map
    p = pr_3 is surjective in every degree.
    """
    c, d = f.source, f.target
    degs = set(c.dims) | set(d.dims) | {n - 1 for n in d.dims}
    dims = {}
    for n in degs:
        dims[n] = c.dim(n) + d.dim(n + 1) + d.dim(n)
    dims = {n: k for n, k in dims.items() if k}

    boundary = {}
    for n in dims:
        rows = [
            [c.d(n), Mat.zero(c.dim(n - 1), d.dim(n + 1)),
             Mat.zero(c.dim(n - 1), d.dim(n))],
            [-f.f(n), -d.d(n + 1), Mat.identity(d.dim(n))],
            [Mat.zero(d.dim(n - 1), c.dim(n)),
             Mat.zero(d.dim(n - 1), d.dim(n + 1)), d.d(n)],
        ]
        boundary[n] = Mat.block(rows)
    p_complex = FiniteChainComplex.make(dims, boundary, check=False)

    i_comps = {}
    for n in set(c.dims) | set(dims):
        i_comps[n] = Mat.block([[Mat.identity(c.dim(n))],
                                [Mat.zero(d.dim(n + 1), c.dim(n))],
                                [f.f(n)]])
    i = ChainMap.make(c, p_complex, i_comps, check=False)

    p_comps = {}
    for n in set(d.dims) | set(dims):
        p_comps[n] = Mat.block([[Mat.zero(d.dim(n), c.dim(n)),
                                 Mat.zero(d.dim(n), d.dim(n + 1)),
                                 Mat.identity(d.dim(n))]])
    p = ChainMap.make(p_complex, d, p_comps, check=False)
    return p_complex, i, p


def shift(c, k, twist_sign=True):
    """The complex with C[k]_n = C_{n-k}; differential picks up (-1)^k."""
    sign = Fraction(-1 if (k % 2 and twist_sign) else 1)
    dims = {n + k: d for n, d in c.dims.items()}
    boundary = {n + k: c.d(n).scale(sign) for n in c.dims}
    return FiniteChainComplex.make(dims, boundary, check=False)


def debug_json(c):
    """Sparse-matrix dump of a complex, for debugging only."""
    out = {"dims": {str(n): d for n, d in sorted(c.dims.items())},
           "boundary": {}}
    for n in sorted(c.dims):
        b = c.d(n)
        triples = []
        for i in range(b.m):
            for j in range(b.n):
                if b[i, j]:
                    triples.append([i, j, str(b[i, j])])
        if triples:
            out["boundary"][str(n)] = triples
    return out


def direct_sum(cs):
    dims = {}
    for c in cs:
        for n, d in c.dims.items():
            dims[n] = dims.get(n, 0) + d
    boundary = {}
    for n in dims:
        blocks = []
        for i, c in enumerate(cs):
            row = [Mat.zero(c.dim(n - 1), other.dim(n)) if j != i else c.d(n)
                   for j, other in enumerate(cs)]
            blocks.append(row)
        boundary[n] = Mat.block(blocks) if blocks else Mat.zero(0, 0)
    return FiniteChainComplex.make(dims, boundary, check=False)

"""Dense exact matrices over the rationals.

Small immutable matrices of fractions.Fraction; ranks are computed by
fraction-free (Bareiss) elimination on an integer-scaled copy.
"""

from fractions import Fraction
from math import lcm


class Mat:
    """Immutable matrix of Fractions with shape (m rows, n cols)."""

    __slots__ = ("rows", "m", "n")

    def __init__(self, rows, shape=None):
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if shape is not None:
            m, n = shape
            if rows and (len(rows) != m or any(len(r) != n for r in rows)):
                raise ValueError("shape mismatch")
        else:
            m = len(rows)
            n = len(rows[0]) if rows else 0
        if rows and any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        self.rows = rows if rows else tuple(() for _ in range(m))
        self.m = m
        self.n = n

    @staticmethod
    def zero(m, n):
        return Mat(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m)),
                   (m, n))

    @staticmethod
    def identity(n):
        return Mat(tuple(tuple(Fraction(1 if i == j else 0) for j in range(n))
                         for i in range(n)))

    @staticmethod
    def from_cols(cols, m):
        if not cols:
            return Mat.zero(m, 0)
        return Mat(tuple(zip(*cols)))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.m == other.m
                and self.n == other.n and self.rows == other.rows)

    def __hash__(self):
        return hash((self.m, self.n, self.rows))

    def __repr__(self):
        return f"Mat({self.m}x{self.n})"

    def __add__(self, other):
        assert (self.m, self.n) == (other.m, other.n)
        return Mat(tuple(tuple(a + b for a, b in zip(r, s))
                         for r, s in zip(self.rows, other.rows)), (self.m, self.n))

    def __neg__(self):
        return Mat(tuple(tuple(-a for a in r) for r in self.rows), (self.m, self.n))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return Mat(tuple(tuple(c * a for a in r) for r in self.rows),
                   (self.m, self.n))

    def __matmul__(self, other):
        assert self.n == other.m, (self.n, other.m)
        if self.m == 0 or other.n == 0 or self.n == 0:
            return Mat.zero(self.m, other.n)
        ot = tuple(zip(*other.rows))
        out = []
        for r in self.rows:
            out.append(tuple(sum(a * b for a, b in zip(r, col)) for col in ot))
        return Mat(tuple(out), (self.m, other.n))

    def mul_vec(self, v):
        assert len(v) == self.n
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def transpose(self):
        if self.n == 0 or self.m == 0:
            return Mat.zero(self.n, self.m)
        return Mat(tuple(zip(*self.rows)))

    def is_zero(self):
        return all(a == 0 for r in self.rows for a in r)

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def hstack(self, other):
        assert self.m == other.m
        return Mat(tuple(r + s for r, s in zip(self.rows, other.rows)),
                   (self.m, self.n + other.n))

    def vstack(self, other):
        assert self.n == other.n
        return Mat(self.rows + other.rows, (self.m + other.m, self.n))

    @staticmethod
    def block(grid):
        """Assemble from a grid of Mats (rows of blocks)."""
        out = None
        for row in grid:
            acc = None
            for b in row:
                acc = b if acc is None else acc.hstack(b)
            out = acc if out is None else out.vstack(acc)
        return out

    # -- elimination ---------------------------------------------------

    def rank(self):
        """Rank via fraction-free Bareiss elimination on integer data."""
        if self.m == 0 or self.n == 0:
            return 0
        scale = lcm(*[x.denominator for r in self.rows for x in r]) if self.rows else 1
        a = [[int(x * scale) for x in r] for r in self.rows]
        m, n = self.m, self.n
        prev = 1
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, m) if a[i][c] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            for i in range(r + 1, m):
                for j in range(c + 1, n):
                    a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
                a[i][c] = 0
            prev = a[r][c]
            r += 1
            if r == m:
                break
        return r

    def rref(self):
        """Reduced row echelon form; returns (Mat, pivot column tuple)."""
        a = [list(r) for r in self.rows]
        m, n = self.m, self.n
        pivots = []
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, m) if a[i][c] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            pv = a[r][c]
            a[r] = [x / pv for x in a[r]]
            for i in range(m):
                if i != r and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == m:
                break
        return Mat(tuple(tuple(row) for row in a), (m, n)), tuple(pivots)

    def nullspace(self):
        """Canonical basis of the right kernel, as columns of a Mat."""
        red, pivots = self.rref()
        pivset = set(pivots)
        free = [j for j in range(self.n) if j not in pivset]
        cols = []
        for j in free:
            v = [Fraction(0)] * self.n
            v[j] = Fraction(1)
            for r, c in enumerate(pivots):
                v[c] = -red[r, j]
            cols.append(tuple(v))
        return Mat.from_cols(cols, self.n)

    def solve(self, rhs):
        """Some X with self @ X = rhs, or None if inconsistent."""
        aug = self.hstack(rhs)
        red, pivots = aug.rref()
        for i in range(self.m):
            if all(red[i, j] == 0 for j in range(self.n)) and any(
                red[i, j] != 0 for j in range(self.n, self.n + rhs.n)
            ):
                return None
        xs = [[Fraction(0)] * rhs.n for _ in range(self.n)]
        for r, c in enumerate(pivots):
            if c >= self.n:
                return None
            for j in range(rhs.n):
                xs[c][j] = red[r, self.n + j]
        return Mat(tuple(tuple(row) for row in xs), (self.n, rhs.n))

    def col_span_contains(self, vec):
        aug = self.hstack(Mat.from_cols([vec], self.m))
        return aug.rank() == self.rank()

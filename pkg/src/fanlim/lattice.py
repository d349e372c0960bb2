"""Exact integer and rational linear algebra kernels.

Everything here works on plain Python ints and fractions.Fraction; no
floating point anywhere.  Matrices are tuples of row tuples.
"""

from fractions import Fraction
from math import gcd

from .errors import ChamberError


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def is_primitive(v):
    return vec_gcd(v) == 1


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    return tuple(c * a for a in v)


def mat_vec(rows, v):
    return tuple(dot(r, v) for r in rows)


def identity_int(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(rows):
    return tuple(zip(*rows)) if rows else ()


def _to_lists(rows):
    return [list(r) for r in rows]


def _to_tuples(rows):
    return tuple(tuple(r) for r in rows)


def hnf_rows(rows):
    """Row-style Hermite normal form of the lattice spanned by `rows`.

    Returns a tuple of nonzero rows in echelon form: pivots positive,
    entries above each pivot reduced into [0, pivot).  The result is the
    canonical basis of the row lattice (unique per lattice).
    """
    if not rows:
        return ()
    a = _to_lists(rows)
    m, n = len(a), len(a[0])
    pivot_rows = []
    r = 0
    for c in range(n):
        # find a row with nonzero entry in column c at or below r
        piv = None
        for i in range(r, m):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        # eliminate below by gcd steps
        for i in range(r + 1, m):
            while a[i][c] != 0:
                q = a[r][c] // a[i][c]
                a[r], a[i] = a[i], [x - q * y for x, y in zip(a[r], a[i])]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        pivot_rows.append((r, c))
        r += 1
        if r == m:
            break
    # reduce entries above pivots
    for r, c in reversed(pivot_rows):
        p = a[r][c]
        for i in range(r):
            q = a[i][c] // p
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
    return _to_tuples(a[:len(pivot_rows)])


def column_ops_reduce(rows):
    """Column Hermite elimination A*U = H with U unimodular.

    Returns (H, U) as tuples of rows; H is in column echelon form (each
    successive nonzero column has its leading nonzero entry strictly
    lower than the previous one's).
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = _to_lists(rows)
    u = _to_lists(identity_int(n))

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in u:
            row[j], row[k] = row[k], row[j]

    def addmul_col(j, k, q):
        # col_j += q * col_k
        for row in a:
            row[j] += q * row[k]
        for row in u:
            row[j] += q * row[k]

    def negate_col(j):
        for row in a:
            row[j] = -row[j]
        for row in u:
            row[j] = -row[j]

    col = 0
    for i in range(m):
        if col >= n:
            break
        piv = None
        for j in range(col, n):
            if a[i][j] != 0:
                piv = j
                break
        if piv is None:
            continue
        swap_cols(col, piv)
        for j in range(col + 1, n):
            while a[i][j] != 0:
                q = a[i][col] // a[i][j]
                addmul_col(col, j, -q)
                swap_cols(col, j)
        if a[i][col] < 0:
            negate_col(col)
        col += 1
    return _to_tuples(a), _to_tuples(u)


def int_kernel(rows, n):
    """Basis of {x in Z^n : A x = 0} for the integer matrix A (tuple of rows)."""
    if not rows:
        return identity_int(n)
    h, u = column_ops_reduce(rows)
    ut = transpose(u)  # columns of u as rows
    ker = []
    for j in range(n):
        if all(h[i][j] == 0 for i in range(len(h))):
            ker.append(ut[j])
    return tuple(ker)


def int_solve(rows, b):
    """Some x in Z^n with A x = b, or None if no integral solution exists."""
    if not rows:
        return None
    n = len(rows[0])
    h, u = column_ops_reduce(rows)
    m = len(rows)
    y = [0] * n
    resid = list(b)
    # h is in column echelon form: solve column by column
    col = 0
    for j in range(n):
        lead = None
        for i in range(m):
            if h[i][j] != 0:
                lead = i
                break
        if lead is None:
            break
        if resid[lead] % h[lead][j] != 0:
            # try later? echelon structure means no
            return None
        q = resid[lead] // h[lead][j]
        y[j] = q
        for i in range(m):
            resid[i] -= q * h[i][j]
        col += 1
    if any(r != 0 for r in resid):
        return None
    ut = transpose(u)
    x = [0] * n
    for j in range(n):
        if y[j]:
            for k in range(n):
                x[k] += y[j] * ut[j][k]
    return tuple(x)


def smith_normal_form(rows):
    """Smith normal form: returns (d, U, V) with U*A*V = diag(d).

    `d` is the list of diagonal entries (nonnegative, divisibility chain),
    U (m x m) and V (n x n) are unimodular, all as tuples of rows.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = _to_lists(rows)
    u = _to_lists(identity_int(m))
    v = _to_lists(identity_int(n))

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def addmul_row(i, k, q):
        a[i] = [x + q * y for x, y in zip(a[i], a[k])]
        u[i] = [x + q * y for x, y in zip(u[i], u[k])]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def addmul_col(j, k, q):
        for row in a:
            row[j] += q * row[k]
        for row in v:
            row[j] += q * row[k]

    t = 0
    while t < min(m, n):
        # find a nonzero pivot in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        # enforce divisibility of later entries
        p = a[t][t]
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % p != 0:
                    addmul_row(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1
    d = [a[i][i] for i in range(min(m, n))]
    while d and d[-1] == 0:
        d.pop()
    return tuple(d), _to_tuples(u), _to_tuples(v)


def spans_saturated(vectors, rank):
    """True iff the vectors extend to a Z-basis (all Smith invariants are 1)."""
    if not vectors:
        return True
    if len(vectors) > rank:
        return False
    d, _, _ = smith_normal_form(tuple(vectors))
    return len(d) == len(vectors) and all(x == 1 for x in d)


def basis_change_killing(v):
    """Unimodular U with U v = e1, for a primitive integer vector v."""
    n = len(v)
    col = tuple((x,) for x in v)
    d, u, vv = smith_normal_form(col)
    if not d or d[0] != 1:
        raise ValueError("vector is not primitive")
    # u * col * vv = e1 column, vv is (+-1)
    if vv[0][0] == -1:
        u = tuple(tuple(-x for x in row) for row in u)
    assert mat_vec(u, v) == tuple(1 if i == 0 else 0 for i in range(n))
    return u


def int_matrix_inverse(rows):
    """Inverse of a unimodular integer matrix, as integer rows."""
    n = len(rows)
    d, u, v = smith_normal_form(rows)
    if len(d) != n or any(x != 1 for x in d):
        raise ValueError("matrix is not unimodular")
    # u*A*v = I  =>  A^{-1} = v*u
    return tuple(tuple(dot(v[i], tuple(u[k][j] for k in range(n))) for j in range(n))
                 for i in range(n))


# --- rational linear inequalities: Fourier-Motzkin ---
#
# A system is a list of (coeffs, rel, rhs) with rel in {"ge", "eq"} meaning
# sum(coeffs * x) >= rhs, resp. == rhs.  Coefficients and rhs are ints or
# Fractions.


def _as_ge(system):
    out = []
    for coeffs, rel, rhs in system:
        coeffs = tuple(Fraction(c) for c in coeffs)
        rhs = Fraction(rhs)
        if rel == "ge":
            out.append((coeffs, rhs))
        elif rel == "eq":
            out.append((coeffs, rhs))
            out.append((tuple(-c for c in coeffs), -rhs))
        else:
            raise ValueError(f"unknown relation {rel!r}")
    return out


def _fm_eliminate(ineqs, j):
    """Eliminate variable j from a list of (coeffs, rhs) >= constraints."""
    pos, neg, rest = [], [], []
    for coeffs, rhs in ineqs:
        c = coeffs[j]
        if c > 0:
            pos.append((coeffs, rhs))
        elif c < 0:
            neg.append((coeffs, rhs))
        else:
            rest.append((coeffs, rhs))
    for cp, bp in pos:
        for cn, bn in neg:
            # cp[j] x_j >= bp - rest ; cn[j] x_j >= bn - rest with cn[j] < 0
            lam, mu = -cn[j], cp[j]
            coeffs = tuple(lam * a + mu * b for a, b in zip(cp, cn))
            rest.append((coeffs, lam * bp + mu * bn))
    # drop duplicates to keep growth in check
    seen = {}
    out = []
    for coeffs, rhs in rest:
        key = coeffs
        if key in seen:
            if rhs > seen[key][1]:
                seen[key] = (coeffs, rhs)
        else:
            seen[key] = (coeffs, rhs)
    return list(seen.values())


def feasible_rational(system, nvars):
    """A rational witness of the system, or None if infeasible."""
    ineqs = _as_ge(system)
    stages = [ineqs]
    for j in range(nvars):
        ineqs = _fm_eliminate(ineqs, j)
        stages.append(ineqs)
    for coeffs, rhs in stages[-1]:
        if rhs > 0:
            return None
    # back-substitute
    x = [Fraction(0)] * nvars
    for j in range(nvars - 1, -1, -1):
        lo, hi = None, None
        for coeffs, rhs in stages[j]:
            c = coeffs[j]
            if c == 0:
                continue
            bound = (rhs - sum(coeffs[k] * x[k] for k in range(j + 1, nvars))) / c
            if c > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if lo is not None and hi is not None and lo > hi:
            return None  # should not happen if projection was consistent
        if lo is None and hi is None:
            x[j] = Fraction(0)
        elif lo is None:
            x[j] = hi if hi <= 0 else Fraction(min(0, int(hi)))
            if x[j] > hi:
                x[j] = hi
        elif hi is None:
            x[j] = lo if lo >= 0 else Fraction(max(0, int(lo)))
            if x[j] < lo:
                x[j] = lo
        else:
            # prefer an integer in range
            import math
            c = math.ceil(lo)
            x[j] = Fraction(c) if c <= hi else lo
    return tuple(x)


def _var_range(ineqs, j, x_tail, nvars):
    """Exact rational (lo, hi) bounds for variable j given fixed later vars."""
    lo, hi = None, None
    for coeffs, rhs in ineqs:
        c = coeffs[j]
        if c == 0:
            continue
        bound = (rhs - sum(coeffs[k] * x_tail[k] for k in range(j + 1, nvars))) / c
        if c > 0:
            lo = bound if lo is None or bound > lo else lo
        else:
            hi = bound if hi is None or bound < hi else hi
    return lo, hi


def integer_point(system, nvars, cap=200):
    """An integral witness of the system, or None if integrally infeasible.

    Searches with exact Fourier-Motzkin bounds per variable; `cap` limits
    the number of candidates tried per level (ChamberError past the cap,
    rather than a silent wrong answer).
    """
    import math
    if nvars == 0:
        for coeffs, rel, rhs in system:
            v = Fraction(0)
            if rel == "ge" and v < Fraction(rhs):
                return None
            if rel == "eq" and v != Fraction(rhs):
                return None
        return ()
    ineqs = _as_ge(system)
    stages = [ineqs]
    for j in range(nvars):
        stages.append(_fm_eliminate(stages[-1], j))
    for coeffs, rhs in stages[-1]:
        if rhs > 0:
            return None

    x = [0] * nvars

    def search(j):
        if j < 0:
            return True
        lo, hi = _var_range(stages[j], j, x, nvars)
        if lo is not None and hi is not None:
            lo_i, hi_i = math.ceil(lo), math.floor(hi)
            if hi_i - lo_i + 1 > cap:
                raise ChamberError("integer witness search cap exceeded")
            candidates = range(lo_i, hi_i + 1)
        elif lo is not None:
            lo_i = math.ceil(lo)
            candidates = range(lo_i, lo_i + cap)
        elif hi is not None:
            hi_i = math.floor(hi)
            candidates = range(hi_i, hi_i - cap, -1)
        else:
            candidates = [0] + [s * k for k in range(1, cap // 2 + 1) for s in (1, -1)]
        for c in candidates:
            x[j] = c
            if search(j - 1):
                return True
        x[j] = 0
        return False

    if search(nvars - 1):
        return tuple(x)
    return None

"""Exact solution of the ambiguity-fixing linear systems.

Rows are rational; each is scaled to integers and eliminated fraction-free
(Bareiss), with deterministic pivoting on the row of smallest magnitude bound.
The systems here are overdetermined by design: redundant rows must be
consistent, and the solution must be unique.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz
from gmpy2 import lcm as _lcm


class InconsistentSystemError(Exception):
    def __init__(self, labels):
        super().__init__(f"inconsistent condition rows: {labels}")
        self.labels = labels


class UnderdeterminedSystemError(Exception):
    def __init__(self, rank, unknowns):
        super().__init__(
            f"condition system has rank {rank} < {unknowns} unknowns; add vanishing conditions"
        )
        self.rank = rank
        self.unknowns = unknowns


def _scaled_int_row(coeffs, rhs):
    den = mpz(1)
    for c in list(coeffs) + [rhs]:
        den = _lcm(den, mpq(c).denominator)
    return [mpz(mpq(c) * den) for c in coeffs] + [mpz(mpq(rhs) * den)]


def solve_unique(rows):
    """rows: list of (label, coefficient list, rhs).  Returns the unique exact
    solution vector (mpq) or raises."""
    if not rows:
        raise UnderdeterminedSystemError(0, 0)
    ncols = len(rows[0][1])
    labels = [r[0] for r in rows]
    mat = [_scaled_int_row(r[1], r[2]) for r in rows]
    nrows = len(mat)
    prev_pivot = mpz(1)
    pivot_cols = []
    row_at = 0
    used_labels = []
    for col in range(ncols):
        best = None
        for r in range(row_at, nrows):
            if mat[r][col] != 0:
                bound = max(abs(v) for v in mat[r])
                if best is None or bound < best[1]:
                    best = (r, bound)
        if best is None:
            continue
        r = best[0]
        if r != row_at:
            mat[row_at], mat[r] = mat[r], mat[row_at]
            labels[row_at], labels[r] = labels[r], labels[row_at]
        piv = mat[row_at][col]
        for rr in range(row_at + 1, nrows):
            if any(mat[rr][c] for c in range(col, ncols + 1)):
                head = mat[rr][col]
                for cc in range(ncols + 1):
                    num = piv * mat[rr][cc] - head * mat[row_at][cc]
                    q, rem = divmod(num, prev_pivot)
                    if rem:
                        raise ArithmeticError("fraction-free elimination lost exactness")
                    mat[rr][cc] = q
        prev_pivot = piv
        pivot_cols.append(col)
        used_labels.append(labels[row_at])
        row_at += 1
        if row_at == nrows:
            break
    rank = len(pivot_cols)
    # consistency of the eliminated remainder rows
    bad = [labels[r] for r in range(row_at, nrows) if mat[r][ncols] != 0 and not any(mat[r][c] for c in range(ncols))]
    if bad:
        raise InconsistentSystemError(bad)
    if rank < ncols:
        raise UnderdeterminedSystemError(rank, ncols)
    # back substitution on the echelon rows
    sol = [mpq(0)] * ncols
    for i in range(rank - 1, -1, -1):
        col = pivot_cols[i]
        acc = mpq(mat[i][ncols])
        for j in range(col + 1, ncols):
            acc -= mat[i][j] * sol[j]
        sol[col] = acc / mat[i][col]
    return sol


def residual(rows, sol):
    """(label, residual) for every row; all residuals vanish on a solution."""
    out = []
    for label, coeffs, rhs in rows:
        acc = -mpq(rhs)
        for c, s in zip(coeffs, sol):
            acc += mpq(c) * s
        out.append((label, acc))
    return out

"""Exact linear algebra over the rationals and over rational functions of
the parameters (Expr entries). Plain Gaussian elimination; determinism is the
point, not asymptotics."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from . import expr as E


class FieldOps:
    """Pluggable field operations for the elimination routines."""

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    zero = None
    one = None


class FractionOps(FieldOps):
    zero = Fraction(0)
    one = Fraction(1)

    def is_zero(self, a):
        return a == 0

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a


class ExprOps(FieldOps):
    """Rational functions of the parameters. Zero decisions are exact because
    parameter polynomials carry no transcendental nodes."""

    zero = E.ZERO
    one = E.ONE

    def is_zero(self, a):
        z = E.is_identically_zero(a)
        if z is E.Zeroness.UNKNOWN:
            raise E.ExprError("undecidable zero test inside exact elimination")
        return z is E.Zeroness.YES

    def add(self, a, b):
        return E.add(a, b)

    def neg(self, a):
        return E.neg(a)

    def mul(self, a, b):
        return E.mul(a, b)

    def inv(self, a):
        return E.inverse(a)


FRACTION_OPS = FractionOps()
EXPR_OPS = ExprOps()


def _copy(matrix):
    return [list(row) for row in matrix]


def rref(matrix: Sequence[Sequence], ops: FieldOps = FRACTION_OPS, max_col: int | None = None):
    """Reduced row echelon form. Returns (rows, pivot column list). Pivot
    search can be limited to the first max_col columns (used by solve so an
    augmented right-hand side is never chosen as a pivot)."""
    rows = _copy(matrix)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols if max_col is None else min(ncols, max_col)):
        pivot_row = None
        for i in range(r, len(rows)):
            if not ops.is_zero(rows[i][col]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        scale = ops.inv(rows[r][col])
        rows[r] = [ops.mul(scale, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not ops.is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [ops.add(rows[i][j], ops.neg(ops.mul(f, rows[r][j]))) for j in range(ncols)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence], ops: FieldOps = FRACTION_OPS) -> int:
    return len(rref(matrix, ops)[1])


def nullspace(matrix: Sequence[Sequence], ops: FieldOps = FRACTION_OPS) -> List[list]:
    """Basis of right kernel vectors v with A v = 0."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows, pivots = rref(matrix, ops)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ops.zero] * ncols
        v[fc] = ops.one
        for r, pc in enumerate(pivots):
            v[pc] = ops.neg(rows[r][fc])
        basis.append(v)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence, ops: FieldOps = FRACTION_OPS):
    """Solve A x = b. Returns (x, consistent). Free unknowns are set to zero;
    when inconsistent, x is the partial solution from the consistent rows."""
    if not matrix:
        return [], True
    ncols = len(matrix[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    rows, pivots = rref(aug, ops, max_col=ncols)
    solution = [ops.zero] * ncols
    for r, pc in enumerate(pivots):
        solution[pc] = rows[r][ncols]
    consistent = all(
        ops.is_zero(row[ncols]) for row in rows[len(pivots):]
    )
    return solution, consistent


def det3(matrix, mul, add, neg):
    """3x3 determinant via cofactors with caller-supplied ring operations."""
    (a, b, c), (d, e, f), (g, h, i) = matrix
    t1 = mul(a, add(mul(e, i), neg(mul(f, h))))
    t2 = mul(b, add(mul(f, g), neg(mul(d, i))))
    t3 = mul(c, add(mul(d, h), neg(mul(e, g))))
    return add(add(t1, t2), t3)


def symmetric_signature(matrix: Sequence[Sequence[Fraction]]):
    """Signature (positive, zero, negative) of an exact symmetric matrix via
    congruence diagonalization."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    pos = zero = negv = 0
    for k in range(n):
        if a[k][k] == 0:
            swap = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if swap is not None:
                a[k], a[swap] = a[swap], a[k]
                for row in a:
                    row[k], row[swap] = row[swap], row[k]
            else:
                mate = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if mate is None:
                    zero += 1
                    continue
                for j in range(n):
                    a[k][j] += a[mate][j]
                for i in range(n):
                    a[i][k] += a[i][mate]
        d = a[k][k]
        if d > 0:
            pos += 1
        else:
            negv += 1
        for i in range(k + 1, n):
            if a[i][k] != 0:
                f = a[i][k] / d
                for j in range(n):
                    a[i][j] -= f * a[k][j]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                f = a[k][j] / d
                for i in range(n):
                    a[i][j] -= f * a[i][k]
    return pos, zero, negv

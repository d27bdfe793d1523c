"""Exact linear algebra over the rationals.

Dense routines work on lists of lists of rationals.  The sparse solver is
keyed by arbitrary hashable row/column labels; it is used for the level
systems of the normalization module, whose matrices are near-triangular in
a suitable ordering.
"""

from __future__ import annotations

from .scalars import Q, QZERO


def mat_identity(m):
    return [[Q(1) if i == j else QZERO for j in range(m)] for i in range(m)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[QZERO] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if c == 0:
                continue
            bk = b[k]
            for j in range(cols):
                if bk[j] != 0:
                    oi[j] = oi[j] + c * bk[j]
    return out


def mat_vec(a, v):
    return [sum((a[i][j] * v[j] for j in range(len(v))), QZERO)
            for i in range(len(a))]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def rref(matrix):
    """Reduced row echelon form (in place). Returns the pivot columns."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    piv_cols = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if matrix[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        pv = matrix[r][c]
        matrix[r] = [x / pv for x in matrix[r]]
        for i in range(rows):
            if i != r and matrix[i][c] != 0:
                f = matrix[i][c]
                matrix[i] = [x - f * y for x, y in zip(matrix[i], matrix[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    return piv_cols


def rank(matrix):
    work = [list(row) for row in matrix]
    return len(rref(work))


def nullspace(matrix, ncols=None):
    """Canonical basis of the right kernel of ``matrix``.

    One basis vector per free column, with a 1 in the free position and the
    pivot entries back-filled; this makes the output independent of row
    order, which the test suite relies on.
    """
    rows = [list(r) for r in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        rows = [[QZERO] * ncols]
    piv = rref(rows)
    piv_set = set(piv)
    basis = []
    for free in range(ncols):
        if free in piv_set:
            continue
        v = [QZERO] * ncols
        v[free] = Q(1)
        for r, pc in enumerate(piv):
            v[pc] = -rows[r][free]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """One exact solution of ``matrix @ x = rhs`` or ``None`` if inconsistent."""
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0]) if matrix else 0
    piv = rref(rows)
    if ncols in piv:
        return None
    x = [QZERO] * ncols
    for r, pc in enumerate(piv):
        x[pc] = rows[r][ncols]
    return x


def mat_inverse(a):
    m = len(a)
    work = [list(row) + list(ident_row)
            for row, ident_row in zip(a, mat_identity(m))]
    piv = rref(work)
    if piv != list(range(m)):
        raise ValueError("matrix is singular")
    return [row[m:] for row in work]


def row_space_echelon(rows):
    """Sparse incremental echelon basis of the span of ``rows``.

    Rows are dicts ``{column label: coefficient}``.  Returns a list of
    (pivot label, row dict) pairs with each pivot normalized to 1 and
    eliminated from all other stored rows.  Used for rank and span
    comparisons on large sparse systems.
    """
    basis = {}

    def reduce_row(row):
        row = dict(row)
        while row:
            lead = min(row)
            if lead not in basis:
                return lead, row
            f = row[lead]
            for c, v in basis[lead].items():
                s = row.get(c, QZERO) - f * v
                if s == 0:
                    row.pop(c, None)
                else:
                    row[c] = s
        return None, None

    for row in rows:
        lead, red = reduce_row(row)
        if lead is None:
            continue
        pv = red[lead]
        red = {c: v / pv for c, v in red.items()}
        for other in basis.values():
            if lead in other:
                f = other[lead]
                for c, v in red.items():
                    s = other.get(c, QZERO) - f * v
                    if s == 0:
                        other.pop(c, None)
                    else:
                        other[c] = s
        basis[lead] = red
    return sorted(basis.items())


def nullspace_sparse(rows, col_labels):
    """Kernel basis for sparse rows over the labelled columns.

    Same canonical form as :func:`nullspace`: one vector per free column,
    returned as dicts over ``col_labels``.
    """
    echelon = row_space_echelon(rows)
    piv = {lead for lead, _ in echelon}
    basis = []
    for free in col_labels:
        if free in piv:
            continue
        v = {free: Q(1)}
        for lead, row in echelon:
            c = row.get(free, QZERO)
            if c != 0:
                v[lead] = -c
        basis.append(v)
    return basis


class SparseSystem:
    """An exact sparse linear system with labelled rows and columns."""

    def __init__(self):
        self.columns = {}  # column label -> {row label: coeff}

    def set_column(self, col_label, entries):
        self.columns[col_label] = {r: v for r, v in entries.items() if v != 0}

    def solve_unique(self, rhs, column_order=None):
        """Solve for the unique combination of columns equal to ``rhs``.

        ``rhs`` is a ``{row label: coeff}`` dict.  Raises ``ValueError`` when
        the system is singular (no solution or a free column).  Elimination
        follows ``column_order`` when given, which keeps near-triangular
        systems cheap.
        """
        cols = list(self.columns) if column_order is None else list(column_order)
        # row-major copy
        rows = {}
        for cl in cols:
            for rl, v in self.columns[cl].items():
                rows.setdefault(rl, {})[cl] = v
        b = {r: v for r, v in rhs.items() if v != 0}
        for r in b:
            rows.setdefault(r, {})
        solution = {}
        eliminated = set()
        for cl in cols:
            pivot_row = None
            best = None
            for rl, row in rows.items():
                if rl in eliminated or cl not in row:
                    continue
                fill = len(row)
                if best is None or fill < best:
                    best = fill
                    pivot_row = rl
            if pivot_row is None:
                raise ValueError(f"singular system: no pivot for column {cl!r}")
            eliminated.add(pivot_row)
            prow = rows[pivot_row]
            pv = prow[cl]
            prow = {c: v / pv for c, v in prow.items()}
            rows[pivot_row] = prow
            bb = b.get(pivot_row, QZERO) / pv
            if bb == 0:
                b.pop(pivot_row, None)
            else:
                b[pivot_row] = bb
            for rl in list(rows):
                if rl == pivot_row:
                    continue
                row = rows[rl]
                f = row.get(cl)
                if f is None or f == 0:
                    continue
                for c, v in prow.items():
                    s = row.get(c, QZERO) - f * v
                    if s == 0:
                        row.pop(c, None)
                    else:
                        row[c] = s
                s = b.get(rl, QZERO) - f * b.get(pivot_row, QZERO)
                if s == 0:
                    b.pop(rl, None)
                else:
                    b[rl] = s
            solution[cl] = pivot_row
        # consistency: every remaining rhs entry must be zero
        for rl, v in b.items():
            if rl not in eliminated and v != 0:
                raise ValueError("inconsistent system")
        return {cl: b.get(rl, QZERO) for cl, rl in solution.items()}

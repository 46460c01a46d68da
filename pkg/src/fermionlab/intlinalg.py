"""Exact sparse linear algebra over the integers.

All coefficients are arbitrary-precision Python ints; there is no floating
point anywhere in this module.  Matrices are stored column-major as nested
dicts, which makes composition (the dominant operation in operator algebra)
a sparse column sweep.  Rank, determinant and kernels go through dense
fraction-free elimination; sizes in this package stay in the low hundreds.
"""

from __future__ import annotations


class IntMatrix:
    """Sparse integer matrix, column-major: ``cols[j][i] = entry (i, j)``."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else {}

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {j: {j: 1} for j in range(n)})

    @classmethod
    def from_entries(cls, nrows, ncols, entries):
        """Build from an iterable of ``(i, j, value)`` triples."""
        m = cls(nrows, ncols)
        for i, j, v in entries:
            if v:
                m._add_entry(i, j, v)
        return m

    @classmethod
    def from_rows(cls, rows):
        """Build from a dense list of row lists."""
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v:
                    m._add_entry(i, j, v)
        return m

    @classmethod
    def from_columns(cls, nrows, columns):
        """Build from a list of dense column vectors."""
        m = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in enumerate(col):
                if v:
                    m._add_entry(i, j, v)
        return m

    # -- basic access ------------------------------------------------------

    def _add_entry(self, i, j, v):
        if not v:
            return
        col = self.cols.setdefault(j, {})
        w = col.get(i, 0) + v
        if w:
            col[i] = w
        else:
            del col[i]
            if not col:
                del self.cols[j]

    def __getitem__(self, ij):
        i, j = ij
        return self.cols.get(j, {}).get(i, 0)

    def entries(self):
        for j, col in self.cols.items():
            for i, v in col.items():
                yield i, j, v

    def column(self, j):
        """Dense column vector as a list."""
        col = self.cols.get(j, {})
        return [col.get(i, 0) for i in range(self.nrows)]

    def to_rows(self):
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            rows[i][j] = v
        return rows

    def is_zero(self):
        return not self.cols

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and \
            self.cols == other.cols

    def __hash__(self):
        raise TypeError("IntMatrix is not hashable")

    def __repr__(self):
        return f"IntMatrix({self.nrows}x{self.ncols}, {sum(len(c) for c in self.cols.values())} nonzero)"

    def copy(self):
        return IntMatrix(self.nrows, self.ncols,
                         {j: dict(col) for j, col in self.cols.items()})

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in matrix addition")
        out = self.copy()
        for i, j, v in other.entries():
            out._add_entry(i, j, v)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        if c == 0:
            return IntMatrix.zero(self.nrows, self.ncols)
        return IntMatrix(self.nrows, self.ncols,
                         {j: {i: c * v for i, v in col.items()}
                          for j, col in self.cols.items()})

    def __matmul__(self, other):
        """Composition ``self @ other``: apply ``other`` first."""
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        out = IntMatrix(self.nrows, other.ncols)
        for j, bcol in other.cols.items():
            acc = {}
            for k, bv in bcol.items():
                acol = self.cols.get(k)
                if not acol:
                    continue
                for i, av in acol.items():
                    w = acc.get(i, 0) + av * bv
                    if w:
                        acc[i] = w
                    else:
                        del acc[i]
            if acc:
                out.cols[j] = acc
        return out

    def apply(self, vec):
        """Apply to a sparse vector ``{index: coeff}``."""
        acc = {}
        for k, c in vec.items():
            col = self.cols.get(k)
            if not col:
                continue
            for i, v in col.items():
                w = acc.get(i, 0) + v * c
                if w:
                    acc[i] = w
                else:
                    del acc[i]
        return acc

    def transpose(self):
        out = IntMatrix(self.ncols, self.nrows)
        for i, j, v in self.entries():
            out.cols.setdefault(i, {})[j] = v
        return out

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("row mismatch in hstack")
        out = self.copy()
        out.ncols = self.ncols + other.ncols
        for j, col in other.cols.items():
            out.cols[self.ncols + j] = dict(col)
        return out

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise ValueError("column mismatch in vstack")
        out = IntMatrix(self.nrows + other.nrows, self.ncols)
        for i, j, v in self.entries():
            out.cols.setdefault(j, {})[i] = v
        for i, j, v in other.entries():
            out.cols.setdefault(j, {})[self.nrows + i] = v
        return out

    # -- exact elimination -----------------------------------------------

    def rank(self):
        return _rank_dense(self.to_rows())

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return _det_bareiss(self.to_rows())

    def is_unimodular(self):
        """True iff the matrix is a bijection of free Z-modules."""
        return self.nrows == self.ncols and abs(self.det()) == 1

    def kernel(self):
        """Saturated basis of the integer kernel, as an IntMatrix of columns.

        Returned columns generate every integer solution of ``A x = 0``.
        """
        h, u = _column_echelon(self.to_rows(), self.nrows, self.ncols)
        zero_cols = [j for j in range(self.ncols)
                     if all(h[i][j] == 0 for i in range(self.nrows))]
        return IntMatrix.from_columns(
            self.ncols, [[u[i][j] for i in range(self.ncols)] for j in zero_cols])

    def solve(self, rhs):
        """One integer solution of ``A x = b`` for each column b of ``rhs``.

        Returns an IntMatrix X with ``A @ X == rhs``, or None if some column
        has no integer solution.
        """
        h, u = _column_echelon(self.to_rows(), self.nrows, self.ncols)
        # Pivot structure of the echelon form: pivots[j] = row of pivot in col j.
        pivot_cols = []
        for j in range(self.ncols):
            rows = [i for i in range(self.nrows) if h[i][j] != 0]
            if rows:
                pivot_cols.append((min(rows), j))
        sols = []
        for cidx in range(rhs.ncols):
            b = rhs.column(cidx)
            y = [0] * self.ncols
            res = list(b)
            for prow, pcol in pivot_cols:
                if res[prow] == 0:
                    continue
                piv = h[prow][pcol]
                if res[prow] % piv != 0:
                    return None
                t = res[prow] // piv
                y[pcol] = t
                for i in range(self.nrows):
                    res[i] -= t * h[i][pcol]
            if any(res):
                return None
            sols.append([sum(u[i][j] * y[j] for j in range(self.ncols))
                         for i in range(self.ncols)])
        return IntMatrix.from_columns(self.ncols, sols)

    def inverse_unimodular(self):
        """Exact integer inverse; requires ``is_unimodular()``."""
        inv = self.solve(IntMatrix.identity(self.nrows))
        if inv is None or not (inv @ self == IntMatrix.identity(self.ncols)):
            raise ValueError("matrix is not invertible over the integers")
        return inv

    def column_space_basis(self):
        """Basis of the lattice spanned by the columns (column echelon form)."""
        h, _ = _column_echelon(self.to_rows(), self.nrows, self.ncols)
        cols = []
        for j in range(self.ncols):
            col = [h[i][j] for i in range(self.nrows)]
            if any(col):
                cols.append(col)
        return IntMatrix.from_columns(self.nrows, cols)

    # -- serialization -----------------------------------------------------

    def to_json(self, row_labels, col_labels):
        """Spec wire format: labeled sparse entries with string coefficients."""
        if len(row_labels) != self.nrows or len(col_labels) != self.ncols:
            raise ValueError("label count mismatch")
        ents = sorted(self.entries(), key=lambda e: (e[1], e[0]))
        return {
            "rows": list(row_labels),
            "cols": list(col_labels),
            "entries": [[i, j, str(v)] for i, j, v in ents],
        }

    @classmethod
    def from_json(cls, obj):
        m = cls(len(obj["rows"]), len(obj["cols"]))
        for i, j, v in obj["entries"]:
            m._add_entry(int(i), int(j), int(v))
        return m


def _det_bareiss(rows):
    """Fraction-free determinant (Bareiss); mutates its argument."""
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * piv - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = piv
    return sign * rows[n - 1][n - 1]


def _rank_dense(rows):
    """Rank by fraction-free forward elimination; mutates its argument."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    rank = 0
    row = 0
    prev = 1
    for col in range(nc):
        piv_row = None
        for i in range(row, nr):
            if rows[i][col] != 0:
                piv_row = i
                break
        if piv_row is None:
            continue
        rows[row], rows[piv_row] = rows[piv_row], rows[row]
        piv = rows[row][col]
        for i in range(row + 1, nr):
            if rows[i][col] == 0:
                continue
            for j in range(col + 1, nc):
                rows[i][j] = (rows[i][j] * piv - rows[i][col] * rows[row][j]) // prev
            rows[i][col] = 0
        prev = piv
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def _column_echelon(rows, nrows, ncols):
    """Unimodular column reduction: returns (H, U) with ``A @ U = H``.

    H is in column echelon form (each nonzero column has its topmost nonzero
    entry strictly below the previous column's). U is unimodular, so the
    columns of U over zero columns of H are a saturated kernel basis.
    """
    h = [list(r) for r in rows]
    u = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_op_sub(a, b, t):
        # column_a -= t * column_b
        for i in range(nrows):
            h[i][a] -= t * h[i][b]
        for i in range(ncols):
            u[i][a] -= t * u[i][b]

    def col_swap(a, b):
        for i in range(nrows):
            h[i][a], h[i][b] = h[i][b], h[i][a]
        for i in range(ncols):
            u[i][a], u[i][b] = u[i][b], u[i][a]

    lead = 0
    for row in range(nrows):
        if lead >= ncols:
            break
        nz = [j for j in range(lead, ncols) if h[row][j] != 0]
        if not nz:
            continue
        # Euclidean reduction across the nonzero columns of this row.
        while len(nz) > 1:
            nz.sort(key=lambda j: abs(h[row][j]))
            j0 = nz[0]
            for j in nz[1:]:
                t = h[row][j] // h[row][j0]
                if t:
                    col_op_sub(j, j0, t)
            nz = [j for j in nz if h[row][j] != 0]
        j0 = nz[0]
        if j0 != lead:
            col_swap(j0, lead)
        if h[row][lead] < 0:
            for i in range(nrows):
                h[i][lead] = -h[i][lead]
            for i in range(ncols):
                u[i][lead] = -u[i][lead]
        lead += 1
    return h, u


def intersect_kernels(mats):
    """Saturated basis of the common integer kernel of several matrices."""
    if not mats:
        raise ValueError("need at least one matrix")
    stacked = mats[0]
    for m in mats[1:]:
        stacked = stacked.vstack(m)
    return stacked.kernel()

"""Exact integer matrices, Smith normal form, abelian invariants.

Arithmetic is arbitrary-precision throughout (Python ints).  The SNF has
two paths: a sparse elimination that pivots on +-1 entries with a
Markowitz-style fill heuristic (relation matrices from subgroup rewriting
are large but almost entirely unit entries), and a dense fallback with
minimal-absolute-value pivoting and a divisibility repair loop.  Transform
accumulation (U, V with U*A*V = D) is optional and uses the dense path.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


class IntMatrix:
    """Sparse integer matrix; rows stored as {col: value} dicts."""

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @classmethod
    def from_rows(cls, dense):
        nrows = len(dense)
        ncols = len(dense[0]) if dense else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(dense):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    m.rows[i][j] = v
        return m

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        for i in range(n):
            m.rows[i][i] = 1
        return m

    def get(self, i, j):
        return self.rows[i].get(j, 0)

    def set(self, i, j, v):
        if v:
            self.rows[i][j] = v
        else:
            self.rows[i].pop(j, None)

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def to_dense(self):
        return [[self.rows[i].get(j, 0) for j in range(self.ncols)]
                for i in range(self.nrows)]

    def copy(self):
        return IntMatrix(self.nrows, self.ncols, [dict(r) for r in self.rows])

    def transpose(self):
        m = IntMatrix(self.ncols, self.nrows)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                m.rows[j][i] = v
        return m

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        out = IntMatrix(self.nrows, other.ncols)
        for i, row in enumerate(self.rows):
            acc = {}
            for k, v in row.items():
                for j, w in other.rows[k].items():
                    acc[j] = acc.get(j, 0) + v * w
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __repr__(self):
        return f"IntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def write_triplets(self, f):
        """Matrix-market style plain text dump: header then i j v lines."""
        f.write(f"{self.nrows} {self.ncols}\n")
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                f.write(f"{i} {j} {row[j]}\n")

    @classmethod
    def read_triplets(cls, f):
        nrows, ncols = map(int, f.readline().split())
        m = cls(nrows, ncols)
        for line in f:
            if line.strip():
                i, j, v = line.split()
                m.set(int(i), int(j), int(v))
        return m


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    if A.nrows != A.ncols:
        raise ValueError("determinant needs a square matrix")
    n = A.nrows
    a = A.to_dense()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass
class SNFResult:
    diagonal: list            # the nonzero d_1 | d_2 | ... | d_r
    nrows: int
    ncols: int
    U: IntMatrix | None = None
    V: IntMatrix | None = None

    @property
    def rank(self):
        return len(self.diagonal)

    def D(self) -> IntMatrix:
        m = IntMatrix(self.nrows, self.ncols)
        for i, d in enumerate(self.diagonal):
            m.rows[i][i] = d
        return m


def _dense_snf(dense, m, n, transforms):
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None
    a = [row[:] for row in dense]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if V:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def addmul_row(i, j, q):
        # row_i += q * row_j
        ai, aj = a[i], a[j]
        for k in range(n):
            ai[k] += q * aj[k]
        if U:
            ui, uj = U[i], U[j]
            for k in range(m):
                ui[k] += q * uj[k]

    def addmul_col(i, j, q):
        # col_i += q * col_j
        for row in a:
            row[i] += q * row[j]
        if V:
            for row in V:
                row[i] += q * row[j]

    diag = []
    t = 0
    lim = min(m, n)
    while t < lim:
        # pivot: minimal nonzero absolute value in the trailing submatrix
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < abs(best[2])):
                    best = (i, j, v)
                    if abs(v) == 1:
                        break
            if best and abs(best[2]) == 1:
                break
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide every remaining entry
            p = a[t][t]
            fixed = True
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        addmul_row(t, i, 1)
                        fixed = False
                        break
                if not fixed:
                    break
            if fixed:
                break
        if a[t][t] < 0:
            addmul_row(t, t, -2)
        diag.append(a[t][t])
        t += 1
    Um = IntMatrix.from_rows(U) if transforms else None
    Vm = IntMatrix.from_rows(V) if transforms else None
    return diag, Um, Vm


def _sparse_unit_eliminate(A: IntMatrix):
    """Eliminate with +-1 pivots; returns (#unit pivots, residual dense rows).

    Each unit pivot contributes an invariant factor 1; the residual
    submatrix (in fresh coordinates) carries the remaining invariants.
    """
    rows = [dict(r) for r in A.rows]
    colindex = [set() for _ in range(A.ncols)]
    for i, r in enumerate(rows):
        for j in r:
            colindex[j].add(i)
    live_rows = set(i for i, r in enumerate(rows) if r)
    live_cols = set(j for j in range(A.ncols) if colindex[j])
    ones = 0
    while True:
        # candidate unit pivots from the shortest rows
        best = None
        for i in sorted(live_rows, key=lambda i: (len(rows[i]), i)):
            r = rows[i]
            for j, v in r.items():
                if v == 1 or v == -1:
                    score = (len(r) - 1) * (len(colindex[j]) - 1)
                    if best is None or score < best[0]:
                        best = (score, i, j, v)
            if best is not None and len(r) - 1 > best[0]:
                break    # rows are only getting longer; can't beat best
        if best is None:
            break
        _, pi, pj, pv = best
        prow = rows[pi]
        # row ops clear column pj; then row pi / col pj split off a unit
        for i in list(colindex[pj]):
            if i == pi:
                continue
            q = rows[i][pj] * pv       # pv in {1,-1}: q*pv*prow[pj] = rows[i][pj]
            ri = rows[i]
            for j, v in prow.items():
                nv = ri.get(j, 0) - q * v
                if nv:
                    if j not in ri:
                        colindex[j].add(i)
                    ri[j] = nv
                else:
                    if j in ri:
                        del ri[j]
                        colindex[j].discard(i)
            if not ri:
                live_rows.discard(i)
        for j in prow:
            colindex[j].discard(pi)
            if not colindex[j]:
                live_cols.discard(j)
        rows[pi] = {}
        live_rows.discard(pi)
        live_cols.discard(pj)
        ones += 1
    # residual submatrix, densified in compressed coordinates
    rmap = {i: k for k, i in enumerate(sorted(live_rows))}
    cmap = {j: k for k, j in enumerate(sorted(live_cols))}
    dense = [[0] * len(cmap) for _ in range(len(rmap))]
    for i, k in rmap.items():
        for j, v in rows[i].items():
            dense[k][cmap[j]] = v
    return ones, dense


def _xgcd(a, b):
    """Extended gcd: returns (g, x, y) with g = a*x + b*y, g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _hnf_compress(dense, ncols):
    """Row-reduce dense integer rows to at most ncols rows spanning the
    same row lattice (integer row-echelon via extended-gcd combinations).

    Relation matrices have far more rows than columns; feeding them to the
    dense Smith elimination directly causes catastrophic coefficient
    growth, while one echelon sweep keeps every later computation on an
    ncols x ncols matrix.
    """
    basis = {}                       # pivot column -> row
    for row in dense:
        row = list(row)
        for c in range(ncols):
            if not row[c]:
                continue
            b = basis.get(c)
            if b is None:
                if row[c] < 0:
                    row = [-v for v in row]
                basis[c] = row
                break
            a, v = b[c], row[c]
            if v % a == 0:
                q = v // a
                row = [rv - q * bv for rv, bv in zip(row, b)]
            else:
                g, x, y = _xgcd(a, v)
                na, nv = a // g, v // g
                combined = [x * bv + y * rv for bv, rv in zip(b, row)]
                row = [na * rv - nv * bv for rv, bv in zip(row, b)]
                basis[c] = combined
    return [basis[c] for c in sorted(basis)]


def smith_normal_form(A: IntMatrix, transforms: bool = False) -> SNFResult:
    """Smith normal form U*A*V = D with d_1 | d_2 | ... | d_r.

    With transforms=True the unimodular U, V are accumulated (dense path,
    intended for modest sizes); without, a sparse unit-pivot elimination
    handles large relation matrices and only the diagonal is produced.
    """
    if transforms:
        diag, U, V = _dense_snf(A.to_dense(), A.nrows, A.ncols, True)
        return SNFResult(diag, A.nrows, A.ncols, U, V)
    ones, residual = _sparse_unit_eliminate(A)
    if residual and residual[0] and len(residual) > len(residual[0]):
        residual = _hnf_compress(residual, len(residual[0]))
    if residual and residual[0]:
        diag, _, _ = _dense_snf(residual, len(residual), len(residual[0]), False)
    else:
        diag = []
    return SNFResult([1] * ones + diag, A.nrows, A.ncols)


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factors of a finitely generated abelian group.

    torsion is an ascending divisibility chain of integers >= 2; the
    bracket rendering appends one 0 per free rank, e.g. Z/3 x Z/21 x Z^2
    renders as [3,21,0,0].
    """
    torsion: tuple
    free_rank: int

    def brackets(self) -> list:
        return list(self.torsion) + [0] * self.free_rank

    def __str__(self):
        return "[" + ",".join(str(v) for v in self.brackets()) + "]"

    @classmethod
    def from_brackets(cls, brackets):
        torsion = tuple(v for v in brackets if v)
        return cls(torsion, len(brackets) - len(torsion))

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n


def exponent_matrix(pres) -> IntMatrix:
    """Relator exponent-sum matrix: rows = relators, columns = generators."""
    m = IntMatrix(len(pres.relators), pres.rank)
    for i, r in enumerate(pres.relators):
        row = m.rows[i]
        for x in r:
            j = abs(x) - 1
            row[j] = row.get(j, 0) + (1 if x > 0 else -1)
        m.rows[i] = {j: v for j, v in row.items() if v}
    return m


def abelian_invariants(pres) -> AbelianInvariants:
    snf = smith_normal_form(exponent_matrix(pres))
    torsion = tuple(d for d in snf.diagonal if d > 1)
    return AbelianInvariants(torsion, pres.rank - snf.rank)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def mod_p_rank(A: IntMatrix, p: int) -> int:
    """Rank of A over the field with p elements."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows = []
    for r in A.rows:
        nr = {j: v % p for j, v in r.items() if v % p}
        if nr:
            rows.append(nr)
    rank = 0
    while rows:
        row = rows.pop()
        j, v = next(iter(row.items()))
        inv = pow(v, p - 2, p)
        row = {k: (w * inv) % p for k, w in row.items()}
        rank += 1
        nxt = []
        for r in rows:
            c = r.get(j, 0)
            if c:
                r = {k: (r.get(k, 0) - c * row.get(k, 0)) % p
                     for k in set(r) | set(row)}
                r = {k: w for k, w in r.items() if w}
            if r:
                nxt.append(r)
        rows = nxt
    return rank


def mod_p_nullspace(A: IntMatrix, p: int) -> list[list[int]]:
    """Basis of the right nullspace of A over the field with p elements.

    Returns vectors of length A.ncols with entries in 0..p-1, ordered by
    ascending pivot-free column, so the result is deterministic.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = A.ncols
    rows = []
    for r in A.rows:
        nr = [r.get(j, 0) % p for j in range(n)]
        if any(nr):
            rows.append(nr)
    pivots = []
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], p - 2, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
    basis = []
    for f in range(n):
        if f in pivots:
            continue
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-rows[i][f]) % p
        basis.append(v)
    return basis


def lattice_index(vectors, dim: int) -> int:
    """Index in Z^dim of the sublattice spanned by integer vectors.

    Returns 0 when the span has rank < dim, else the positive index
    (product of the Smith invariant factors).
    """
    m = IntMatrix.from_rows([list(v) for v in vectors]) if vectors else IntMatrix(0, dim)
    snf = smith_normal_form(m)
    if snf.rank < dim:
        return 0
    idx = 1
    for d in snf.diagonal:
        idx *= d
    return idx

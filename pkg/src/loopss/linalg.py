"""Exact integer matrix algebra.

Smith normal form with transforming matrices, integer kernels, and
subquotients ``Z / B`` of lattices in ``Z^n``.  Everything runs on Python
ints, so there is no overflow however large intermediate entries get.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .groups import FGAbelianGroup

Vector = tuple[int, ...]


class ChainConditionError(ValueError):
    """Raised when a composite of differentials is not zero."""


class NotInLatticeError(ValueError):
    """Raised when a vector is not in the lattice it is being solved in."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        columns = [tuple(c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise ValueError("column length does not match row count")
        return cls.from_rows(
            [[c[i] for c in columns] for i in range(rows)], cols=len(columns)
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> IntMatrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls.from_rows(out, cols=cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(self.columns(), cols=self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(self.row(i), c)) for c in ocols]
             for i in range(self.rows)],
            cols=other.cols,
        )

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows))

    def is_zero(self) -> bool:
        return not any(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return IntMatrix.from_rows(
            [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)],
            cols=self.cols + other.cols,
        )


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x)

    @property
    def invariant_factors(self) -> list[int]:
        return [x for x in self.diagonal if x]


def _pick_pivot(a, cells):
    best = None
    for i, j in cells:
        x = a[i][j]
        if x and (best is None or abs(x) < best[0]):
            best = (abs(x), i, j)
    return best


def smith_normal_form(A: IntMatrix) -> SNFResult:
    """Smith normal form of an integer matrix.

    Pivots on the smallest nonzero absolute value, ties broken by the lowest
    (row, col), so the output is deterministic.  The inverses of ``U`` and
    ``V`` are tracked alongside and returned as well.
    """
    m, n = A.rows, A.cols
    a = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        if i != k:
            a[i], a[k] = a[k], a[i]
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        if j != k:
            for r in a:
                r[j], r[k] = r[k], r[j]
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
            for r in Ui:
                r[src] -= q * r[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in V:
                r[dst] += q * r[src]
            Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    for k in range(min(m, n)):
        best = _pick_pivot(a, ((i, j) for i in range(k, m) for j in range(k, n)))
        if best is None:
            break
        _, pi, pj = best
        swap_rows(k, pi)
        swap_cols(k, pj)
        while True:
            p = a[k][k]
            for i in range(k + 1, m):
                add_row(i, k, -(a[i][k] // p))
            for j in range(k + 1, n):
                add_col(j, k, -(a[k][j] // p))
            rest = [(i, k) for i in range(k + 1, m)] + [(k, j) for j in range(k + 1, n)]
            best = _pick_pivot(a, rest)
            if best is not None:
                _, pi, pj = best
                if pi == k:
                    swap_cols(k, pj)
                else:
                    swap_rows(k, pi)
                continue
            bad = next(
                (i for i in range(k + 1, m) for j in range(k + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(k, bad, 1)
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            U[k] = [-x for x in U[k]]
            for r in Ui:
                r[k] = -r[k]

    return SNFResult(
        U=IntMatrix.from_rows(U, cols=m),
        D=IntMatrix.from_rows(a, cols=n),
        V=IntMatrix.from_rows(V, cols=n),
        U_inv=IntMatrix.from_rows(Ui, cols=m),
        V_inv=IntMatrix.from_rows(Vi, cols=n),
    )


def kernel_basis(A: IntMatrix) -> list[Vector]:
    """A basis of ``{v in Z^cols : A v = 0}``."""
    snf = smith_normal_form(A)
    return [snf.V.column(j) for j in range(snf.rank, A.cols)]


class _LatticeSolver:
    """Solves ``basis @ y == x`` over the integers for a full-column-rank basis."""

    def __init__(self, basis: IntMatrix):
        self.basis = basis
        self.snf = smith_normal_form(basis)
        self.divisors = self.snf.diagonal
        if any(d == 0 for d in self.divisors):
            raise ValueError("basis columns are not independent")

    def solve(self, x: Sequence[int]) -> Vector:
        k = self.basis.cols
        ux = self.snf.U.apply(x)
        if any(ux[k:]):
            raise NotInLatticeError("vector is outside the lattice span")
        z = []
        for xi, d in zip(ux[:k], self.divisors):
            q, rem = divmod(xi, d)
            if rem:
                raise NotInLatticeError("vector is outside the lattice")
            z.append(q)
        return self.snf.V.apply(z)

    def contains(self, x: Sequence[int]) -> bool:
        try:
            self.solve(x)
        except NotInLatticeError:
            return False
        return True


def lattice_basis(dim: int, generators: Iterable[Sequence[int]]) -> IntMatrix:
    """A basis (as matrix columns) of the lattice spanned by ``generators``."""
    gens = [tuple(g) for g in generators]
    if not gens:
        return IntMatrix.zeros(dim, 0)
    C = IntMatrix.from_columns(gens, rows=dim)
    snf = smith_normal_form(C)
    CV = C @ snf.V
    return IntMatrix.from_columns([CV.column(j) for j in range(snf.rank)], rows=dim)


class Subquotient:
    """The group ``Z / B`` for lattices ``B <= Z <= Z^dim``.

    Classes are ordered free generators first, then torsion generators in
    divisibility order.  ``coords`` sends an element of ``Z`` to its class
    coordinates, torsion coordinates reduced into ``[0, order)``.
    """

    def __init__(self, dim: int, cycles: Iterable[Sequence[int]],
                 boundaries: Iterable[Sequence[int]] = ()):
        self.dim = dim
        self.cycle_basis = lattice_basis(dim, cycles)
        self._zsolver = _LatticeSolver(self.cycle_basis)
        k = self.cycle_basis.cols
        bgens = [tuple(b) for b in boundaries if any(b)]
        try:
            by = [self._zsolver.solve(b) for b in bgens]
        except NotInLatticeError:
            raise ChainConditionError("boundaries are not contained in cycles") from None
        self.boundary_generators = bgens
        snf = smith_normal_form(IntMatrix.from_columns(by, rows=k))
        self._q = snf.U
        diag = snf.diagonal + [0] * (k - min(k, len(by)))
        free = [i for i in range(k) if diag[i] == 0]
        tors = [i for i in range(k) if diag[i] >= 2]
        self._slots = free + tors
        self.orders = tuple(0 for _ in free) + tuple(diag[i] for i in tors)
        self.group = FGAbelianGroup(len(free), tuple(diag[i] for i in tors))
        self.reps: list[Vector] = [
            self.cycle_basis.apply(snf.U_inv.column(i)) for i in self._slots
        ]
        self.signs = [1] * len(self._slots)

    def __len__(self):
        return len(self._slots)

    def contains(self, x: Sequence[int]) -> bool:
        return self._zsolver.contains(x)

    def coords(self, x: Sequence[int]) -> Vector:
        y = self._zsolver.solve(x)
        z = self._q.apply(y)
        out = []
        for slot, order, sign in zip(self._slots, self.orders, self.signs):
            c = sign * z[slot]
            out.append(c % order if order else c)
        return tuple(out)

    def is_boundary(self, x: Sequence[int]) -> bool:
        return self.contains(x) and not any(self.coords(x))

    def class_map(self) -> IntMatrix | None:
        """Integer matrix ``Q`` with ``coords(x) == Q x`` (mod orders) on cycles.

        Exists whenever the cycle lattice is saturated in ``Z^dim``; returns
        ``None`` otherwise.
        """
        s = self._zsolver.snf
        k = self.cycle_basis.cols
        if any(d != 1 for d in s.diagonal[:k]):
            return None
        # y = V @ (U x)[:k]  then  z = Q @ y
        Uk = IntMatrix.from_rows([s.U.row(i) for i in range(k)], cols=self.dim)
        full = self._q @ s.V @ Uk
        return IntMatrix.from_rows(
            [[sign * v for v in full.row(slot)]
             for slot, sign in zip(self._slots, self.signs)],
            cols=self.dim,
        )

    def prefer_representatives(self, candidates: Iterable[Sequence[int]]) -> None:
        """Swap in any candidate whose class is plus or minus one basis class."""
        taken = set()
        for v in candidates:
            v = tuple(v)
            if not self.contains(v):
                continue
            c = self.coords(v)
            nz = [i for i, x in enumerate(c) if x]
            if len(nz) != 1:
                continue
            i = nz[0]
            if i in taken:
                continue
            order = self.orders[i]
            x = c[i]
            if x == 1:
                flip = 1
            elif x == -1 or (order and x == order - 1):
                flip = -1
            else:
                continue
            self.reps[i] = v
            self.signs[i] *= flip
            taken.add(i)


def homology_of_pair(d_in: IntMatrix, d_out: IntMatrix) -> tuple[FGAbelianGroup, IntMatrix]:
    """``ker(d_out) / im(d_in)`` and the matrix sending cycles to class coordinates."""
    if d_out.cols != d_in.rows:
        raise ValueError(
            f"middle ranks differ: d_out has {d_out.cols} columns, d_in has {d_in.rows} rows"
        )
    if not (d_out @ d_in).is_zero():
        raise ChainConditionError("d_out @ d_in is not zero")
    sq = Subquotient(d_in.rows, kernel_basis(d_out), d_in.columns())
    return sq.group, sq.class_map()

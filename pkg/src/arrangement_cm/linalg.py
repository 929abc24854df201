"""Exact sparse linear algebra over Q (and a little over Z).

Vectors are plain ``dict[int, Fraction]`` with no stored zeros.  Matrices are
row-major lists of such dicts wrapped in :class:`QMatrix`.  Nothing in here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vec = Dict[int, Fraction]


class DimensionError(ValueError):
    pass


def _clean(row: dict) -> dict:
    return {j: Fraction(v) for j, v in row.items() if v != 0}


class QMatrix:
    """Sparse rational matrix, stored one dict per row."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[List[dict]] = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise DimensionError(f"expected {nrows} rows, got {len(rows)}")
        self.rows = [_clean(r) for r in rows]
        for r in self.rows:
            for j in r:
                if not 0 <= j < ncols:
                    raise DimensionError(f"column {j} out of range for {ncols} columns")

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], ncols: Optional[int] = None) -> "QMatrix":
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise DimensionError("ragged dense matrix")
        rows = [{j: Fraction(v) for j, v in enumerate(r) if v != 0} for r in data]
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Dict[Tuple[int, int], object]) -> "QMatrix":
        rows: List[dict] = [{} for _ in range(nrows)]
        for (i, j), v in entries.items():
            rows[i][j] = v
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        return {(i, j): v for i, r in enumerate(self.rows) for j, v in r.items()}

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def transpose(self) -> "QMatrix":
        rows: List[dict] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return QMatrix(self.ncols, self.nrows, rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def left_apply(self, x: Vec) -> Vec:
        """Row vector times matrix, ``x @ self``."""
        out: Vec = {}
        for i, a in x.items():
            for j, v in self.rows[i].items():
                out[j] = out.get(j, 0) + a * v
        return {j: v for j, v in out.items() if v != 0}

    def apply(self, x: Vec) -> Vec:
        """Matrix times column vector, ``self @ x``."""
        out: Vec = {}
        for i, r in enumerate(self.rows):
            s = sum((v * x[j] for j, v in r.items() if j in x), Fraction(0))
            if s:
                out[i] = s
        return out

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise DimensionError("shape mismatch in product")
        return QMatrix(self.nrows, other.ncols, [other.left_apply(r) for r in self.rows])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# reduced row echelon form


def _rref_rows(rows: List[dict]) -> Tuple[List[dict], List[int]]:
    rows = [dict(r) for r in rows if r]
    colrows: Dict[int, set] = {}
    for i, r in enumerate(rows):
        for j in r:
            colrows.setdefault(j, set()).add(i)
    used = set()
    pivots: List[Tuple[int, int]] = []
    for c in sorted(colrows):
        cand = [i for i in colrows[c] if i not in used]
        if not cand:
            continue
        # shortest row first, then smallest numerator
        p = min(cand, key=lambda i: (len(rows[i]), abs(rows[i][c].numerator), i))
        used.add(p)
        prow = rows[p]
        inv = 1 / prow[c]
        if inv != 1:
            for j in prow:
                prow[j] *= inv
        for i in list(colrows[c]):
            if i == p:
                continue
            r = rows[i]
            a = r[c]
            for j, v in prow.items():
                nv = r.get(j, 0) - a * v
                if nv:
                    if j not in r:
                        colrows.setdefault(j, set()).add(i)
                    r[j] = nv
                else:
                    r.pop(j, None)
                    colrows[j].discard(i)
        pivots.append((c, p))
    out = [rows[p] for _, p in pivots]
    return out, [c for c, _ in pivots]


def rref(M: QMatrix) -> Tuple[QMatrix, List[int], int]:
    """Reduced row echelon form.  Zero rows are dropped from ``R``."""
    rows, piv = _rref_rows(M.rows)
    return QMatrix(len(rows), M.ncols, rows), piv, len(piv)


def kernel_basis(M: QMatrix) -> QMatrix:
    """Rows spanning ``{x : M x = 0}``."""
    R, piv, _ = rref(M)
    pivset = set(piv)
    basis = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = {f: Fraction(1)}
        for row, c in zip(R.rows, piv):
            a = row.get(f)
            if a:
                v[c] = -a
        basis.append(v)
    return QMatrix(len(basis), M.ncols, basis)


def solve(M: QMatrix, b: Sequence) -> Optional[List[Fraction]]:
    """One solution of ``M x = b``, or ``None`` when the system is inconsistent."""
    if len(b) != M.nrows:
        raise DimensionError("right-hand side has wrong length")
    n = M.ncols
    aug = []
    for r, bi in zip(M.rows, b):
        row = dict(r)
        if bi:
            row[n] = Fraction(bi)
        aug.append(row)
    rows, piv = _rref_rows(aug)
    if piv and piv[-1] == n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(rows, piv):
        x[c] = row.get(n, Fraction(0))
    return x


def rowspace_sum(M1: QMatrix, M2: QMatrix) -> QMatrix:
    if M1.ncols != M2.ncols:
        raise DimensionError("column counts differ")
    R, _, _ = rref(QMatrix(M1.nrows + M2.nrows, M1.ncols, M1.rows + M2.rows))
    return R


# ---------------------------------------------------------------------------
# rank with integer arithmetic


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def _integral_rows(rows: Iterable[dict]) -> List[Dict[int, int]]:
    out = []
    for r in rows:
        if not r:
            continue
        den = 1
        for v in r.values():
            d = v.denominator if isinstance(v, Fraction) else 1
            den = den * d // gcd(den, d)
        out.append(_primitive({j: int(v * den) for j, v in r.items()}))
    return out


def rank(M) -> int:
    """Rank over Q via fraction-free elimination on primitive integer rows.

    ``M`` may be a :class:`QMatrix` or any iterable of sparse row dicts.
    """
    rows = M.rows if isinstance(M, QMatrix) else M
    rows = _integral_rows(rows)
    # eliminate on the columns the matrix touches least first
    count: Dict[int, int] = {}
    for r in rows:
        for j in r:
            count[j] = count.get(j, 0) + 1
    order = {j: k for k, j in enumerate(sorted(count, key=lambda j: (count[j], j)))}
    rows = [{order[j]: v for j, v in r.items()} for r in rows]
    rows.sort(key=len)
    pivots: Dict[int, Dict[int, int]] = {}
    for r in rows:
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = r
                break
            a, b = p[c], r[c]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {}
            for j, v in r.items():
                new[j] = v * fa
            for j, v in p.items():
                nv = new.get(j, 0) - v * fb
                if nv:
                    new[j] = nv
                else:
                    new.pop(j, None)
            r = _primitive(new)
    return len(pivots)


# ---------------------------------------------------------------------------
# incremental echelon basis with provenance


class Echelon:
    """Semi-echelon basis grown one vector at a time.

    Each stored row has a distinct leading column normalised to 1 and carries
    a tag: a sparse combination of the *original* vectors it came from, keyed
    by whatever hashable tag the caller supplied.  ``express`` rewrites a
    vector of the span in terms of those originals.
    """

    def __init__(self):
        self.pivots: Dict[int, Tuple[Vec, Dict[Hashable, Fraction]]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def _reduce(self, v: Vec, track: bool):
        v = {j: Fraction(a) for j, a in v.items() if a}
        acc: Dict[Hashable, Fraction] = {}
        while v:
            c = min(v)
            hit = self.pivots.get(c)
            if hit is None:
                break
            prow, ptag = hit
            a = v[c]
            for j, x in prow.items():
                nv = v.get(j, 0) - a * x
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
            if track:
                for t, x in ptag.items():
                    nv = acc.get(t, 0) + a * x
                    if nv:
                        acc[t] = nv
                    else:
                        acc.pop(t, None)
        return v, acc

    def add(self, v: Vec, tag: Optional[Hashable] = None) -> bool:
        """Insert ``v``; returns False if it was already in the span."""
        rem, acc = self._reduce(v, track=True)
        if not rem:
            return False
        c = min(rem)
        inv = 1 / rem[c]
        row = {j: x * inv for j, x in rem.items()}
        tagv = {t: -x * inv for t, x in acc.items()}
        if tag is not None:
            tagv[tag] = tagv.get(tag, 0) + inv
        self.pivots[c] = (row, {t: x for t, x in tagv.items() if x})
        return True

    def contains(self, v: Vec) -> bool:
        rem, _ = self._reduce(v, track=False)
        return not rem

    def express(self, v: Vec) -> Optional[Dict[Hashable, Fraction]]:
        """Coefficients over the original tagged vectors, or None if ``v`` is outside the span."""
        rem, acc = self._reduce(v, track=True)
        if rem:
            return None
        return acc


# ---------------------------------------------------------------------------
# Smith normal form (integer)


def smith_normal_form(M) -> Tuple[int, ...]:
    """Nonzero invariant factors ``d1 | d2 | ...`` of an integer matrix.

    Accepts a dense list of lists, a :class:`QMatrix` with integral entries,
    or a list of sparse ``{col: int}`` rows.
    """
    if isinstance(M, QMatrix):
        src = M.rows
    elif M and isinstance(M[0], dict):
        src = M
    else:
        src = [{j: v for j, v in enumerate(r) if v} for r in M]
    rows: Dict[int, Dict[int, int]] = {}
    for i, r in enumerate(src):
        rr = {}
        for j, v in r.items():
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError("smith_normal_form needs integer entries")
                v = v.numerator
            if v:
                rr[j] = int(v)
        if rr:
            rows[i] = rr
    cols: Dict[int, set] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    def setval(i, j, v):
        r = rows[i]
        if v:
            r[j] = v
            cols.setdefault(j, set()).add(i)
        else:
            r.pop(j, None)
            s = cols.get(j)
            if s is not None:
                s.discard(i)
                if not s:
                    del cols[j]

    diag: List[int] = []
    while rows:
        # smallest magnitude entry, ties broken by shortest row
        best = None
        for i, r in rows.items():
            for j, v in r.items():
                key = (abs(v), len(r), len(cols[j]), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
            if best is not None and best[0][0] == 1 and best[0][1] == 1:
                break
        _, i, j = best
        while True:
            p = rows[i][j]
            clean = True
            for k in list(cols[j]):
                if k == i:
                    continue
                q = rows[k][j] // p
                for c, v in list(rows[i].items()):
                    setval(k, c, rows[k].get(c, 0) - q * v)
                if rows[k].get(j, 0):
                    clean = False
                if not rows[k]:
                    del rows[k]
            for c in list(rows[i]):
                if c == j:
                    continue
                q = rows[i][c] // p
                # column op: col c -= q * col j touches only rows holding col j
                for k in list(cols[j]):
                    setval(k, c, rows[k].get(c, 0) - q * rows[k][j])
                if rows[i].get(c, 0):
                    clean = False
            if clean:
                break
            # move to the smallest remainder in row i / column j and repeat
            cand = [(abs(v), i, c) for c, v in rows[i].items()]
            cand += [(abs(rows[k][j]), k, j) for k in cols[j]]
            _, i, j = min(cand)
        diag.append(abs(rows[i][j]))
        setval(i, j, 0)
        if not rows[i]:
            del rows[i]
    return _invariant_factors(diag)


def _invariant_factors(diag: List[int]) -> Tuple[int, ...]:
    d = sorted(x for x in diag if x)
    n = len(d)
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                g = gcd(d[a], d[b])
                if g != d[a]:
                    d[a], d[b] = g, d[a] * d[b] // g
                    changed = True
        d.sort()
    return tuple(d)

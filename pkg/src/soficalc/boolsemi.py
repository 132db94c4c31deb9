"""Linear algebra over the Boolean semiring and finite join-semilattices.

Vectors are Python ints used as bitsets: bit ``i`` is the coefficient of
basis element ``i``. Matrices store one bitset per row. A row vector ``v``
acts on a matrix ``M`` from the left, ``v * M``, which is the convention used
throughout the package for transition operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import ProjectivityError, ShapeError


def bits_of(x: int):
    """Yield the indices of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def vec_from_indices(indices) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def vec_times(v: int, rows) -> int:
    """Row vector ``v`` times the matrix whose rows are ``rows``."""
    out = 0
    for i in bits_of(v):
        out |= rows[i]
    return out


@dataclass(frozen=True)
class BoolVec:
    bits: int
    width: int
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.bits >> self.width:
            raise ShapeError(f"vector bits exceed width {self.width}")

    @classmethod
    def from_indices(cls, indices, width, labels=None):
        return cls(vec_from_indices(indices), width, labels)

    def indices(self):
        return list(bits_of(self.bits))

    def __iter__(self):
        return (bool(self.bits >> i & 1) for i in range(self.width))

    def __getitem__(self, i):
        return bool(self.bits >> i & 1)

    def __or__(self, other):
        self._check(other)
        return BoolVec(self.bits | other.bits, self.width, self.labels)

    def __and__(self, other):
        self._check(other)
        return BoolVec(self.bits & other.bits, self.width, self.labels)

    def __le__(self, other):
        self._check(other)
        return self.bits | other.bits == other.bits

    def __bool__(self):
        return self.bits != 0

    def dot(self, other) -> bool:
        """Boolean inner product."""
        self._check(other)
        return bool(self.bits & other.bits)

    def _check(self, other):
        if self.width != other.width:
            raise ShapeError(f"width mismatch {self.width} vs {other.width}")

    def names(self):
        labels = self.labels or tuple(str(i) for i in range(self.width))
        return [labels[i] for i in bits_of(self.bits)]

    def __str__(self):
        return "".join("1" if b else "0" for b in self)


@dataclass(frozen=True)
class BoolMat:
    """Boolean matrix with ``len(rows)`` rows and ``ncols`` columns."""

    rows: tuple
    ncols: int
    row_labels: tuple | None = field(default=None, compare=False)
    col_labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r >> self.ncols:
                raise ShapeError(f"row bits exceed {self.ncols} columns")

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def shape(self):
        return (len(self.rows), self.ncols)

    @classmethod
    def identity(cls, n, labels=None):
        return cls(tuple(1 << i for i in range(n)), n, labels, labels)

    @classmethod
    def zero(cls, n, m):
        return cls((0,) * n, m)

    @classmethod
    def from_lists(cls, lists, ncols=None):
        lists = [list(r) for r in lists]
        if ncols is None:
            ncols = len(lists[0]) if lists else 0
        rows = []
        for r in lists:
            if len(r) != ncols:
                raise ShapeError("ragged matrix")
            rows.append(vec_from_indices(j for j, x in enumerate(r) if x))
        return cls(tuple(rows), ncols)

    def to_lists(self):
        return [[int(r >> j & 1) for j in range(self.ncols)] for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return bool(self.rows[i] >> j & 1)

    def transpose(self):
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in bits_of(r):
                cols[j] |= 1 << i
        return BoolMat(tuple(cols), self.nrows, self.col_labels, self.row_labels)

    def __matmul__(self, other):
        return mat_compose(self, other)

    def apply(self, v: int) -> int:
        """Row vector ``v`` (bitset over rows) times this matrix."""
        return vec_times(v, self.rows)

    def apply_right(self, v: int) -> int:
        """This matrix times column vector ``v`` (bitset over columns)."""
        out = 0
        for i, r in enumerate(self.rows):
            if r & v:
                out |= 1 << i
        return out

    def kron(self, other):
        return kron(self, other)

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.to_lists())


def mat_compose(f: BoolMat, g: BoolMat) -> BoolMat:
    """Boolean product ``f * g`` for ``f`` of shape n x m and ``g`` of shape m x k."""
    if f.ncols != g.nrows:
        raise ShapeError(f"cannot compose {f.shape} with {g.shape}")
    return BoolMat(tuple(vec_times(r, g.rows) for r in f.rows), g.ncols,
                   f.row_labels, g.col_labels)


def kron(f: BoolMat, g: BoolMat) -> BoolMat:
    """Kronecker product; row index (i, k) maps to ``i * g.nrows + k``."""
    rows = []
    for fr in f.rows:
        for gr in g.rows:
            out = 0
            for j in bits_of(fr):
                out |= gr << (j * g.ncols)
            rows.append(out)
    return BoolMat(tuple(rows), f.ncols * g.ncols)


def bool_trace(m: BoolMat) -> bool:
    if m.nrows != m.ncols:
        raise ShapeError(f"trace of non-square matrix {m.shape}")
    return any(r >> i & 1 for i, r in enumerate(m.rows))


def transitive_closure(rows, reflexive=False):
    """Warshall closure of a square relation given as row bitsets."""
    n = len(rows)
    out = list(rows)
    if reflexive:
        out = [r | (1 << i) for i, r in enumerate(out)]
    for k in range(n):
        bit = 1 << k
        rk = out[k]
        for i in range(n):
            if out[i] & bit:
                out[i] |= rk
    return out


def eventual_period(m: BoolMat):
    """Smallest ``(t, p)`` with ``t, p >= 1`` and ``M^(t+p) == M^t``.

    Powers are indexed from ``M^1``; the identity power is not part of the
    search, so a nonzero idempotent gives ``(1, 1)``.
    """
    if m.nrows != m.ncols:
        raise ShapeError("eventual_period needs a square matrix")
    seen = {}
    power = m
    k = 1
    while power.rows not in seen:
        seen[power.rows] = k
        power = mat_compose(power, m)
        k += 1
    t = seen[power.rows]
    return t, k - t


@dataclass(frozen=True)
class Semilattice:
    """A join-closed set of bitsets of a fixed width, containing 0.

    Elements are plain ints. ``u <= v`` iff ``u | v == v``.
    """

    width: int
    elements: tuple
    generators: tuple = ()

    def __contains__(self, x):
        return x in self._index

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {x: i for i, x in enumerate(self.elements)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, x):
        return self._index[x]

    @property
    def top(self):
        out = 0
        for x in self.elements:
            out |= x
        return out

    def leq(self, x, y):
        return x | y == y

    def below(self, x):
        return [z for z in self.elements if z | x == x]


def _sort_key(x):
    return (bin(x).count("1"), x)


def join_closure(generators, width=None) -> Semilattice:
    """Smallest join-closed set containing 0 and the given bitsets."""
    gens = []
    for g in generators:
        g = g.bits if isinstance(g, BoolVec) else g
        if g not in gens:
            gens.append(g)
    if width is None:
        width = max((g.bit_length() for g in gens), default=0)
    elements = {0}
    for g in gens:
        if g in elements:
            continue
        elements |= {e | g for e in elements}
    return Semilattice(width, tuple(sorted(elements, key=_sort_key)), tuple(gens))


def meet(s: Semilattice, x, y):
    """Greatest lower bound inside ``s``: the join of all common lower bounds."""
    out = 0
    for z in s.elements:
        if z | x == x and z | y == y:
            out |= z
    return out


def is_distributive(s: Semilattice) -> bool:
    elems = s.elements
    meets = {}

    def m(a, b):
        key = (a, b) if a <= b else (b, a)
        if key not in meets:
            meets[key] = meet(s, a, b)
        return meets[key]

    for x, y, z in product(elems, repeat=3):
        if m(x, y | z) != m(x, y) | m(x, z):
            return False
    return True


def join_irreducibles(s: Semilattice):
    """Nonzero elements that are not the join of the elements strictly below."""
    out = []
    for x in s.elements:
        if x == 0:
            continue
        below = 0
        for z in s.elements:
            if z != x and z | x == x:
                below |= z
        if below != x:
            out.append(x)
    return out


@dataclass(frozen=True)
class LatticeEmbedding:
    """Retraction of a distributive semilattice onto the free module over J.

    ``inject`` sends an element to the frozenset of indices ``j`` with
    ``J[j] <= x``; ``project`` joins the selected irreducibles.
    """

    source: Semilattice
    join_irreducibles: tuple

    def inject(self, x) -> frozenset:
        return frozenset(i for i, j in enumerate(self.join_irreducibles) if j | x == x)

    def inject_bits(self, x) -> int:
        return vec_from_indices(self.inject(x))

    def project(self, subset) -> int:
        if isinstance(subset, int):
            subset = bits_of(subset)
        out = 0
        for i in subset:
            out |= self.join_irreducibles[i]
        return out

    @property
    def rank(self):
        return len(self.join_irreducibles)

    def order_matrix(self) -> BoolMat:
        """Entry (i, k) is ``J[i] <= J[k]``."""
        js = self.join_irreducibles
        rows = [vec_from_indices(k for k, b in enumerate(js) if a | b == b) for a in js]
        return BoolMat(tuple(rows), len(js))

    def endomorphism_matrix(self, f) -> BoolMat:
        """Matrix of ``inject . f . project`` in row convention."""
        f = _as_map(f)
        return BoolMat(tuple(self.inject_bits(f(j)) for j in self.join_irreducibles), self.rank)


def _as_map(f):
    if callable(f):
        return f
    return f.__getitem__


def birkhoff_embedding(s: Semilattice) -> LatticeEmbedding:
    if not is_distributive(s):
        raise ProjectivityError("semilattice is not distributive, so not projective")
    return LatticeEmbedding(s, tuple(join_irreducibles(s)))


def projective_trace(e: LatticeEmbedding, f) -> bool:
    """Trace of a join-preserving endomorphism through the Birkhoff retraction."""
    return bool_trace(e.endomorphism_matrix(f))


def profile_closure(row_vecs, col_vecs):
    """Profiles of ``row_vecs`` against ``col_vecs`` and their join closure.

    The profile of ``r`` has bit ``j`` set iff ``r & col_vecs[j]`` is nonzero.
    Returns ``(profiles, semilattice)``.
    """
    profiles = []
    for r in row_vecs:
        p = 0
        for j, c in enumerate(col_vecs):
            if r & c:
                p |= 1 << j
        profiles.append(p)
    return profiles, join_closure(profiles, len(col_vecs))

"""Exact rational and integer linear algebra.

Vectors are tuples of :class:`fractions.Fraction` (or ``int``), matrices are
tuples of row tuples.  Subspaces of Q^N are kept in a canonical form so that
two presentations of the same subspace compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from . import kernels
from .errors import DimensionMismatch, RankDeficient

Vector = tuple
Matrix = tuple

LLL_DELTA = Fraction(3, 4)


# -- small helpers ---------------------------------------------------------

def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass ints, Fractions or 'p/q' strings")
    return Fraction(x)


def as_vector(v: Iterable) -> Vector:
    out = tuple(frac(a) for a in v)
    if not out:
        raise DimensionMismatch("empty vector")
    return out


def as_matrix(m: Iterable[Iterable]) -> Matrix:
    rows = tuple(tuple(frac(a) for a in row) for row in m)
    if not rows or not rows[0]:
        raise DimensionMismatch("matrix must have at least one row and one column")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatch("ragged matrix")
    return rows


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m))


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), 0)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if len(a[0]) != len(b):
        raise DimensionMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    cols = transpose(b)
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    return tuple(c * a for a in v)


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale ``v`` to a primitive integer vector, keeping its sign."""
    v = [frac(a) for a in v]
    den = reduce(lcm, (a.denominator for a in v), 1)
    ints = [int(a * den) for a in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(a // g for a in ints)


def sign_normalized(v: Sequence) -> tuple:
    """Flip ``v`` so that its first nonzero entry is positive."""
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return tuple(v)


def norm_sq(v: Sequence) -> int:
    return sum(a * a for a in v)


def desc_lex_key(v: Sequence[int]) -> tuple:
    """Sort key: squared norm, then larger leading entries first.

    This puts ``e1`` before ``e2`` and ``(1, 1)`` before ``(1, -1)``.
    """
    return (norm_sq(v), tuple(-a for a in v))


# -- echelon forms, rank, determinant ---------------------------------------

def rref(m) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form over Q.

    Returns ``(reduced, pivot_columns, rank)``.
    """
    rows = [list(r) for r in as_matrix(m)]
    n_rows, n_cols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), pivots, len(pivots)


def rank(m) -> int:
    return rref(m)[2]


def det(m) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination (0x0 gives 1)."""
    rows = [[frac(a) for a in r] for r in m]
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("determinant of a non-square matrix")
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            result = -result
        piv = rows[c][c]
        result *= piv
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / piv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return result


def inverse(m) -> Matrix:
    a = as_matrix(m)
    n = len(a)
    aug = [list(row) + list(e) for row, e in zip(a, identity(n))]
    red, piv, rk = rref(aug)
    if piv[:n] != list(range(n)):
        raise RankDeficient("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def nullspace(m) -> list[Vector]:
    """A basis of the right nullspace ``{x : m x = 0}`` (not canonicalized)."""
    red, pivots, rk = rref(m)
    n_cols = len(red[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


# -- subspaces --------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^N in canonical form.

    ``basis`` holds the rows of the reduced echelon form of any spanning set,
    each scaled to a primitive integer vector; ``grassmann`` holds the
    primitive, sign-normalized vector of maximal minors of that basis.
    """

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]
    grassmann: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int | None = None) -> "Subspace":
        vecs = [tuple(frac(a) for a in v) for v in vectors]
        if ambient_dim is None:
            if not vecs:
                raise DimensionMismatch("ambient_dim is required for an empty spanning set")
            ambient_dim = len(vecs[0])
        if any(len(v) != ambient_dim for v in vecs):
            raise DimensionMismatch("spanning vectors have inconsistent length")
        vecs = [v for v in vecs if any(v)]
        if not vecs:
            return cls.zero(ambient_dim)
        return _canonical_subspace(tuple(vecs), ambient_dim)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.span(identity(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), (1,))

    def basis_matrix(self) -> Matrix:
        """The N x L matrix whose columns are the canonical basis."""
        return transpose(self.basis) if self.basis else ()

    def pivots(self) -> list[int]:
        return [next(i for i, a in enumerate(b) if a) for b in self.basis]

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of ``v`` in the canonical basis; ValueError if v is not in the subspace."""
        v = as_vector(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        coeffs = tuple(v[p] / b[p] for p, b in zip(self.pivots(), self.basis))
        recon = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coeffs, self.basis):
            for i, a in enumerate(b):
                recon[i] += c * a
        if tuple(recon) != v:
            raise ValueError("vector does not lie in the subspace")
        return coeffs

    def contains(self, v: Sequence) -> bool:
        try:
            self.coordinates(v)
        except ValueError:
            return False
        return True

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def constraint_matrix(self) -> tuple[tuple[int, ...], ...]:
        """Integer rows A with ``self = {x : A x = 0}`` (empty for the full space)."""
        if self.dim == 0:
            return tuple(tuple(int(i == j) for j in range(self.ambient_dim))
                         for i in range(self.ambient_dim))
        if self.dim == self.ambient_dim:
            return ()
        return tuple(primitive(v) for v in nullspace(self.basis))

    def from_coordinates(self, coeffs: Sequence) -> Vector:
        out = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coeffs, self.basis):
            if c:
                for i, a in enumerate(b):
                    out[i] += c * a
        return tuple(out)


@lru_cache(maxsize=8192)
def _canonical_subspace(vecs, n):
    red, pivots, rk = rref(vecs)
    basis = tuple(primitive(row) for row in red[:rk])
    return Subspace(n, basis, _wedge(basis, n))


def _wedge(vectors: Sequence[Sequence], n: int) -> tuple[int, ...]:
    """Primitive sign-normalized vector of maximal minors of the given columns."""
    j = len(vectors)
    if j == 0:
        return (1,)
    minors = []
    for idx in combinations(range(n), j):
        minors.append(det([[v[i] for v in vectors] for i in idx]))
    if not any(minors):
        raise RankDeficient("basis vectors are linearly dependent")
    return sign_normalized(primitive(minors))


def grassmann(basis) -> tuple[int, ...]:
    """Grassmann coordinates of an N x J basis matrix (rows indexed by 1..N).

    All J x J minors over row subsets in lexicographic order, scaled to a
    primitive integer vector with first nonzero entry positive.
    """
    m = as_matrix(basis)
    return _wedge(transpose(m), len(m))


def kernel(m) -> Subspace:
    """Right nullspace of ``m`` as a canonical subspace."""
    a = as_matrix(m)
    return Subspace.span(nullspace(a), ambient_dim=len(a[0]))


def intersect(u: Subspace, v: Subspace) -> Subspace:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    rows = u.constraint_matrix() + v.constraint_matrix()
    if not rows:
        return Subspace.full(u.ambient_dim)
    return kernel(rows)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    return Subspace.span(u.basis + v.basis, ambient_dim=u.ambient_dim)


def duality_check(basis, constraint) -> bool:
    """Check the Brill-Gordan duality between a basis X and a constraint A.

    ``basis`` is N x J, ``constraint`` is (N - J) x N, and X must span the
    kernel of A.  Returns True iff there is one nonzero rational gamma with
    ``det(X_I) = (-1)^eps(I) * gamma * det(A^{I'})`` for every J-subset I,
    where eps(I) is the sum of the (1-based) indices in I and A^{I'} is the
    column submatrix of A on the complement of I.
    """
    x = as_matrix(basis)
    n, j = len(x), len(x[0])
    a = as_matrix(constraint) if len(constraint) else ()
    if a and len(a[0]) != n:
        raise DimensionMismatch("constraint width must equal the basis height")
    if len(a) != n - j:
        raise DimensionMismatch(f"constraint must have {n - j} rows, got {len(a)}")
    if rank(x) != j:
        raise RankDeficient("basis is rank deficient")
    if a:
        if rank(a) != n - j or any(any(r) for r in mat_mul(a, x)):
            raise ValueError("basis does not span the kernel of the constraint")
    gamma = None
    for idx in combinations(range(n), j):
        comp = [i for i in range(n) if i not in idx]
        dx = det([x[i] for i in idx])
        da = det([[row[c] for c in comp] for row in a]) if a else Fraction(1)
        sign = -1 if sum(i + 1 for i in idx) % 2 else 1
        rhs = sign * da
        if rhs == 0:
            if dx != 0:
                return False
            continue
        g = dx / rhs
        if gamma is None:
            gamma = g
        elif g != gamma:
            return False
    return gamma is not None and gamma != 0


# -- integer lattices -------------------------------------------------------

@dataclass(frozen=True)
class LatticeBasis:
    ambient_dim: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.vectors)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """A Z-basis of ``{x in Z^n : A x = 0}`` via unimodular column operations."""
    m = len(rows)
    cols_a = [[int(rows[i][j]) for i in range(m)] for j in range(n)]
    cols_u = [[int(i == j) for i in range(n)] for j in range(n)]
    r = 0
    for i in range(m):
        if r == n:
            break
        for j in range(r + 1, n):
            b = cols_a[j][i]
            if b == 0:
                continue
            a = cols_a[r][i]
            g, s, t = _xgcd(a, b)
            ag, bg = a // g, b // g
            new_r_a = [s * p + t * q for p, q in zip(cols_a[r], cols_a[j])]
            new_j_a = [-bg * p + ag * q for p, q in zip(cols_a[r], cols_a[j])]
            new_r_u = [s * p + t * q for p, q in zip(cols_u[r], cols_u[j])]
            new_j_u = [-bg * p + ag * q for p, q in zip(cols_u[r], cols_u[j])]
            cols_a[r], cols_a[j] = new_r_a, new_j_a
            cols_u[r], cols_u[j] = new_r_u, new_j_u
        if cols_a[r][i] != 0:
            r += 1
    return [tuple(c) for c in cols_u[r:]]


def lattice_basis(u: Subspace) -> LatticeBasis:
    """A basis of the saturated lattice ``u`` intersected with Z^N."""
    if u.dim == 0:
        raise ValueError("lattice_basis needs a subspace of dimension >= 1")
    n = u.ambient_dim
    if u.dim == n:
        return LatticeBasis(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
    vecs = integer_kernel(u.constraint_matrix(), n)
    assert len(vecs) == u.dim
    return LatticeBasis(n, tuple(vecs))


def hnf(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Row Hermite normal form of the lattice generated by ``rows`` (zero rows dropped)."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return ()
    n_cols = len(a[0])
    out_rows = 0
    for c in range(n_cols):
        # gcd-combine column c among rows out_rows.. into row out_rows
        for i in range(out_rows + 1, len(a)):
            if a[i][c] == 0:
                continue
            p, q = a[out_rows][c], a[i][c]
            g, s, t = _xgcd(p, q)
            pg, qg = p // g, q // g
            r1 = [s * x + t * y for x, y in zip(a[out_rows], a[i])]
            r2 = [-qg * x + pg * y for x, y in zip(a[out_rows], a[i])]
            a[out_rows], a[i] = r1, r2
        if out_rows < len(a) and a[out_rows][c] != 0:
            if a[out_rows][c] < 0:
                a[out_rows] = [-x for x in a[out_rows]]
            piv = a[out_rows][c]
            for i in range(out_rows):
                f = a[i][c] // piv
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[out_rows])]
            out_rows += 1
            if out_rows == len(a):
                break
    return tuple(tuple(r) for r in a[:out_rows])


def _gso(vectors):
    """Exact Gram-Schmidt data: (mu, squared norms of the orthogonalized vectors)."""
    n = len(vectors)
    star = []
    bn = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i, b in enumerate(vectors):
        v = [Fraction(a) for a in b]
        for j in range(i):
            if bn[j] == 0:
                continue
            mu[i][j] = Fraction(dot(b, star[j])) / bn[j]
            v = [a - mu[i][j] * s for a, s in zip(v, star[j])]
        star.append(v)
        bn.append(sum(a * a for a in v))
    return mu, bn


def lll_reduce(b: LatticeBasis, delta: Fraction = LLL_DELTA) -> LatticeBasis:
    """LLL reduction with exact rational Gram-Schmidt (default delta = 3/4)."""
    basis = [list(v) for v in b.vectors]
    n = len(basis)
    if n <= 1:
        return LatticeBasis(b.ambient_dim, tuple(tuple(v) for v in basis))
    mu, bn = _gso(basis)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            m = mu[k][j]
            if abs(m) > Fraction(1, 2):
                q = (m.numerator * 2 + m.denominator) // (2 * m.denominator)  # floor(m + 1/2)
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[j])]
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            mu, bn = _gso(basis)
            k = max(k - 1, 1)
    return LatticeBasis(b.ambient_dim, tuple(tuple(v) for v in basis))


def gram_int(vectors: Sequence[Sequence[int]], form=None) -> list[list[int]]:
    """Integer Gram matrix ``v_i^T F v_j`` (``F`` defaults to the identity)."""
    if form is None:
        return [[dot(u, v) for v in vectors] for u in vectors]
    fv = [mat_vec(form, v) for v in vectors]
    return [[int(dot(u, w)) for w in fv] for u in vectors]


def enumerate_short(b: LatticeBasis, norm_sq_bound, max_nodes: int | None = None) -> list[tuple[int, ...]]:
    """All primitive lattice vectors with squared norm at most the bound.

    One vector per +/- pair (first nonzero entry positive), sorted by squared
    norm and then with larger leading entries first.  Raises
    :class:`~wittheight.errors.BudgetExceeded` if ``max_nodes`` is exhausted.
    """
    from .errors import BudgetExceeded

    bound = frac(norm_sq_bound)
    if bound < 0:
        raise ValueError("norm bound must be nonnegative")
    bound_int = bound.numerator // bound.denominator
    if bound_int < 1 or not b.vectors:
        return []
    red = lll_reduce(b)
    gram = gram_int(red.vectors)
    res = kernels.enum_points(gram, bound_int, max_nodes=max_nodes)
    if not res.complete:
        raise BudgetExceeded("enumeration budget exhausted", nodes=res.nodes, bound_sq=bound)
    seen = set()
    for c in res.points:
        if reduce(gcd, c, 0) != 1:
            continue
        v = tuple(sum(ci * vec[i] for ci, vec in zip(c, red.vectors)) for i in range(b.ambient_dim))
        seen.add(sign_normalized(v))
    return sorted(seen, key=desc_lex_key)

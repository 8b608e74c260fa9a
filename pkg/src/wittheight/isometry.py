"""Reflections, isometries and the Cartan-Dieudonne factorization.

An isometry of (Z, F) is stored as an N x N matrix extended by the identity
on the F-orthogonal complement of Z; heights of isometries are taken from
this extension.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .bilinear_space import BilinearSpace, orthogonal_complement, siegel_basis
from .errors import DimensionMismatch, NotAnIsometry, NotIsotropic
from .exact_linalg import (Subspace, as_matrix, det, dot, identity, intersect, kernel, mat_mul,
                           mat_vec, primitive, vec_add, vec_sub)
from .heights import (BoundCertificate, DEFAULT_PRECISION, certify, height_sq, inhom_height_sq,
                      matrix_height_sq, subspace_height_sq)

BETA_VALUES = (0, 1, -1, 2, -2)
EXTENSION_NOTE = "isometry height from the identity extension off Z"


def reflection_matrix(form, x: Sequence) -> tuple:
    """``I - (2 / F(x)) x (F x)^T``."""
    fx = form.apply(x)
    q = Fraction(dot(x, fx))
    if q == 0:
        raise NotIsotropic("cannot reflect in an isotropic vector")
    c = 2 / q
    n = len(x)
    return tuple(tuple(Fraction(int(i == j)) - c * x[i] * fx[j] for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class Reflection:
    mirror: tuple
    matrix: tuple

    def __call__(self, y):
        return mat_vec(self.matrix, y)


@dataclass(frozen=True)
class Isometry:
    matrix: tuple

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if len(m) != len(m[0]):
            raise DimensionMismatch("isometry matrix must be square")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "Isometry":
        return cls(identity(n))

    @property
    def height_sq(self) -> Fraction:
        return matrix_height_sq(self.matrix)

    def __call__(self, y):
        return mat_vec(self.matrix, y)


@dataclass(frozen=True)
class FactorizationResult:
    reflections: tuple[Reflection, ...]
    verified: bool
    certificates: tuple[BoundCertificate, ...]

    @property
    def length(self) -> int:
        return len(self.reflections)

    @property
    def mirrors(self) -> list[tuple]:
        return [r.mirror for r in self.reflections]


def _as_isometry(sigma) -> Isometry:
    return sigma if isinstance(sigma, Isometry) else Isometry(sigma)


def reflection(s: BilinearSpace, x: Sequence) -> Reflection:
    """Reflection of (Z, F) in the anisotropic vector x of Z."""
    if len(x) != s.N:
        raise DimensionMismatch("mirror length differs from the ambient dimension")
    if not any(x) or not s.contains(x):
        raise ValueError("the mirror must be a nonzero vector of Z")
    m = primitive(x)
    if s.form(m) == 0:
        raise NotIsotropic("the mirror is isotropic")
    return Reflection(m, reflection_matrix(s.form, m))


def reflection_height_cert(r: Reflection, s: BilinearSpace,
                           digits: int = DEFAULT_PRECISION) -> BoundCertificate:
    return certify("ref-bound", matrix_height_sq(r.matrix),
                   {"N": s.N, "H_F_sq": s.height_sq_f, "H_x_sq": height_sq(r.mirror)}, digits)


def _complement(s: BilinearSpace) -> Subspace:
    """F-orthogonal complement of Z in Q^N."""
    rows = [primitive(s.form.apply(b)) for b in s.z.basis]
    rows = [r for r in rows if any(r)]
    if not rows:
        return Subspace.full(s.N)
    return kernel(rows)


def is_isometry(s: BilinearSpace, a) -> bool:
    """Whether ``a`` maps Z into Z, fixes the complement of Z and preserves F on Z."""
    try:
        a = as_matrix(a)
    except (DimensionMismatch, TypeError, ValueError):
        return False
    if len(a) != s.N or any(len(row) != s.N for row in a):
        return False
    images = [mat_vec(a, b) for b in s.z.basis]
    if not all(s.contains(v) for v in images):
        return False
    if any(tuple(mat_vec(a, c)) != tuple(Fraction(x) for x in c) for c in _complement(s).basis):
        return False
    f = s.form
    for i, (bi, ai) in enumerate(zip(s.z.basis, images)):
        for bj, aj in list(zip(s.z.basis, images))[i:]:
            if f(ai, aj) != f(bi, bj):
                return False
    return True


def det_on_z(s: BilinearSpace, a) -> Fraction:
    """Determinant of the restriction of ``a`` to Z (in the canonical basis of Z)."""
    if s.L == 0:
        return Fraction(1)
    a = as_matrix(a)
    cols = [s.z.coordinates(mat_vec(a, b)) for b in s.z.basis]
    return det(tuple(zip(*cols)))


def invariant_subspace(s: BilinearSpace, sigma, digits: int = DEFAULT_PRECISION) -> tuple[Subspace, BoundCertificate]:
    """``{z in Z : sigma(z) = z}`` with its height certificate."""
    sigma = _as_isometry(sigma)
    a = sigma.matrix
    diff = tuple(tuple(a[i][j] - int(i == j) for j in range(s.N)) for i in range(s.N))
    rows = [primitive(r) for r in diff if any(r)]
    u = s.z if not rows else intersect(s.z, kernel(rows))
    cert = certify("inv-height", subspace_height_sq(u),
                   {"N": s.N, "J": u.dim, "H_sigma_sq": sigma.height_sq, "H_Z_sq": s.height_sq_z},
                   digits, note=EXTENSION_NOTE)
    return u, cert


def _beta_order(m: int):
    vals = sorted(product(BETA_VALUES, repeat=m), key=lambda b: sum(t * t for t in b))
    return [b for b in vals if any(b)]


def find_cd_vector(s: BilinearSpace, sigma) -> tuple[tuple, str]:
    """Anisotropic y in Z with ``sigma(y) - y`` (preferred) or ``sigma(y) + y`` anisotropic.

    y is a combination with coefficients in {-2, ..., 2} of the first m
    small-height basis vectors, m being the first index where F does not
    vanish on their span.
    """
    if s.L == 0 or not s.regular:
        raise ValueError("find_cd_vector needs a regular space of positive dimension")
    sigma = _as_isometry(sigma)
    f = s.form
    basis = siegel_basis(s.z)[0]
    m = next(k for k in range(1, s.L + 1)
             if any(f(basis[i], basis[j]) != 0 for i in range(k) for j in range(i, k)))
    candidates = []
    for beta in _beta_order(m):
        y = tuple(sum(b * x[i] for b, x in zip(beta, basis[:m])) for i in range(s.N))
        if f(y) != 0:
            candidates.append(y)
    for sign, combine in (("minus", vec_sub), ("plus", vec_add)):
        for y in candidates:
            if f(combine(sigma(y), y)) != 0:
                return y, sign
    raise AssertionError("no admissible vector among the small combinations")


def anis_certificate(s: BilinearSpace, y, digits: int = DEFAULT_PRECISION) -> BoundCertificate:
    return certify("anis", inhom_height_sq(y), {"N": s.N, "L": s.L, "H_Z_sq": s.height_sq_z}, digits)


def small_reflection(s: BilinearSpace, digits: int = DEFAULT_PRECISION) -> tuple[Reflection, BoundCertificate]:
    """A reflection of small height: the mirror comes from the search above with sigma = id."""
    y, _ = find_cd_vector(s, Isometry.identity(s.N))
    r = reflection(s, y)
    cert = certify("isom-bound", matrix_height_sq(r.matrix),
                   {"N": s.N, "L": s.L, "H_F_sq": s.height_sq_f, "H_Z_sq": s.height_sq_z}, digits)
    return r, cert


def _is_identity(a) -> bool:
    return all(a[i][j] == (i == j) for i in range(len(a)) for j in range(len(a)))


def _factor(s: BilinearSpace, a) -> list[tuple]:
    if _is_identity(a):
        return []
    if s.L == 1:
        # sigma = -id on a line: the reflection in its spanning vector
        return [s.z.basis[0]]
    sigma = Isometry(a)
    y, sign = find_cd_vector(s, sigma)
    sy = sigma(y)
    if tuple(sy) == tuple(Fraction(t) for t in y):
        mirrors = []
    elif sign == "minus":
        m = primitive(vec_sub(sy, y))
        a = mat_mul(reflection_matrix(s.form, m), a)
        mirrors = [m]
    else:
        # sigma = tau_{sigma y} o tau_{sigma y + y} o sigma'
        m1, m2 = primitive(sy), primitive(vec_add(sy, y))
        a = mat_mul(reflection_matrix(s.form, m2), mat_mul(reflection_matrix(s.form, m1), a))
        mirrors = [m1, m2]
    rest = orthogonal_complement(s, [y])
    return mirrors + _factor(s.restrict(rest), a)


def compose(reflections: Sequence[Reflection], n: int) -> tuple:
    out = identity(n)
    for r in reflections:
        out = mat_mul(out, r.matrix)
    return out


def cartan_dieudonne(s: BilinearSpace, sigma, digits: int = DEFAULT_PRECISION) -> FactorizationResult:
    """Write sigma as ``tau_1 o ... o tau_l`` with l <= 2L - 1, each tau certified."""
    sigma = _as_isometry(sigma)
    if not s.regular:
        raise ValueError("the factorization needs a regular space")
    if not is_isometry(s, sigma.matrix):
        raise NotAnIsometry("the matrix is not an isometry of (Z, F)")
    mirrors = _factor(s, sigma.matrix)
    refls = tuple(Reflection(m, reflection_matrix(s.form, m)) for m in mirrors)
    verified = compose(refls, s.N) == sigma.matrix
    params = {"N": s.N, "L": s.L, "H_F_sq": s.height_sq_f, "H_Z_sq": s.height_sq_z,
              "H_sigma_sq": sigma.height_sq}
    certs = tuple(certify("cd-me-1", matrix_height_sq(r.matrix), params, digits, note=EXTENSION_NOTE)
                  for r in refls)
    return FactorizationResult(refls, verified, certs)


def random_isometry(s: BilinearSpace, k: int, seed: int) -> Isometry:
    """Product of k reflections in random small anisotropic mirrors."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    a = identity(s.N)
    if k == 0:
        return Isometry(a)
    if not s.regular or s.L == 0:
        raise ValueError("random isometries need a regular space of positive dimension")
    rng = random.Random(seed)
    basis = siegel_basis(s.z)[0]
    for _ in range(k):
        while True:
            coeffs = [rng.randint(-3, 3) for _ in basis]
            y = tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(s.N))
            if any(y) and s.form(y) != 0:
                break
        a = mat_mul(a, reflection_matrix(s.form, primitive(y)))
    return Isometry(a)

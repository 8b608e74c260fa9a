"""Symmetric bilinear spaces (Z, F) over Q.

Vectors returned here are tuples of ints when integral (small-height bases,
witnesses, radical vectors) and tuples of Fractions otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm
from functools import reduce
from typing import Sequence

from . import kernels
from .errors import (BudgetExceeded, DimensionMismatch, InconsistentResult, NoSingularZero,
                     NotIsotropic, SiegelBoundNotMet)
from .exact_linalg import (LatticeBasis, Subspace, as_matrix, desc_lex_key, dot, enumerate_short,
                           frac, gram_int, intersect, kernel, lattice_basis, lll_reduce, mat_vec,
                           norm_sq, nullspace, primitive, rank, sign_normalized, vec_add, vec_scale)
from .heights import (BoundCertificate, BoundVal, DEFAULT_PRECISION, certify, bound_expr,
                      height_sq, inhom_height_sq, matrix_height_sq, subspace_height_sq)
from .local_global import is_isotropic

# anisotropy is additionally confirmed by exhaustive enumeration when the
# search fits in this many nodes
CERTIFY_NODES = 200_000


@dataclass(frozen=True)
class SymBilinearForm:
    coeffs: tuple

    def __post_init__(self):
        m = as_matrix(self.coeffs)
        if len(m) != len(m[0]):
            raise DimensionMismatch("form matrix must be square")
        n = len(m)
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise ValueError(f"form is not symmetric: entry ({i},{j}) != ({j},{i})")
        object.__setattr__(self, "coeffs", m)

    @classmethod
    def diagonal(cls, entries) -> "SymBilinearForm":
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def apply(self, x: Sequence) -> tuple:
        """The vector F x."""
        if len(x) != self.n:
            raise DimensionMismatch(f"vector of length {len(x)} for a form in {self.n} variables")
        return mat_vec(self.coeffs, x)

    def __call__(self, x: Sequence, y: Sequence | None = None) -> Fraction:
        if y is None:
            y = x
        if len(y) != self.n:
            raise DimensionMismatch(f"vector of length {len(y)} for a form in {self.n} variables")
        return Fraction(dot(x, self.apply(y)))

    @cached_property
    def height_sq(self) -> Fraction:
        return matrix_height_sq(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for row in self.coeffs for a in row)

    def scaled(self, c) -> "SymBilinearForm":
        c = frac(c)
        return SymBilinearForm(tuple(tuple(c * a for a in row) for row in self.coeffs))


def evaluate(f: SymBilinearForm, x: Sequence, y: Sequence) -> Fraction:
    """``x^T F y``."""
    if len(x) != f.n:
        raise DimensionMismatch(f"vector of length {len(x)} for a form in {f.n} variables")
    return f(x, y)


@dataclass(frozen=True)
class BilinearSpace:
    z: Subspace
    form: SymBilinearForm

    def __post_init__(self):
        if self.z.ambient_dim != self.form.n:
            raise DimensionMismatch(f"subspace of Q^{self.z.ambient_dim} with a form in {self.form.n} variables")

    @classmethod
    def full(cls, form) -> "BilinearSpace":
        if not isinstance(form, SymBilinearForm):
            form = SymBilinearForm(form)
        return cls(Subspace.full(form.n), form)

    @classmethod
    def spanned(cls, form, vectors) -> "BilinearSpace":
        if not isinstance(form, SymBilinearForm):
            form = SymBilinearForm(form)
        return cls(Subspace.span(vectors, form.n), form)

    @property
    def N(self) -> int:
        return self.z.ambient_dim

    @property
    def L(self) -> int:
        return self.z.dim

    @cached_property
    def gram(self) -> tuple:
        """Gram matrix of F on the canonical basis of Z."""
        fb = [self.form.apply(b) for b in self.z.basis]
        return tuple(tuple(Fraction(dot(u, w)) for w in fb) for u in self.z.basis)

    @cached_property
    def rank_r(self) -> int:
        return rank(self.gram) if self.L else 0

    @property
    def regular(self) -> bool:
        return self.rank_r == self.L

    @cached_property
    def height_sq_z(self) -> Fraction:
        return subspace_height_sq(self.z)

    @property
    def height_sq_f(self) -> Fraction:
        return self.form.height_sq

    @cached_property
    def lattice(self) -> LatticeBasis:
        """LLL-reduced basis of Z intersected with Z^N."""
        return lll_reduce(lattice_basis(self.z))

    def restrict(self, sub: Subspace) -> "BilinearSpace":
        return BilinearSpace(sub, self.form)

    def contains(self, v) -> bool:
        return self.z.contains(v)


# -- small helpers --------------------------------------------------------------

def _int_vec(v) -> tuple:
    return tuple(int(a) if Fraction(a).denominator == 1 else Fraction(a) for a in v)


def orthogonal_complement(s: BilinearSpace, vectors) -> Subspace:
    """``{z in Z : F(v, z) = 0 for every v}``."""
    rows = []
    for v in vectors:
        fv = s.form.apply(v)
        if any(fv):
            rows.append(primitive(fv))
    if not rows:
        return s.z
    return intersect(s.z, kernel(rows))


def in_radical(s: BilinearSpace, x) -> bool:
    fx = s.form.apply(x)
    return all(dot(fx, b) == 0 for b in s.z.basis)


# -- radical and regular part -------------------------------------------------------

def radical(s: BilinearSpace) -> Subspace:
    """The radical ``{x in Z : F(x, z) = 0 for all z in Z}``."""
    if s.L == 0:
        return s.z
    coords = nullspace(s.gram)
    return Subspace.span([s.z.from_coordinates(c) for c in coords], s.N)


def radical_certificate(s: BilinearSpace, rad: Subspace | None = None,
                        digits: int = DEFAULT_PRECISION, note: str = "") -> BoundCertificate:
    if rad is None:
        rad = radical(s)
    return certify("sing-height", subspace_height_sq(rad),
                   {"r": s.rank_r, "H_F_sq": s.height_sq_f, "H_Z_sq": s.height_sq_z}, digits,
                   note=note)


@dataclass(frozen=True)
class RegularSplit:
    radical: Subspace
    w: Subspace
    certificates: tuple[BoundCertificate, ...]


def regular_split(s: BilinearSpace, digits: int = DEFAULT_PRECISION) -> RegularSplit:
    """``Z = radical + W`` with W regular, spanned by small-height basis vectors of Z."""
    rad = radical(s)
    r = s.rank_r
    if r == 0:
        w = Subspace.zero(s.N)
    elif r == s.L:
        w = s.z
    else:
        chosen = []
        current = rad
        for v in siegel_basis(s.z)[0]:
            if not current.contains(v):
                chosen.append(v)
                current = Subspace.span(list(current.basis) + [v], s.N)
                if len(chosen) == r:
                    break
        w = Subspace.span(chosen, s.N)
    params = {"N": s.N, "L": s.L, "r": r, "H_F_sq": s.height_sq_f, "H_Z_sq": s.height_sq_z}
    certs = (
        certify("regular-2", subspace_height_sq(rad), params, digits),
        certify("regular-3", subspace_height_sq(w), params, digits),
    )
    return RegularSplit(rad, w, certs)


# -- small-height bases -----------------------------------------------------------

def _siegel_lhs(vectors, n) -> Fraction:
    # the inhomogeneous product is only meaningful for proper subspaces of
    # Q^N with N >= 2; on Q^1 the homogeneous product is certified instead
    if n == 1:
        return Fraction(1)
    out = Fraction(1)
    for v in vectors:
        out *= inhom_height_sq(v)
    return out


@lru_cache(maxsize=4096)
def _siegel_basis(u: Subspace, digits: int):
    lat = lll_reduce(lattice_basis(u))
    basis = sorted((sign_normalized(v) for v in lat.vectors), key=desc_lex_key)
    params = {"N": u.ambient_dim, "J": u.dim, "H_U_sq": subspace_height_sq(u)}
    cert = certify("siegel-1", _siegel_lhs(basis, u.ambient_dim), params, digits)
    if cert.verdict == "pass":
        return tuple(basis), cert
    # successive minima: shortest independent vectors in order
    pts = enumerate_short(lat, norm_sq(basis[-1]))
    chosen: list = []
    for v in pts:
        if rank(chosen + [v]) > len(chosen):
            chosen.append(v)
            if len(chosen) == u.dim:
                break
    cert = certify("siegel-1", _siegel_lhs(chosen, u.ambient_dim), params, digits,
                   note="successive minima")
    if cert.verdict != "pass":
        raise SiegelBoundNotMet(f"no basis within the Siegel bound found for {u.basis}")
    return tuple(chosen), cert


def siegel_basis(u: Subspace, digits: int = DEFAULT_PRECISION) -> tuple[list, BoundCertificate]:
    """Small-height integer basis of u, sorted by norm, with its Siegel certificate."""
    if u.dim == 0:
        raise ValueError("the zero subspace has no basis")
    basis, cert = _siegel_basis(u, digits)
    return list(basis), cert


def _ortho(s: BilinearSpace, u: Subspace) -> list:
    if u.dim == 0:
        return []
    f = s.form
    basis = siegel_basis(u)[0]
    x1 = basis[0]
    if f(x1) != 0:
        rest = orthogonal_complement(s.restrict(u), [x1])
        return [x1] + _ortho(s, rest)
    fx = f.apply(x1)
    partner = next((y for y in basis if dot(fx, y) != 0), None)
    if partner is None:
        # x1 is orthogonal to all of u: split off a coordinate hyperplane
        j = next(i for i, a in enumerate(x1) if a)
        hyper = kernel([tuple(int(i == j) for i in range(s.N))])
        return [x1] + _ortho(s, intersect(u, hyper))
    # isotropic but not singular: move off the light cone
    for eps in (1, 2):
        x = primitive(vec_add(x1, vec_scale(eps, partner)))
        if f(x) != 0:
            break
    x = sign_normalized(x)
    rest = orthogonal_complement(s.restrict(u), [x])
    return [x] + _ortho(s, rest)


def ortho_basis(s: BilinearSpace, digits: int = DEFAULT_PRECISION) -> tuple[list, BoundCertificate | None]:
    """F-orthogonal basis of Z with its certificate (None when Z = 0)."""
    basis = _ortho(s, s.z)
    if not basis:
        return [], None
    lhs = Fraction(1)
    for v in basis:
        lhs *= height_sq(v)
    cert = certify("siegel-2", lhs, {"N": s.N, "J": s.L, "H_F_sq": s.height_sq_f,
                                     "H_U_sq": s.height_sq_z}, digits)
    return basis, cert


# -- isotropy -----------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropyOutcome:
    """Result of an isotropy search.

    Exactly one of ``witness`` (a primitive isotropic vector of Z) or an
    anisotropy certificate is meaningful.  ``method`` records how the verdict
    was reached: "enumeration" (exhaustive search to the bound),
    "local-global" (Hasse-Minkowski, with ``enumeration_complete`` telling
    whether exhaustive enumeration confirmed it), "radical" (singular space)
    or "dimension" (L <= 1).
    """

    witness: tuple | None
    search_bound_sq: BoundVal | None
    enumeration_complete: bool
    method: str
    nodes: int = 0
    searched_norm_sq: int = 0

    @property
    def isotropic(self) -> bool:
        return self.witness is not None


def isotropy_search_bound(s: BilinearSpace, digits: int = DEFAULT_PRECISION) -> BoundVal:
    """Enclosure of B^2: an isotropic regular space has a zero of height <= B."""
    if s.L < 2:
        raise ValueError("a search bound is only defined for dimension >= 2")
    return bound_expr("isotropy-search", {"N": s.N, "L": s.L, "H_F_sq": s.height_sq_f,
                                          "H_Z_sq": s.height_sq_z}, digits)


def _lattice_forms(s: BilinearSpace):
    vecs = s.lattice.vectors
    g = gram_int(vecs)
    q = [[Fraction(dot(u, s.form.apply(w))) for w in vecs] for u in vecs]
    den = reduce(lcm, (a.denominator for row in q for a in row), 1)
    return vecs, g, [[int(a * den) for a in row] for row in q]


def _zeros_within(s: BilinearSpace, radius: int, max_nodes: int | None):
    """Primitive isotropic vectors of Z with norm^2 <= radius, in canonical order."""
    vecs, g, q = _lattice_forms(s)
    res = kernels.find_zeros(g, q, radius, max_nodes=max_nodes)
    out = set()
    for c in res.points:
        if reduce(gcd, c, 0) != 1:
            continue
        v = tuple(sum(ci * b[i] for ci, b in zip(c, vecs)) for i in range(s.N))
        out.add(sign_normalized(v))
    return sorted(out, key=desc_lex_key), res.nodes, res.complete


def _first_zero(s, limit: int, max_nodes, start: int = 4):
    """Search radii start, 4*start, ... up to limit; returns (witness, nodes, radius)."""
    total = 0
    radius = min(start, limit)
    while True:
        pts, nodes, complete = _zeros_within(s, radius, max_nodes)
        total += nodes
        if not complete:
            raise BudgetExceeded(f"isotropy search exhausted its budget at norm^2 {radius}",
                                 nodes=total, bound_sq=limit)
        if pts:
            return pts[0], total, radius
        if radius >= limit:
            return None, total, radius
        radius = min(radius * 4, limit)


def _bound_floor(b: BoundVal) -> int:
    return b.hi.numerator // b.hi.denominator


def find_isotropic(s: BilinearSpace, strategy: str = "hybrid", max_nodes: int | None = None,
                   certify_nodes: int = CERTIFY_NODES,
                   digits: int = DEFAULT_PRECISION) -> IsotropyOutcome:
    """Smallest primitive isotropic vector of Z, or a certificate that there is none.

    ``strategy="enumeration"`` decides by exhaustive search up to the search
    bound.  ``strategy="hybrid"`` decides with the Hasse-Minkowski criterion,
    finds the witness by an expanding search (which must succeed within the
    bound) and confirms anisotropy by exhaustive search when it costs at most
    ``certify_nodes`` nodes.  Either way a witness is the first isotropic
    vector in (norm, descending lexicographic) order.
    """
    if strategy not in ("hybrid", "enumeration"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if s.L == 0:
        return IsotropyOutcome(None, None, True, "dimension")
    if not s.regular:
        # a radical vector is isotropic, so the shortest zero is no longer than it
        rad_short = enumerate_short(lll_reduce(lattice_basis(radical(s))),
                                    norm_sq(siegel_basis(radical(s))[0][0]))[0]
        pts, nodes, complete = _zeros_within(s, norm_sq(rad_short), max_nodes)
        if not complete:
            raise BudgetExceeded("isotropy search exhausted its budget", nodes=nodes,
                                 bound_sq=norm_sq(rad_short))
        return IsotropyOutcome(pts[0], None, True, "radical", nodes, norm_sq(rad_short))
    if s.L == 1:
        return IsotropyOutcome(None, None, True, "dimension")

    bound = isotropy_search_bound(s, digits)
    limit = _bound_floor(bound)
    if strategy == "enumeration":
        w, nodes, radius = _first_zero(s, limit, max_nodes)
        return IsotropyOutcome(w, bound, w is None, "enumeration", nodes, radius)

    if is_isotropic(s.gram):
        w, nodes, radius = _first_zero(s, limit, max_nodes)
        if w is None:
            raise InconsistentResult("isotropic by Hasse-Minkowski but no zero within the search bound")
        return IsotropyOutcome(w, bound, False, "local-global", nodes, radius)
    cap = certify_nodes if max_nodes is None else min(certify_nodes, max_nodes)
    pts, nodes, complete = _zeros_within(s, limit, cap) if cap > 0 else ([], 0, False)
    if pts:
        raise InconsistentResult(f"anisotropic by Hasse-Minkowski but {pts[0]} is isotropic")
    return IsotropyOutcome(None, bound, complete, "local-global", nodes, limit if complete else 0)


# -- hyperbolic pairs and singular zeros ----------------------------------------------

def make_hyperbolic_pair(s: BilinearSpace, x) -> tuple[tuple, tuple]:
    """Complete an isotropic, nonsingular x in Z to a pair with F(x,y) = 1, F(y) = 0."""
    x = _int_vec(x)
    if len(x) != s.N:
        raise DimensionMismatch("vector length differs from the ambient dimension")
    if not any(x) or not s.contains(x):
        raise NotIsotropic("x must be a nonzero vector of Z")
    f = s.form
    if f(x) != 0:
        raise NotIsotropic(f"F(x) = {f(x)} != 0")
    fx = f.apply(x)
    partner = next((y for y in siegel_basis(s.z)[0] if dot(fx, y) != 0), None)
    if partner is None:
        raise NotIsotropic("x lies in the radical of Z")
    c = Fraction(dot(fx, partner))
    y = tuple(Fraction(a) / c - f(partner) / (2 * c * c) * b for a, b in zip(partner, x))
    return x, _int_vec(y)


def singular_zero(f: SymBilinearForm, digits: int = DEFAULT_PRECISION) -> tuple[tuple, BoundCertificate]:
    """Shortest nonzero x with F(x, .) = 0 on Q^N, certified against the singular-zero bound."""
    if not isinstance(f, SymBilinearForm):
        f = SymBilinearForm(f)
    r = rank(f.coeffs)
    if r == f.n:
        raise NoSingularZero("the form is nondegenerate")
    ker = kernel(f.coeffs)
    lat = lll_reduce(lattice_basis(ker))
    shortest = min(norm_sq(v) for v in lat.vectors)
    x = enumerate_short(lat, shortest)[0]
    cert = certify("sing", height_sq(x), {"N": f.n, "r": r, "H_F_sq": f.height_sq}, digits)
    return x, cert

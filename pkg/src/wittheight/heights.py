"""Weil heights over Q and interval enclosures of the explicit height bounds.

Heights are returned squared (``HeightSq`` is an exact ``Fraction``): over Q
the height of a vector is the Euclidean norm of the associated primitive
integer vector, so its square is an integer.  Bound right-hand sides involve
pi and Gamma values; each is kept symbolically as a product of rational powers
of rationals and pi (a :class:`Monomial`) and evaluated with outward-rounded
interval arithmetic.  When pi does not appear the comparison is done exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import factorial, lcm, log2, prod
from typing import Mapping, Sequence

from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext
from sympy import factorint

from .errors import MissingParameter, UnknownBound, UnsupportedField
from .exact_linalg import Subspace, frac, grassmann, norm_sq, primitive

HeightSq = Fraction

DEFAULT_PRECISION = 64
MAX_PRECISION = 4096
# exact comparison is skipped when the integers involved would exceed this
_EXACT_BITS_LIMIT = 4_000_000


# -- the field ---------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    kind: str  # "real" or "complex"
    local_degree: int


@dataclass(frozen=True)
class FieldData:
    """Degree, discriminant and archimedean places of the ground field.

    Only Q can be constructed; everything downstream reads its constants from
    here so that the formulas keep the general shape.
    """

    degree: int = 1
    discriminant_abs: int = 1
    places: tuple[Place, ...] = (Place("real", 1),)

    def __post_init__(self):
        if (self.degree, self.discriminant_abs, self.places) != (1, 1, (Place("real", 1),)):
            raise UnsupportedField("only the rational field is implemented "
                                   f"(got degree {self.degree}, |disc| {self.discriminant_abs})")
        if sum(p.local_degree for p in self.places) != self.degree:
            raise UnsupportedField("local degrees must add up to the degree")


RATIONALS = FieldData()


# -- heights -------------------------------------------------------------------

def height_sq(v: Sequence) -> HeightSq:
    """Squared Weil height; the zero vector gets 0."""
    return Fraction(norm_sq(primitive(v)))


def inhom_height_sq(v: Sequence) -> HeightSq:
    """Squared height of ``(1, v)``."""
    return height_sq((1, *v))


def matrix_height_sq(a: Sequence[Sequence]) -> HeightSq:
    return height_sq([x for row in a for x in row])


def subspace_height_sq(u: Subspace) -> HeightSq:
    return Fraction(norm_sq(u.grassmann))


def grassmann_height_sq(rows: Sequence[Sequence]) -> HeightSq:
    """Squared height of the wedge of ``rows`` (0 if they are dependent)."""
    cols = list(zip(*rows))
    try:
        return Fraction(norm_sq(grassmann(cols)))
    except ValueError:
        return Fraction(0)


def local_abs(a, p: int | None) -> Fraction:
    """``|a|_p`` for a prime p, or the usual absolute value when p is None."""
    a = frac(a)
    if p is None:
        return abs(a)
    if a == 0:
        return Fraction(0)
    k = 0
    num, den = a.numerator, a.denominator
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return Fraction(1, p ** k) if k >= 0 else Fraction(p ** -k)


def relevant_primes(a) -> list[int]:
    a = frac(a)
    primes = set(factorint(abs(a.numerator))) | set(factorint(a.denominator))
    return sorted(primes - {1})


def product_of_local_abs(a) -> Fraction:
    """Product of ``|a|_v`` over all places (1 for every nonzero rational)."""
    a = frac(a)
    if a == 0:
        raise ValueError("the product formula needs a nonzero number")
    out = local_abs(a, None)
    for p in relevant_primes(a):
        out *= local_abs(a, p)
    return out


# -- symbolic constants ------------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """``prod(base ** exp) * pi ** pi_exp`` with rational bases and exponents."""

    factors: tuple[tuple[Fraction, Fraction], ...] = ()
    pi_exp: Fraction = Fraction(0)

    @classmethod
    def of(cls, base, exp=1) -> "Monomial":
        return cls(((frac(base), frac(exp)),)).normalized()

    @classmethod
    def pi(cls, exp) -> "Monomial":
        return cls((), frac(exp))

    def normalized(self) -> "Monomial":
        acc: dict[Fraction, Fraction] = {}
        for b, e in self.factors:
            if b < 0:
                raise ValueError("negative base in a bound expression")
            if e == 0 or b == 1:
                continue
            acc[b] = acc.get(b, Fraction(0)) + e
        items = tuple(sorted((b, e) for b, e in acc.items() if e != 0))
        return Monomial(items, self.pi_exp)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.factors + other.factors, self.pi_exp + other.pi_exp).normalized()

    def __pow__(self, e) -> "Monomial":
        e = frac(e)
        return Monomial(tuple((b, x * e) for b, x in self.factors), self.pi_exp * e).normalized()

    @property
    def is_zero(self) -> bool:
        return any(b == 0 and e > 0 for b, e in self.factors)

    def describe(self) -> str:
        parts = [f"{b}^({e})" for b, e in self.factors]
        if self.pi_exp:
            parts.append(f"pi^({self.pi_exp})")
        return " * ".join(parts) or "1"


ONE = Monomial()


def _gamma_half_plus_one(j: int) -> Monomial:
    """Gamma(j/2 + 1) as a monomial."""
    if j % 2 == 0:
        return Monomial.of(factorial(j // 2))
    double_fact = prod(range(j, 0, -2))
    return Monomial.of(Fraction(double_fact, 2 ** ((j + 1) // 2))) * Monomial.pi(Fraction(1, 2))


def _r_v(kind: str, j: int) -> Monomial:
    if kind == "real":
        return Monomial.pi(Fraction(-1, 2)) * _gamma_half_plus_one(j) ** Fraction(1, j)
    if kind == "complex":
        return (Monomial.of(2, Fraction(-1, 2)) * Monomial.pi(Fraction(-1, 2))
                * Monomial.of(factorial(j), Fraction(1, 2 * j)))
    raise ValueError(f"unknown place kind {kind!r}")


def c_monomial(j: int, fd: FieldData = RATIONALS) -> Monomial:
    if j < 1:
        raise ValueError("C_K(j) needs j >= 1")
    out = Monomial.of(2) * Monomial.of(fd.discriminant_abs, Fraction(1, 2 * fd.degree))
    for place in fd.places:
        out = out * _r_v(place.kind, j) ** Fraction(place.local_degree, fd.degree)
    return out


# -- interval evaluation --------------------------------------------------------

def _to_fraction(mpf_tuple) -> Fraction:
    p, q = libmp.to_rational(mpf_tuple)
    return Fraction(int(p), int(q))


# pure in (m, digits); batch runs hit the same bounds over and over
@lru_cache(maxsize=4096)
def _eval_monomial(m: Monomial, digits: int) -> tuple[Fraction, Fraction]:
    if m.is_zero:
        return Fraction(0), Fraction(0)
    if not m.pi_exp and all(e.denominator == 1 for _, e in m.factors):
        exact = prod((b ** int(e) for b, e in m.factors), start=Fraction(1))
        return exact, exact
    ctx = MPIntervalContext()
    ctx.dps = digits + 10
    total = ctx.mpf(0)
    for b, e in m.factors:
        lb = ctx.log(ctx.mpf(b.numerator)) - ctx.log(ctx.mpf(b.denominator))
        total += lb * (ctx.mpf(e.numerator) / e.denominator)
    if m.pi_exp:
        total += ctx.log(ctx.pi) * (ctx.mpf(m.pi_exp.numerator) / m.pi_exp.denominator)
    val = ctx.exp(total)
    lo, hi = val._mpi_
    return _to_fraction(lo), _to_fraction(hi)


def _exact_le(lhs: Fraction, m: Monomial) -> bool | None:
    """Decide ``lhs <= m`` exactly when m has no pi factor; None if too costly."""
    if m.pi_exp:
        return None
    if m.is_zero:
        return lhs <= 0
    if lhs <= 0:
        return True
    d = lcm(*(e.denominator for _, e in m.factors)) if m.factors else 1
    bits = d * (abs(log2(lhs.numerator)) + log2(lhs.denominator) + 1)
    bits += sum(abs(e * d) * (log2(b.numerator) + log2(b.denominator) + 1) for b, e in m.factors)
    if bits > _EXACT_BITS_LIMIT:
        return None
    # lhs^d <= prod b^(e d)
    left = lhs ** d
    right = Fraction(1)
    for b, e in m.factors:
        right *= b ** int(e * d)
    return left <= right


@dataclass(frozen=True)
class BoundVal:
    """Enclosure ``lo <= value <= hi`` of a squared bound.

    ``terms`` (when present) is the symbolic expression; the value is the
    maximum over the terms.  Without terms the interval cannot be refined.
    """

    lo: Fraction
    hi: Fraction
    precision_digits: int
    inequality_id: str = ""
    terms: tuple[Monomial, ...] = ()
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def from_terms(cls, terms: Sequence[Monomial], digits: int = DEFAULT_PRECISION,
                   inequality_id: str = "", params: Mapping | None = None) -> "BoundVal":
        if not terms:
            raise ValueError("a bound needs at least one term")
        ivs = [_eval_monomial(t, digits) for t in terms]
        return cls(max(a for a, _ in ivs), max(b for _, b in ivs), digits, inequality_id,
                   tuple(terms), tuple(sorted((params or {}).items())))

    def refined(self, digits: int) -> "BoundVal":
        if not self.terms:
            return self
        return BoundVal.from_terms(self.terms, digits, self.inequality_id, dict(self.params))

    def exact_ge(self, lhs: Fraction) -> bool | None:
        """Exact answer to ``lhs <= value`` if it can be computed cheaply."""
        if not self.terms:
            return None
        answers = [_exact_le(lhs, t) for t in self.terms]
        if any(a is True for a in answers):
            return True
        if all(a is False for a in answers):
            return False
        return None

    def __float__(self):
        try:
            return float(self.hi)
        except OverflowError:
            return float("inf")


@dataclass(frozen=True)
class BoundCertificate:
    inequality_id: str
    lhs: HeightSq
    rhs_sq: BoundVal
    verdict: str  # "pass", "fail" or "indeterminate"
    exact: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def compare(lhs, rhs: BoundVal, max_digits: int = MAX_PRECISION, note: str = "") -> BoundCertificate:
    """Certify ``lhs <= rhs``.

    A straddling interval is first settled exactly when the bound has no pi
    factor, otherwise re-evaluated at doubled precision up to ``max_digits``.
    """
    lhs = frac(lhs)
    cur = rhs
    while True:
        if lhs <= cur.lo:
            return BoundCertificate(cur.inequality_id, lhs, cur, "pass", note=note)
        if lhs > cur.hi:
            return BoundCertificate(cur.inequality_id, lhs, cur, "fail", note=note)
        decided = cur.exact_ge(lhs)
        if decided is not None:
            return BoundCertificate(cur.inequality_id, lhs, cur, "pass" if decided else "fail",
                                    exact=True, note=note)
        if not cur.terms or cur.precision_digits >= max_digits:
            return BoundCertificate(cur.inequality_id, lhs, cur, "indeterminate", note=note)
        cur = cur.refined(min(2 * cur.precision_digits, max_digits))


def c_K(j: int, digits: int = DEFAULT_PRECISION, fd: FieldData = RATIONALS) -> BoundVal:
    """Enclosure of the field constant C_K(j) (not squared)."""
    return BoundVal.from_terms([c_monomial(j, fd)], digits, "c-k", {"j": j})


# -- bound registry -------------------------------------------------------------
#
# Every evaluator returns monomials for the SQUARE of the right-hand side.
# Height parameters are passed squared under the names H_*_sq.

def _n_disc(n, fd: FieldData, e) -> Monomial:
    """(N |D|^(1/d))^e."""
    return Monomial.of(n, e) * Monomial.of(fd.discriminant_abs, Fraction(e) / fd.degree)


def _c_sq(j, fd) -> Monomial:
    return c_monomial(j, fd) ** 2 if j >= 1 else ONE


def _siegel_1(p, fd):
    n, j, hu = p["N"], p["J"], p["H_U_sq"]
    return [_n_disc(n, fd, j) * Monomial.of(hu)]


def _siegel_2(p, fd):
    n, j, hf, hu = p["N"], p["J"], p["H_F_sq"], p["H_U_sq"]
    e = Fraction(j * j + j - 2, 2)
    return [Monomial.of(n, e) * Monomial.of(fd.discriminant_abs, e)
            * Monomial.of(hf, Fraction(j * (j + 1), 2)) * Monomial.of(hu, j)]


def _vaaler_term(n, l, m, hf, hz, fd):
    k = l - m
    if k == 0:
        return Monomial.of(hz)
    base = Monomial.of(2, 2 * m + 1) * _c_sq(k, fd)
    return base ** k * Monomial.of(hf, Fraction(k, 2)) * Monomial.of(hz)


def _vaaler_1(p, fd):
    return [_vaaler_term(p["N"], p["L"], p["M"], p["H_F_sq"], p["H_Z_sq"], fd)]


def _regular_2(p, fd):
    r, hf, hz = p["r"], p["H_F_sq"], p["H_Z_sq"]
    if r == 0:
        return [Monomial.of(hz)]
    return [_c_sq(r, fd) ** r * Monomial.of(hf, Fraction(r, 2)) * Monomial.of(hz)]


def _regular_3(p, fd):
    return [_n_disc(p["N"], fd, p["L"]) * Monomial.of(p["H_Z_sq"])]


def _sing(p, fd):
    n, r, hf = p["N"], p["r"], p["H_F_sq"]
    if r >= n:
        raise ValueError("the singular-zero bound needs r < N")
    out = Monomial.of(n) * Monomial.of(fd.discriminant_abs, Fraction(1, fd.degree))
    if r == 0:
        return [out]
    return [out * _c_sq(r, fd) ** Fraction(r, n - r) * Monomial.of(hf, Fraction(r, 2 * (n - r)))]


def _witt_common(p, fd, n_exp):
    n, l, m, hf, hz = p["N"], p["L"], p["M"], p["H_F_sq"], p["H_Z_sq"]
    inner = (Monomial.of(2, 2 * m + 1) * _c_sq(l, fd)) ** l * _n_disc(n, fd, n_exp(m, l))
    a_sq = inner ** Fraction(m * (m + 3), 4)
    tail = (Monomial.of(hf, Fraction(l + 2 * m, 4)) * Monomial.of(hz)) ** Fraction((m + 1) * (m + 2), 2)
    return [a_sq * tail]


def _witt_height(p, fd):
    return _witt_common(p, fd, lambda m, l: m + 5 * l)


def _witt_height_reg(p, fd):
    return _witt_common(p, fd, lambda m, l: m + l)


def _witt_plane(p, fd):
    n, l, m, hf, hz = p["N"], p["L"], p["M"], p["H_F_sq"], p["H_Z_sq"]
    k = l - m
    b = _n_disc(n, fd, m + l)
    if k:
        b = (Monomial.of(2, 2 * m + 1) * _c_sq(k, fd)) ** k * b
    b_sq = b ** Fraction(1, m)
    return [b_sq * Monomial.of(hf, Fraction(k, m)) * Monomial.of(hz, Fraction(4, m))]


def _ref_bound(p, fd):
    n, hf, hx = p["N"], p["H_F_sq"], p["H_x_sq"]
    return [Monomial.of(n ** 3 * (n + 2), 2) * Monomial.of(hf) * Monomial.of(hx, 2)]


def _anis(p, fd):
    n, l, hz = p["N"], p["L"], p["H_Z_sq"]
    return [Monomial.of(4 * l) * _n_disc(n, fd, Fraction(l + 2, 2))
            * Monomial.of(hz, Fraction(l + 2, 2 * l))]


def _isom_bound(p, fd):
    n, l, hf, hz = p["N"], p["L"], p["H_F_sq"], p["H_Z_sq"]
    return [Monomial.of(16 * l * l * (n + 2) ** 2) * Monomial.of(n, l + 8)
            * Monomial.of(fd.discriminant_abs, Fraction(l + 2, fd.degree))
            * Monomial.of(hf) * Monomial.of(hz, Fraction(l + 2, l))]


def _inv_height(p, fd):
    n, j, hs, hz = p["N"], p["J"], p["H_sigma_sq"], p["H_Z_sq"]
    return [(Monomial.of(4) * Monomial.of(hs)) ** (n - j) * Monomial.of(hz)]


def _cd_me_1(p, fd):
    n, l, hf, hz, hs = p["N"], p["L"], p["H_F_sq"], p["H_Z_sq"], p["H_sigma_sq"]
    inner = (Monomial.of(2 * n * n) * Monomial.of(fd.discriminant_abs, Fraction(1, 2 * fd.degree))) ** (l * l)
    inner = inner * Monomial.of(hf, Fraction(l, 3)) * Monomial.of(hz, Fraction(l, 2)) * Monomial.of(hs)
    return [inner ** (5 ** (l - 1))]


def _isotropy_search(p, fd):
    # some isotropic x has H(x) <= (N|D|^(1/d))^(1/2) H(W)^(1/M), W from the
    # totally isotropic bound; the Witt index is unknown, so take every M
    n, l, hf, hz = p["N"], p["L"], p["H_F_sq"], p["H_Z_sq"]
    if l < 2:
        raise ValueError("a search bound needs dimension >= 2")
    return [_n_disc(n, fd, 1) * _vaaler_term(n, l, m, hf, hz, fd) ** Fraction(1, m)
            for m in range(1, l // 2 + 1)]


_REGISTRY = {
    "siegel-1": (_siegel_1, ("N", "J", "H_U_sq")),
    "siegel-2": (_siegel_2, ("N", "J", "H_F_sq", "H_U_sq")),
    "vaaler-1": (_vaaler_1, ("N", "L", "M", "H_F_sq", "H_Z_sq")),
    "regular-2": (_regular_2, ("r", "H_F_sq", "H_Z_sq")),
    "regular-3": (_regular_3, ("N", "L", "H_Z_sq")),
    "sing": (_sing, ("N", "r", "H_F_sq")),
    "sing-height": (_regular_2, ("r", "H_F_sq", "H_Z_sq")),
    "witt-height": (_witt_height, ("N", "L", "M", "H_F_sq", "H_Z_sq")),
    "witt-height-reg": (_witt_height_reg, ("N", "L", "M", "H_F_sq", "H_Z_sq")),
    "witt-plane": (_witt_plane, ("N", "L", "M", "H_F_sq", "H_Z_sq")),
    "ref-bound": (_ref_bound, ("N", "H_F_sq", "H_x_sq")),
    "anis": (_anis, ("N", "L", "H_Z_sq")),
    "isom-bound": (_isom_bound, ("N", "L", "H_F_sq", "H_Z_sq")),
    "inv-height": (_inv_height, ("N", "J", "H_sigma_sq", "H_Z_sq")),
    "cd-me-1": (_cd_me_1, ("N", "L", "H_F_sq", "H_Z_sq", "H_sigma_sq")),
    "isotropy-search": (_isotropy_search, ("N", "L", "H_F_sq", "H_Z_sq")),
}

INEQUALITY_IDS = tuple(_REGISTRY)


def bound_terms(inequality_id: str, params: Mapping, fd: FieldData = RATIONALS) -> list[Monomial]:
    try:
        fn, needed = _REGISTRY[inequality_id]
    except KeyError:
        raise UnknownBound(f"unknown inequality id {inequality_id!r}") from None
    missing = [k for k in needed if k not in params]
    if missing:
        raise MissingParameter(f"{inequality_id} needs {', '.join(missing)}")
    clean = {}
    for k in needed:
        v = frac(params[k])
        if k.startswith("H_") and v < 0:
            raise ValueError(f"{k} must be nonnegative")
        clean[k] = int(v) if not k.startswith("H_") else v
    return fn(clean, fd)


def bound_expr(inequality_id: str, params: Mapping, digits: int = DEFAULT_PRECISION,
               fd: FieldData = RATIONALS) -> BoundVal:
    """Enclosure of the squared right-hand side of the named inequality."""
    terms = bound_terms(inequality_id, params, fd)
    needed = _REGISTRY[inequality_id][1]
    return BoundVal.from_terms(terms, digits, inequality_id, {k: params[k] for k in needed})


def certify(inequality_id: str, lhs, params: Mapping, digits: int = DEFAULT_PRECISION,
            max_digits: int = MAX_PRECISION, note: str = "") -> BoundCertificate:
    return compare(lhs, bound_expr(inequality_id, params, digits), max_digits, note)


def worst_verdict(certs) -> str:
    verdicts = {c.verdict for c in certs}
    for v in ("fail", "indeterminate"):
        if v in verdicts:
            return v
    return "pass"

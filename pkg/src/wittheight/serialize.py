"""JSON encoding of every domain object.

Rationals travel as strings ("p/q", integers as "p"); squared heights use
keys ending in ``_sq``; bound enclosures are outward-rounded decimal strings
together with the precision they were evaluated at.  ``parse(serialize(x))``
returns an object equal to ``x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction

from .bilinear_space import BilinearSpace, IsotropyOutcome, SymBilinearForm
from .errors import DimensionMismatch
from .exact_linalg import Subspace, frac
from .heights import BoundCertificate, BoundVal, Monomial
from .isometry import FactorizationResult, Isometry, Reflection
from .witt_engine import HyperbolicPair, WittDecomposition


class MalformedInput(ValueError):
    """Input JSON that does not describe a valid object."""


# -- scalars --------------------------------------------------------------------

def rat(q) -> str:
    q = frac(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise MalformedInput("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        # JSON floats are accepted only when they are integers
        if not s.is_integer():
            raise MalformedInput(f"non-integral float {s!r}; write rationals as \"p/q\"")
        return Fraction(int(s))
    if not isinstance(s, str):
        raise MalformedInput(f"expected a rational string, got {type(s).__name__}")
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad rational {s!r}") from exc


def vec(v) -> list[str]:
    return [rat(a) for a in v]


def mat(m) -> list[list[str]]:
    return [vec(r) for r in m]


def parse_vec(v) -> tuple:
    if not isinstance(v, list):
        raise MalformedInput("a vector must be a JSON array")
    return tuple(parse_rat(a) for a in v)


def parse_mat(m) -> tuple:
    if not isinstance(m, list) or not m:
        raise MalformedInput("a matrix must be a nonempty array of arrays")
    rows = tuple(parse_vec(r) for r in m)
    if len({len(r) for r in rows}) != 1:
        raise MalformedInput("matrix rows have different lengths")
    return rows


def _int_tuple(v) -> tuple:
    """Integral entries come back as ints, the rest as Fractions."""
    return tuple(int(a) if a.denominator == 1 else a for a in parse_vec(v))


def decimal_str(q: Fraction, digits: int, rounding: str) -> str:
    """``q`` to ``digits`` significant digits, rounded toward -inf or +inf."""
    ctx = Context(prec=max(digits, 1), rounding=rounding, Emax=10**9, Emin=-10**9)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    return format(d, "E") if d.adjusted() > 30 or d.adjusted() < -30 else format(d, "f")


# -- heights and certificates ------------------------------------------------------

def monomial(m: Monomial) -> dict:
    return {"factors": [[rat(b), rat(e)] for b, e in m.factors], "pi_exp": rat(m.pi_exp)}


def parse_monomial(d) -> Monomial:
    return Monomial(tuple((parse_rat(b), parse_rat(e)) for b, e in d["factors"]),
                    parse_rat(d["pi_exp"]))


def _param_value(v):
    return rat(v) if isinstance(v, (int, Fraction)) else v


def bound(b: BoundVal) -> dict:
    return {"inequality_id": b.inequality_id,
            "lo": decimal_str(b.lo, b.precision_digits, ROUND_FLOOR),
            "hi": decimal_str(b.hi, b.precision_digits, ROUND_CEILING),
            "precision_digits": b.precision_digits,
            "terms": [monomial(t) for t in b.terms],
            "params": {k: _param_value(v) for k, v in b.params}}


def parse_bound(d) -> BoundVal:
    params = {k: parse_rat(v) for k, v in d.get("params", {}).items()}
    params = {k: int(v) if v.denominator == 1 and not k.startswith("H_") else v
              for k, v in params.items()}
    terms = [parse_monomial(t) for t in d.get("terms", [])]
    if terms:
        return BoundVal.from_terms(terms, d["precision_digits"], d.get("inequality_id", ""), params)
    # without terms only the enclosure survives
    return BoundVal(Fraction(Decimal(d["lo"])), Fraction(Decimal(d["hi"])), d["precision_digits"],
                    d.get("inequality_id", ""), (), tuple(sorted(params.items())))


def certificate(c: BoundCertificate) -> dict:
    return {"inequality_id": c.inequality_id, "lhs_sq": rat(c.lhs), "rhs_sq": bound(c.rhs_sq),
            "verdict": c.verdict, "exact": c.exact, "note": c.note}


def parse_certificate(d) -> BoundCertificate:
    return BoundCertificate(d["inequality_id"], parse_rat(d["lhs_sq"]), parse_bound(d["rhs_sq"]),
                            d["verdict"], d.get("exact", False), d.get("note", ""))


# -- spaces ----------------------------------------------------------------------

def subspace(u: Subspace) -> dict:
    return {"ambient_dim": u.ambient_dim, "dim": u.dim, "basis": mat(u.basis) if u.basis else [],
            "grassmann": vec(u.grassmann)}


def parse_subspace(d, n: int | None = None) -> Subspace:
    """Accepts the full object or a bare list of spanning vectors."""
    if isinstance(d, list):
        if n is None and not d:
            raise MalformedInput("an empty spanning set needs the ambient dimension")
        vecs = [parse_vec(v) for v in d]
        try:
            return Subspace.span(vecs, n)
        except DimensionMismatch as exc:
            raise MalformedInput(str(exc)) from exc
    n = d.get("ambient_dim", n)
    vecs = [parse_vec(v) for v in d.get("basis", [])]
    u = Subspace.span(vecs, n)
    if "grassmann" in d and tuple(parse_vec(d["grassmann"])) != u.grassmann:
        raise MalformedInput("grassmann vector does not match the basis")
    return u


def form(f: SymBilinearForm) -> list:
    return mat(f.coeffs)


def parse_form(m) -> SymBilinearForm:
    try:
        return SymBilinearForm(parse_mat(m))
    except (ValueError, DimensionMismatch) as exc:
        raise MalformedInput(str(exc)) from exc


def space(s: BilinearSpace) -> dict:
    return {"form": form(s.form), "subspace": subspace(s.z)}


def parse_space(d) -> BilinearSpace:
    f = parse_form(d["form"])
    z = parse_subspace(d["subspace"], f.n) if d.get("subspace") is not None else Subspace.full(f.n)
    try:
        return BilinearSpace(z, f)
    except (ValueError, DimensionMismatch) as exc:
        raise MalformedInput(str(exc)) from exc


# -- results -----------------------------------------------------------------------

def isotropy(o: IsotropyOutcome | None) -> dict | None:
    if o is None:
        return None
    return {"witness": vec(o.witness) if o.witness is not None else None,
            "isotropic": o.isotropic,
            "search_bound_sq": bound(o.search_bound_sq) if o.search_bound_sq else None,
            "enumeration_complete": o.enumeration_complete, "method": o.method,
            "nodes": o.nodes, "searched_norm_sq": o.searched_norm_sq}


def parse_isotropy(d) -> IsotropyOutcome | None:
    if d is None:
        return None
    w = _int_tuple(d["witness"]) if d["witness"] is not None else None
    b = parse_bound(d["search_bound_sq"]) if d["search_bound_sq"] else None
    return IsotropyOutcome(w, b, d["enumeration_complete"], d["method"], d["nodes"],
                           d["searched_norm_sq"])


def decomposition(d: WittDecomposition) -> dict:
    return {"witt_index": d.witt_index,
            "radical": subspace(d.radical),
            "hyperbolic_pairs": [{"x": vec(p.x), "y": vec(p.y),
                                  "certificate": certificate(p.certificate) if p.certificate else None}
                                 for p in d.planes],
            "anisotropic": subspace(d.anisotropic),
            "regular_part": subspace(d.regular_part) if d.regular_part is not None else None,
            "anisotropy": isotropy(d.anisotropy),
            "certificates": [certificate(c) for c in d.certificates],
            "verdict": d.verdict}


def parse_decomposition(d) -> WittDecomposition:
    pairs = tuple(HyperbolicPair(_int_tuple(p["x"]), _int_tuple(p["y"]),
                                 parse_certificate(p["certificate"]) if p["certificate"] else None)
                  for p in d["hyperbolic_pairs"])
    reg = parse_subspace(d["regular_part"]) if d.get("regular_part") else None
    return WittDecomposition(parse_subspace(d["radical"]), pairs, parse_subspace(d["anisotropic"]),
                             tuple(parse_certificate(c) for c in d["certificates"]), reg,
                             parse_isotropy(d.get("anisotropy")))


def reflection(r: Reflection) -> dict:
    return {"mirror": vec(r.mirror), "matrix": mat(r.matrix)}


def parse_reflection(d) -> Reflection:
    return Reflection(_int_tuple(d["mirror"]), parse_mat(d["matrix"]))


def factorization(f: FactorizationResult) -> dict:
    return {"length": f.length, "verified": f.verified,
            "reflections": [reflection(r) for r in f.reflections],
            "certificates": [certificate(c) for c in f.certificates]}


def parse_factorization(d) -> FactorizationResult:
    return FactorizationResult(tuple(parse_reflection(r) for r in d["reflections"]), d["verified"],
                               tuple(parse_certificate(c) for c in d["certificates"]))


# -- instances ------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    n: int
    form: SymBilinearForm
    subspace: Subspace | None = None
    isometry: Isometry | None = None
    vector: tuple | None = None

    def space(self) -> BilinearSpace:
        return BilinearSpace(self.subspace or Subspace.full(self.n), self.form)


def instance(spec: InstanceSpec) -> dict:
    out = {"n": spec.n, "form": form(spec.form)}
    if spec.subspace is not None:
        out["subspace"] = subspace(spec.subspace)
    if spec.isometry is not None:
        out["isometry"] = mat(spec.isometry.matrix)
    if spec.vector is not None:
        out["vector"] = vec(spec.vector)
    return out


def parse_instance(d) -> InstanceSpec:
    if not isinstance(d, dict) or "form" not in d:
        raise MalformedInput("an instance is an object with at least a \"form\" entry")
    f = parse_form(d["form"])
    n = d.get("n", f.n)
    if n != f.n:
        raise MalformedInput(f"n = {n} but the form is {f.n} x {f.n}")
    z = parse_subspace(d["subspace"], n) if d.get("subspace") is not None else None
    if z is not None and z.ambient_dim != n:
        raise MalformedInput("subspace lives in the wrong ambient dimension")
    iso = None
    if d.get("isometry") is not None:
        a = parse_mat(d["isometry"])
        if len(a) != n or len(a[0]) != n:
            raise MalformedInput(f"isometry must be {n} x {n}")
        iso = Isometry(a)
    v = parse_vec(d["vector"]) if d.get("vector") is not None else None
    if v is not None and len(v) != n:
        raise MalformedInput(f"vector must have length {n}")
    return InstanceSpec(n, f, z, iso, v)


_ENCODERS = [
    (InstanceSpec, "instance", instance),
    (WittDecomposition, "witt_decomposition", decomposition),
    (FactorizationResult, "factorization", factorization),
    (Reflection, "reflection", reflection),
    (BoundCertificate, "certificate", certificate),
    (BoundVal, "bound", bound),
    (IsotropyOutcome, "isotropy", isotropy),
    (BilinearSpace, "bilinear_space", space),
    (SymBilinearForm, "form", form),
    (Subspace, "subspace", subspace),
    (Isometry, "isometry", lambda i: mat(i.matrix)),
    (Monomial, "monomial", monomial),
    (Fraction, "rational", rat),
]

_DECODERS = {
    "instance": parse_instance,
    "witt_decomposition": parse_decomposition,
    "factorization": parse_factorization,
    "reflection": parse_reflection,
    "certificate": parse_certificate,
    "bound": parse_bound,
    "isotropy": parse_isotropy,
    "bilinear_space": parse_space,
    "form": parse_form,
    "subspace": parse_subspace,
    "isometry": lambda m: Isometry(parse_mat(m)),
    "monomial": parse_monomial,
    "rational": parse_rat,
}


def to_json(obj) -> dict:
    """Tagged JSON-ready encoding of any domain object."""
    for cls, tag, enc in _ENCODERS:
        if isinstance(obj, cls):
            return {"type": tag, "value": enc(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(d):
    try:
        dec = _DECODERS[d["type"]]
    except (KeyError, TypeError) as exc:
        raise MalformedInput("expected an object with a known \"type\" tag") from exc
    return dec(d["value"])


def serialize(obj) -> str:
    return dumps(to_json(obj))


def parse(text: str):
    return from_json(json.loads(text))


def dumps(data) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

"""Witt decomposition ``Z = radical + H_1 + ... + H_M + V`` with height certificates.

Hyperbolic planes are split off one at a time: find an isotropic vector of
the current regular space, complete it to a hyperbolic pair, and continue in
the orthogonal complement of the plane.  What is left is anisotropic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bilinear_space import (BilinearSpace, IsotropyOutcome, find_isotropic, make_hyperbolic_pair,
                             orthogonal_complement, radical_certificate, regular_split)
from .exact_linalg import Subspace, dot, rank
from .heights import (BoundCertificate, DEFAULT_PRECISION, certify, subspace_height_sq,
                      worst_verdict)


@dataclass(frozen=True)
class HyperbolicPair:
    x: tuple
    y: tuple
    certificate: BoundCertificate | None = None

    @property
    def plane(self) -> Subspace:
        return Subspace.span([self.x, self.y])


@dataclass(frozen=True)
class WittDecomposition:
    radical: Subspace
    planes: tuple[HyperbolicPair, ...]
    anisotropic: Subspace
    certificates: tuple[BoundCertificate, ...]
    regular_part: Subspace | None = None
    anisotropy: IsotropyOutcome | None = None

    @property
    def witt_index(self) -> int:
        return len(self.planes)

    @property
    def verdict(self) -> str:
        return worst_verdict(self.certificates)

    def component_bases(self) -> list[list[tuple]]:
        """Bases in order: radical, each plane (x, y), anisotropic part."""
        out = [list(self.radical.basis)]
        out += [[p.x, p.y] for p in self.planes]
        out.append(list(self.anisotropic.basis))
        return out


def _height_params(s: BilinearSpace, m: int) -> dict:
    return {"N": s.N, "L": s.L, "M": m, "r": s.rank_r,
            "H_F_sq": s.height_sq_f, "H_Z_sq": s.height_sq_z}


def witt_decompose(s: BilinearSpace, strategy: str = "hybrid", max_nodes: int | None = None,
                   digits: int = DEFAULT_PRECISION) -> WittDecomposition:
    """Witt decomposition of (Z, F) with a certificate for every component."""
    if s.L < 1:
        raise ValueError("witt_decompose needs dim Z >= 1")
    split = regular_split(s, digits)
    rad = split.radical
    certs = [radical_certificate(s, rad, digits, note="radical")]
    pairs = []
    current = split.w
    last = None
    while current.dim >= 1:
        sub = s.restrict(current)
        last = find_isotropic(sub, strategy=strategy, max_nodes=max_nodes, digits=digits)
        if not last.isotropic:
            break
        x, y = make_hyperbolic_pair(sub, last.witness)
        pairs.append((x, y))
        current = orthogonal_complement(sub, [x, y])
    v = current
    m = len(pairs)

    params = _height_params(s, m)
    if s.rank_r < s.L:
        certs.append(certify("regular-3", subspace_height_sq(split.w), params, digits,
                             note="regular part"))
    out_pairs = []
    if m >= 1:
        for k, (x, y) in enumerate(pairs, 1):
            plane = Subspace.span([x, y])
            c = certify("witt-height", subspace_height_sq(plane), params, digits, note=f"plane {k}")
            certs.append(c)
            out_pairs.append(HyperbolicPair(x, y, c))
        certs.append(certify("witt-height", subspace_height_sq(v), params, digits,
                             note="anisotropic part"))
    else:
        # without hyperbolic planes V is the regular part itself
        certs.append(certify("regular-3", subspace_height_sq(v), params, digits,
                             note="anisotropic part"))
    return WittDecomposition(rad, tuple(out_pairs), v, tuple(certs), split.w, last)


def witt_index(s: BilinearSpace, **kw) -> int:
    return witt_decompose(s, **kw).witt_index


def max_totally_isotropic(s: BilinearSpace, decomposition: WittDecomposition | None = None,
                          digits: int = DEFAULT_PRECISION) -> tuple[Subspace, BoundCertificate]:
    """Span of the isotropic halves of the hyperbolic pairs, with its certificate."""
    if not s.regular:
        raise ValueError("max_totally_isotropic needs a regular space; split off the radical first")
    d = decomposition or witt_decompose(s, digits=digits)
    xs = [p.x for p in d.planes]
    w = Subspace.span(xs, s.N) if xs else Subspace.zero(s.N)
    m = len(xs)
    cert = certify("vaaler-1", subspace_height_sq(w), _height_params(s, m), digits)
    return w, cert


# -- independent verification -------------------------------------------------

@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append({"check": name, "status": "pass" if ok else "fail", "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c["status"] != "pass"]


def verify_decomposition(d: WittDecomposition, s: BilinearSpace, strategy: str = "hybrid",
                         max_nodes: int | None = None, digits: int = DEFAULT_PRECISION) -> Report:
    """Re-check every structural claim and certificate of ``d`` from scratch."""
    rep = Report()
    f = s.form
    blocks = d.component_bases()
    flat = [v for b in blocks for v in b]

    rep.add("dimension-sum", d.radical.dim + 2 * d.witt_index + d.anisotropic.dim == s.L,
            f"{d.radical.dim} + 2*{d.witt_index} + {d.anisotropic.dim} vs L = {s.L}")
    rep.add("components-in-Z", all(s.contains(v) for v in flat))
    rep.add("span-equals-Z", (rank(flat) if flat else 0) == s.L)

    ortho = True
    for i, bi in enumerate(blocks):
        for bj in blocks[i + 1:]:
            if any(f(u, w) != 0 for u in bi for w in bj):
                ortho = False
    rep.add("pairwise-orthogonal", ortho)

    rad_ok = all(dot(f.apply(r), z) == 0 for r in d.radical.basis for z in s.z.basis)
    rep.add("radical-singular", rad_ok)
    rep.add("radical-dimension", d.radical.dim == s.L - s.rank_r)

    for k, p in enumerate(d.planes):
        ok = f(p.x) == 0 and f(p.y) == 0 and f(p.x, p.y) == 1
        rep.add(f"hyperbolic-pair-{k + 1}", ok,
                f"F(x)={f(p.x)}, F(y)={f(p.y)}, F(x,y)={f(p.x, p.y)}")

    if d.anisotropic.dim:
        sub = s.restrict(d.anisotropic)
        regular = sub.regular
        rep.add("anisotropic-regular", regular)
        if regular:
            o = find_isotropic(sub, strategy=strategy, max_nodes=max_nodes, digits=digits)
            rep.add("anisotropic", not o.isotropic,
                    f"isotropic vector {o.witness}" if o.isotropic else o.method)
        else:
            rep.add("anisotropic", False, "anisotropic part is singular")

    components = {"radical": d.radical, "anisotropic part": d.anisotropic,
                  "regular part": d.regular_part}
    for k, p in enumerate(d.planes, 1):
        components[f"plane {k}"] = p.plane
    params = _height_params(s, d.witt_index)
    for c in d.certificates:
        comp = components.get(c.note)
        if comp is None:
            rep.add(f"certificate {c.inequality_id} ({c.note})", False, "unknown component")
            continue
        lhs = subspace_height_sq(comp)
        again = certify(c.inequality_id, lhs, params, digits)
        rep.add(f"certificate {c.inequality_id} ({c.note})",
                again.verdict == "pass" and lhs == c.lhs,
                f"lhs={lhs} verdict={again.verdict}")
    return rep

"""Batch verification: random instances pushed through independent checks.

Each check draws its own instance from a ``random.Random`` and returns a list
of ``(name, status, detail)`` with status "pass", "fail" or "indeterminate".
A suite is a list of checks; ``run_suite`` runs ``count`` instances and
aggregates the outcome.  Instance i of a check always uses
``check_rng(check, seed, i)``, so results do not depend on scheduling.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import prod

from .bilinear_space import (BilinearSpace, find_isotropic, ortho_basis, radical_certificate,
                             regular_split, siegel_basis)
from .errors import BudgetExceeded
from .exact_linalg import (Subspace, det, duality_check, identity, intersect, kernel, mat_mul,
                           mat_vec, primitive, rank, subspace_sum)
from .generate import random_space, random_subspace
from .heights import (grassmann_height_sq, height_sq, inhom_height_sq, matrix_height_sq,
                      product_of_local_abs, subspace_height_sq)
from .isometry import (anis_certificate, cartan_dieudonne, det_on_z, find_cd_vector,
                       invariant_subspace, is_isometry, random_isometry, reflection,
                       reflection_height_cert, small_reflection)
from .local_global import is_isotropic
from .witt_engine import max_totally_isotropic, verify_decomposition, witt_decompose

STATUSES = ("pass", "fail", "indeterminate", "budget")


def _ok(name, ok, detail=""):
    return (name, "pass" if ok else "fail", detail)


def _cert(name, c):
    return (f"{name} [{c.inequality_id}]", c.verdict, f"lhs={c.lhs}")


def _rand_vec(rng, n, b=10, nonzero=True):
    while True:
        v = [rng.randint(-b, b) for _ in range(n)]
        if any(v) or not nonzero:
            return v


def _rand_rational(rng):
    while True:
        p = rng.randint(-10**6, 10**6)
        if p:
            return Fraction(p, rng.randint(1, 10**6))


def _unimodular(rng, n, steps=6):
    a = [list(r) for r in identity(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.randint(-3, 3)
            a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        if rng.random() < 0.3:
            a[i] = [-x for x in a[i]]
    return a


# -- heights ----------------------------------------------------------------------

def check_product_formula(rng):
    a = _rand_rational(rng)
    return [_ok("product formula", product_of_local_abs(a) == 1, f"a={a}")]


def check_height_basics(rng):
    n = rng.randint(1, 5)
    v = _rand_vec(rng, n)
    lam = _rand_rational(rng)
    u = random_subspace(rng, n, rng.randint(0, n))
    return [_ok("scaling invariance", height_sq(v) == height_sq([lam * x for x in v])),
            _ok("H(x) >= 1", height_sq(v) >= 1),
            _ok("h(x) >= H(x)", inhom_height_sq(v) >= height_sq(v)),
            _ok("H(U) >= 1", subspace_height_sq(u) >= 1)]


def check_sum_height(rng):
    n = rng.randint(1, 4)
    k = rng.randint(1, 4)
    xs = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)] for _ in range(k)]
    ms = _rand_vec(rng, k, 5)  # all m_i = 0 would give h(0)^2 = 1 > 0
    total = [sum(m * x[i] for m, x in zip(ms, xs)) for i in range(n)]
    lhs = inhom_height_sq(total)
    rhs = sum(m * m for m in ms) * prod(inhom_height_sq(x) for x in xs)
    return [_ok("sum inequality", lhs <= rhs, f"{lhs} <= {rhs}")]


def check_height_duality(rng):
    n = rng.randint(2, 5)
    rows = [_rand_vec(rng, n, 5) for _ in range(rng.randint(1, n - 1))]
    ker = kernel(rows)
    cons = Subspace.span(rows)
    return [_ok("height duality", subspace_height_sq(ker) == subspace_height_sq(cons),
                f"{subspace_height_sq(ker)} vs {subspace_height_sq(cons)}")]


def check_xf_height(rng):
    n = rng.randint(2, 4)
    j = rng.randint(1, n)
    xs = [_rand_vec(rng, n, 6) for _ in range(j)]
    f = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
    if not any(any(r) for r in f):
        f[0][0] = 1
    xf = [mat_vec(list(zip(*f)), x) for x in xs]
    lhs = grassmann_height_sq(xf)
    rhs = matrix_height_sq(f) ** j * prod(height_sq(x) for x in xs)
    return [_ok("XF Grassmann height", lhs <= rhs, f"{lhs} <= {rhs}")]


def check_product_height(rng):
    n = rng.randint(1, 4)
    a = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    b = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
    if not any(any(r) for r in a):
        a[0][0] = 1
    if not any(any(r) for r in b):
        b[0][0] = 1
    ab = mat_mul(a, b)
    if not any(any(r) for r in ab):
        return [_ok("product height", True, "AB = 0")]
    lhs, rhs = matrix_height_sq(ab), matrix_height_sq(a) * matrix_height_sq(b)
    return [_ok("product height", lhs <= rhs, f"{lhs} <= {rhs}")]


def check_unimodular_shift(rng):
    n = rng.randint(1, 4)
    a = _unimodular(rng, n)
    out = [_ok("det = +-1", abs(det(a)) == 1)]
    for sgn in (1, -1):
        b = [[a[i][j] + sgn * (i == j) for j in range(n)] for i in range(n)]
        if any(any(r) for r in b):
            lhs, rhs = matrix_height_sq(b), 4 * matrix_height_sq(a)
            out.append(_ok(f"H(A {'+' if sgn > 0 else '-'} I)", lhs <= rhs, f"{lhs} <= {rhs}"))
    return out


# -- linear algebra -------------------------------------------------------------------

def check_kernel_duality(rng):
    n = rng.randint(2, 5)
    rows = [_rand_vec(rng, n, 5) for _ in range(rng.randint(1, n - 1))]
    ker = kernel(rows)
    r = rank(rows)
    out = [_ok("kernel dimension", ker.dim == n - r),
           _ok("kernel annihilated", all(not any(mat_vec(rows, v)) for v in ker.basis))]
    if 0 < ker.dim < n:
        cons = Subspace.span(rows).basis
        out.append(_ok("Brill-Gordan duality", duality_check(ker.basis_matrix(), cons)))
    return out


def check_intersection(rng):
    n = rng.randint(2, 5)
    u = random_subspace(rng, n, rng.randint(1, n))
    v = random_subspace(rng, n, rng.randint(1, n))
    w = intersect(u, v)
    lhs, rhs = subspace_height_sq(w), subspace_height_sq(u) * subspace_height_sq(v)
    return [_ok("intersection height", lhs <= rhs, f"{lhs} <= {rhs}"),
            _ok("dimension formula", w.dim + subspace_sum(u, v).dim == u.dim + v.dim),
            _ok("intersection contained", u.contains_subspace(w) and v.contains_subspace(w))]


# -- bilinear spaces ---------------------------------------------------------------------

def _random_bilinear(rng, max_n=4, coeff_bound=10, regular=False):
    n = rng.randint(1, max_n)
    l = rng.choice([None] + list(range(1, n + 1)))
    return random_space(rng, n, l, coeff_bound, regular=regular)


def check_bilinear(rng):
    s = _random_bilinear(rng)
    basis, sc = siegel_basis(s.z)
    out = [_cert("siegel basis", sc), _ok("siegel basis spans Z", Subspace.span(basis, s.N) == s.z)]
    ob, oc = ortho_basis(s)
    gram = [[s.form(x, y) for y in ob] for x in ob]
    out.append(_ok("orthogonal basis diagonal",
                   all(gram[i][j] == 0 for i in range(len(ob)) for j in range(len(ob)) if i != j)))
    out.append(_ok("orthogonal basis spans Z", Subspace.span(ob, s.N) == s.z))
    if oc is not None:
        out.append(_cert("orthogonal basis", oc))
    split = regular_split(s)
    out.append(_cert("radical", radical_certificate(s, split.radical)))
    out += [_cert("regular split", c) for c in split.certificates]
    if s.regular and s.L >= 2:
        o = find_isotropic(s)
        out.append(_ok("isotropy matches local-global", o.isotropic == is_isotropic(s.gram)))
        if o.isotropic:
            out.append(_ok("witness isotropic", s.form(o.witness) == 0 and s.contains(o.witness)))
    return out


# -- Witt decomposition -------------------------------------------------------------------

def witt_checks(s: BilinearSpace, max_nodes=None):
    d = witt_decompose(s, max_nodes=max_nodes)
    rep = verify_decomposition(d, s, max_nodes=max_nodes)
    out = [(c["check"], c["status"], c["detail"]) for c in rep.checks]
    out += [_cert(f"component {c.note}", c) for c in d.certificates]
    if s.regular:
        _, c = max_totally_isotropic(s, d)
        out.append(_cert("maximal totally isotropic", c))
    return out


def check_witt(rng):
    return witt_checks(_random_bilinear(rng))


# -- isometries ------------------------------------------------------------------------------

def factor_checks(s: BilinearSpace, sigma, k: int):
    res = cartan_dieudonne(s, sigma)
    out = [_ok("factorization verified", res.verified),
           _ok("length <= 2L - 1", res.length <= max(2 * s.L - 1, 0), f"l={res.length}, L={s.L}"),
           _ok("det on Z", det_on_z(s, sigma.matrix) == (-1) ** k)]
    out += [_cert(f"reflection {i + 1}", c) for i, c in enumerate(res.certificates)]
    return out


def check_isometry(rng):
    s = _random_bilinear(rng, regular=True)
    k = rng.randint(0, 2 * s.L - 1)
    sigma = random_isometry(s, k, rng.randrange(2**32))
    out = [_ok("random isometry preserves F", is_isometry(s, sigma.matrix))]
    out += factor_checks(s, sigma, k)
    return out


def check_reflection(rng):
    s = _random_bilinear(rng, regular=True)
    basis = siegel_basis(s.z)[0]
    while True:
        cs = [rng.randint(-3, 3) for _ in basis]
        y = [sum(c * b[i] for c, b in zip(cs, basis)) for i in range(s.N)]
        if any(y) and s.form(y) != 0:
            break
    r = reflection(s, y)
    n = s.N
    inv = mat_mul(r.matrix, r.matrix) == identity(n)
    hyper = kernel([primitive(s.form.apply(r.mirror))])
    fixed = all(tuple(r(v)) == tuple(Fraction(a) for a in v) for v in intersect(hyper, s.z).basis)
    return [_ok("reflection involution", inv), _ok("reflection fixes hyperplane", fixed),
            _ok("reflection is an isometry", is_isometry(s, r.matrix)),
            _cert("reflection height", reflection_height_cert(r, s))]


def check_small_reflection(rng):
    s = _random_bilinear(rng, regular=True)
    r, c = small_reflection(s)
    y, _ = find_cd_vector(s, identity(s.N))
    return [_cert("small reflection", c), _cert("anisotropic vector", anis_certificate(s, y)),
            _ok("small reflection is an isometry", is_isometry(s, r.matrix))]


def check_invariant_subspace(rng):
    s = _random_bilinear(rng, regular=True)
    k = rng.randint(0, 2 * s.L - 1)
    sigma = random_isometry(s, k, rng.randrange(2**32))
    u, c = invariant_subspace(s, sigma)
    fixed = all(tuple(sigma(v)) == tuple(Fraction(a) for a in v) for v in u.basis)
    return [_cert("invariant subspace", c), _ok("invariant subspace fixed", fixed)]


CHECKS = {
    "product-formula": check_product_formula,
    "height-basics": check_height_basics,
    "sum-height": check_sum_height,
    "height-duality": check_height_duality,
    "xf-height": check_xf_height,
    "product-height": check_product_height,
    "unimodular-shift": check_unimodular_shift,
    "kernel-duality": check_kernel_duality,
    "intersection": check_intersection,
    "bilinear": check_bilinear,
    "witt": check_witt,
    "isometry": check_isometry,
    "reflection": check_reflection,
    "small-reflection": check_small_reflection,
    "invariant-subspace": check_invariant_subspace,
}

SUITES = {
    "heights": ["product-formula", "height-basics", "sum-height", "height-duality", "xf-height",
                "product-height", "unimodular-shift"],
    "linalg": ["kernel-duality", "intersection"],
    "bilinear": ["bilinear"],
    "witt": ["witt"],
    "isometry": ["isometry", "reflection", "small-reflection", "invariant-subspace"],
}
SUITES["all"] = [c for name in ("heights", "linalg", "bilinear", "witt", "isometry")
                 for c in SUITES[name]]


def check_rng(name: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{index}")


def _status(checks) -> str:
    statuses = {st for _, st, _ in checks}
    for st in ("fail", "budget", "indeterminate"):
        if st in statuses:
            return st
    return "pass"


def run_instance(suite: str, seed: int, index: int, max_nodes=None) -> dict:
    """All checks of ``suite`` on instance ``index``; exceptions become failures."""
    checks = []
    for name in SUITES[suite]:
        # one stream per (check, instance): results do not depend on suite membership
        rng = check_rng(name, seed, index)
        try:
            if name == "witt" and max_nodes is not None:
                res = witt_checks(_random_bilinear(rng), max_nodes)
            else:
                res = CHECKS[name](rng)
        except BudgetExceeded as exc:
            res = [(name, "budget", str(exc))]
        except Exception as exc:  # noqa: BLE001 - any crash is a failed instance
            res = [(name, "fail", f"{type(exc).__name__}: {exc}")]
        checks += [{"check": f"{name}: {c}", "status": st, "detail": str(d)} for c, st, d in res]
    return {"index": index, "status": _status([(c["check"], c["status"], "") for c in checks]),
            "checks": checks}


def _run_one(args):
    return run_instance(*args)


def run_suite(suite: str, count: int, seed: int, workers: int = 1, max_nodes=None) -> dict:
    if suite not in SUITES:
        raise KeyError(suite)
    jobs = [(suite, seed, i, max_nodes) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            instances = list(ex.map(_run_one, jobs))
    else:
        instances = [_run_one(j) for j in jobs]
    summary = {st: sum(1 for r in instances if r["status"] == st) for st in STATUSES}
    return {"suite": suite, "seed": seed, "count": count, "summary": summary,
            "instances": instances}


def run_check(name: str, count: int, seed: int) -> tuple[int, list]:
    """Run one check ``count`` times; returns (number of bad instances, their reports)."""
    bad = []
    for i in range(count):
        try:
            res = CHECKS[name](check_rng(name, seed, i))
        except Exception as exc:  # noqa: BLE001
            res = [(name, "fail", f"{type(exc).__name__}: {exc}")]
        if _status(res) != "pass":
            bad.append((i, [r for r in res if r[1] != "pass"]))
    return len(bad), bad

"""Seeded random instances.

Every generator takes an explicit ``random.Random``; ``instance_rng`` derives
the generator for instance ``index`` of a batch from the batch seed, so a
batch can be reproduced (or split across workers) without shared state.
"""

from __future__ import annotations

import random

from .bilinear_space import BilinearSpace, SymBilinearForm
from .exact_linalg import Subspace, rank
from .isometry import random_isometry
from .serialize import InstanceSpec

KINDS = ("form", "subspace", "isometry")
MAX_TRIES = 1000


def instance_rng(seed: int, index: int = 0) -> random.Random:
    return random.Random(f"wittheight:{seed}:{index}")


def random_form(rng: random.Random, n: int, coeff_bound: int = 10) -> SymBilinearForm:
    """Symmetric integer form with entries in [-coeff_bound, coeff_bound], never zero."""
    if n < 1 or coeff_bound < 1:
        raise ValueError("need n >= 1 and coeff_bound >= 1")
    while True:
        a = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                a[i][j] = a[j][i] = rng.randint(-coeff_bound, coeff_bound)
        if any(any(r) for r in a):
            return SymBilinearForm(a)


def random_subspace(rng: random.Random, n: int, l: int, coeff_bound: int = 3) -> Subspace:
    """Span of l random integer vectors, redrawn until they are independent."""
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got l = {l}, n = {n}")
    if l == 0:
        return Subspace.zero(n)
    for _ in range(MAX_TRIES):
        rows = [[rng.randint(-coeff_bound, coeff_bound) for _ in range(n)] for _ in range(l)]
        if rank(rows) == l:
            return Subspace.span(rows, n)
    raise RuntimeError("could not draw independent vectors")


def random_space(rng: random.Random, n: int, l: int | None = None, coeff_bound: int = 10,
                 regular: bool = False) -> BilinearSpace:
    """Random (Z, F); ``l = None`` or ``l = n`` means Z = Q^n."""
    for _ in range(MAX_TRIES):
        f = random_form(rng, n, coeff_bound)
        z = Subspace.full(n) if l is None or l == n else random_subspace(rng, n, l)
        s = BilinearSpace(z, f)
        if not regular or s.regular:
            return s
    raise RuntimeError("could not draw a regular space")


def gen_instance(kind: str, n: int, seed: int, l: int | None = None, coeff_bound: int = 10,
                 k: int = 1, index: int = 0) -> InstanceSpec:
    """One deterministic instance of the requested kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if n < 1:
        raise ValueError("n must be positive")
    if l is not None and not 1 <= l <= n:
        raise ValueError(f"need 1 <= l <= n, got l = {l}, n = {n}")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be positive")
    rng = instance_rng(seed, index)
    if kind == "form":
        return InstanceSpec(n, random_form(rng, n, coeff_bound))
    if kind == "subspace":
        s = random_space(rng, n, l if l is not None else rng.randint(1, n), coeff_bound)
        return InstanceSpec(n, s.form, s.z)
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = random_space(rng, n, l, coeff_bound, regular=True)
    sigma = random_isometry(s, k, rng.randrange(2**32))
    return InstanceSpec(n, s.form, s.z if s.L < n else None, sigma)

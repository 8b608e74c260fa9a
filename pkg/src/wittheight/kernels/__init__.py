"""Lattice enumeration kernels.

The compiled extension ``_cenum`` is used when it was built and the problem
fits in 64-bit integers; otherwise the pure-Python module ``_pyenum`` runs.
Set ``WITTHEIGHT_PURE_PYTHON=1`` to force the fallback at import time.
"""

from __future__ import annotations

import importlib
import os
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

from . import _pyenum

_cenum = None
if not os.environ.get("WITTHEIGHT_PURE_PYTHON"):
    try:
        _cenum = importlib.import_module("._cenum", __name__)
    except ImportError:  # extension not built
        _cenum = None

BACKEND = "cython" if _cenum is not None else "python"
AVAILABLE = ("cython", "python") if _cenum is not None else ("python",)

DEFAULT_MAX_NODES = 5_000_000
_INT64_SAFE = 1 << 61


class EnumResult(NamedTuple):
    points: list
    nodes: int
    complete: bool
    backend: str


def gso_floats(gram):
    """Gram-Schmidt coefficients of a positive definite Gram matrix.

    Computed exactly, then rounded once to floats: returns ``(mu, q)`` with
    ``x^T G x = sum_j q[j] * (x[j] + sum_{i>j} mu[i][j] x[i])**2``.
    """
    n = len(gram)
    mu = [[Fraction(0)] * n for _ in range(n)]
    q = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = Fraction(gram[i][j]) - sum(mu[j][k] * mu[i][k] * q[k] for k in range(j))
            mu[i][j] = s / q[j]
        q[i] = gram[i][i] - sum(mu[i][k] ** 2 * q[k] for k in range(i))
        if q[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    return [[float(a) for a in row] for row in mu], [float(a) for a in q], q


def _inverse_diagonal(gram):
    n = len(gram)
    aug = [[Fraction(a) for a in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(gram)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [a * inv for a in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [aug[i][n + i] for i in range(n)]


def _coordinate_bound(gram, bound):
    """Upper bound on max |x_i| over the ellipsoid x^T G x <= bound."""
    # |x_i| <= sqrt(bound * (G^-1)_ii); +2 covers the pruning slack
    worst = max(_inverse_diagonal(gram))
    return isqrt(int(bound * worst) + 1) + 2


def _fits_int64(gram, form, q_exact, bound):
    n = len(gram)
    s = n * _coordinate_bound(gram, bound)
    gmax = max(abs(a) for row in gram for a in row)
    if s * s * max(gmax, 1) >= _INT64_SAFE:
        return False
    if form is not None:
        fmax = max(abs(a) for row in form for a in row)
        if s * s * max(fmax, 1) * max(fmax, 1) >= _INT64_SAFE:
            return False
    return bound < _INT64_SAFE


def _pick(backend, gram, form, q_exact, bound):
    if backend is None:
        backend = BACKEND
    if backend not in AVAILABLE:
        raise ValueError(f"backend {backend!r} is not available (have {AVAILABLE})")
    if backend == "cython" and not _fits_int64(gram, form, q_exact, bound):
        return "python"
    return backend


def enum_points(gram, bound: int, max_nodes: int | None = None, backend: str | None = None) -> EnumResult:
    """All nonzero integer x with ``x^T gram x <= bound`` (both signs)."""
    gram = [[int(a) for a in row] for row in gram]
    bound = int(bound)
    if max_nodes is None:
        max_nodes = DEFAULT_MAX_NODES
    if bound < 1:
        return EnumResult([], 0, True, backend or BACKEND)
    mu, q, q_exact = gso_floats(gram)
    which = _pick(backend, gram, None, q_exact, bound)
    mod = _cenum if which == "cython" else _pyenum
    pts, nodes, complete = mod.enum_points(gram, mu, q, bound, max_nodes)
    return EnumResult(pts, nodes, complete, which)


def find_zeros(gram, form, bound: int, max_nodes: int | None = None,
               backend: str | None = None) -> EnumResult:
    """Nonzero x with ``x^T gram x <= bound`` and ``x^T form x == 0``."""
    gram = [[int(a) for a in row] for row in gram]
    form = [[int(a) for a in row] for row in form]
    bound = int(bound)
    if max_nodes is None:
        max_nodes = DEFAULT_MAX_NODES
    if bound < 1:
        return EnumResult([], 0, True, backend or BACKEND)
    mu, q, q_exact = gso_floats(gram)
    which = _pick(backend, gram, form, q_exact, bound)
    mod = _cenum if which == "cython" else _pyenum
    pts, nodes, complete = mod.find_zeros(gram, form, mu, q, bound, max_nodes)
    return EnumResult(pts, nodes, complete, which)

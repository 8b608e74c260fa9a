"""Pure-Python Fincke-Pohst kernels.

Both functions walk the enumeration tree of the positive definite integer
Gram matrix ``gram`` using floating Gram-Schmidt data (``mu``, ``q``) for
pruning, widened by a small slack, and confirm every leaf with exact integer
arithmetic.  The compiled module ``_cenum`` implements the same walk.
"""

from math import ceil, floor, isqrt, sqrt


class _Stop(Exception):
    pass


def _qf(m, x):
    n = len(x)
    total = 0
    for i in range(n):
        xi = x[i]
        if xi:
            row = m[i]
            s = 0
            for j in range(n):
                if x[j]:
                    s += row[j] * x[j]
            total += xi * s
    return total


def _level_range(k, n, mu, q, x, partial, bound, tol):
    ctr = 0.0
    for i in range(k + 1, n):
        if x[i]:
            ctr -= mu[i][k] * x[i]
    rem = bound - partial
    if rem < -tol:
        return ctr, 1, 0
    r = sqrt(max(rem, 0.0) / q[k])
    eps = 1e-7 * (1.0 + abs(ctr) + r)
    return ctr, ceil(ctr - r - eps), floor(ctr + r + eps)


def enum_points(gram, mu, q, bound, max_nodes):
    """Nonzero x with x^T gram x <= bound; returns (points, nodes, complete)."""
    n = len(gram)
    x = [0] * n
    out = []
    nodes = 0
    tol = 1e-9 * (1.0 + bound)

    def walk(k, partial):
        nonlocal nodes
        ctr, lo, hi = _level_range(k, n, mu, q, x, partial, bound, tol)
        for t in range(lo, hi + 1):
            nodes += 1
            if nodes > max_nodes:
                raise _Stop
            x[k] = t
            if k == 0:
                if any(x) and _qf(gram, x) <= bound:
                    out.append(tuple(x))
            else:
                d = t - ctr
                walk(k - 1, partial + q[k] * d * d)
        x[k] = 0

    try:
        walk(n - 1, 0.0)
    except _Stop:
        return out, nodes, False
    return out, nodes, True


def _roots(a, b, c):
    """Integer roots t of a t^2 + 2 b t + c = 0; None means 'every t'."""
    if a:
        disc = b * b - a * c
        if disc < 0:
            return ()
        s = isqrt(disc)
        if s * s != disc:
            return ()
        out = []
        for num in {-b + s, -b - s}:
            if num % a == 0:
                out.append(num // a)
        return sorted(out)
    if b:
        if c % (2 * b) == 0:
            return (-c // (2 * b),)
        return ()
    return None if c == 0 else ()


def find_zeros(gram, form, mu, q, bound, max_nodes):
    """Nonzero x with x^T gram x <= bound and x^T form x == 0.

    The innermost coordinate is solved for exactly instead of enumerated.
    """
    n = len(gram)
    x = [0] * n
    out = []
    nodes = 0
    tol = 1e-9 * (1.0 + bound)

    def leaf(lo, hi):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise _Stop
        a = form[0][0]
        b = 0
        for j in range(1, n):
            if x[j]:
                b += form[0][j] * x[j]
        c = 0
        for i in range(1, n):
            if x[i]:
                s = 0
                for j in range(1, n):
                    if x[j]:
                        s += form[i][j] * x[j]
                c += x[i] * s
        roots = _roots(a, b, c)
        if roots is None:
            roots = range(lo, hi + 1)
            nodes += max(hi - lo, 0)
            if nodes > max_nodes:
                raise _Stop
        for t in roots:
            if lo <= t <= hi:
                x[0] = t
                if any(x) and _qf(gram, x) <= bound:
                    out.append(tuple(x))
        x[0] = 0

    def walk(k, partial):
        nonlocal nodes
        ctr, lo, hi = _level_range(k, n, mu, q, x, partial, bound, tol)
        if k == 0:
            if lo <= hi:
                leaf(lo, hi)
            return
        for t in range(lo, hi + 1):
            nodes += 1
            if nodes > max_nodes:
                raise _Stop
            x[k] = t
            d = t - ctr
            walk(k - 1, partial + q[k] * d * d)
        x[k] = 0

    try:
        walk(n - 1, 0.0)
    except _Stop:
        return out, nodes, False
    return out, nodes, True

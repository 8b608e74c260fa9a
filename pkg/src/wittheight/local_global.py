"""Isotropy of quadratic forms over Q via Hilbert symbols.

A nondegenerate form is diagonalized over Q, its coefficients reduced to
squarefree integers, and the Hasse-Minkowski conditions are checked at the
real place, at 2 and at every prime dividing a coefficient (all other primes
impose no condition).
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt, prod

from sympy import factorint

from .exact_linalg import frac


def diagonalize(gram) -> list[Fraction]:
    """Diagonal entries of a form congruent to ``gram`` over Q (zeros for the radical)."""
    a = [[frac(x) for x in row] for row in gram]
    n = len(a)
    out = []
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                out.extend([Fraction(0)] * (n - k))
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 a_ij != 0
            for c in range(n):
                a[i][c] += a[j][c]
            for r in range(n):
                a[r][i] += a[r][j]
            piv = i
        a[k], a[piv] = a[piv], a[k]
        for row in a:
            row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        out.append(p)
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
            a[i][k] = Fraction(0)
        k += 1
    return out


def squarefree_part(q) -> int:
    """The squarefree integer in the square class of the nonzero rational q."""
    q = frac(q)
    if q == 0:
        raise ValueError("zero has no square class")
    m = q.numerator * q.denominator
    sign = -1 if m < 0 else 1
    out = 1
    for p, e in factorint(abs(m)).items():
        if e % 2:
            out *= p
    return sign * out


def _valuation(a: int, p: int) -> tuple[int, int]:
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k, a


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """``(a, b)_p`` for nonzero integers; ``p = -1`` means the real place."""
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _valuation(a, p)
    beta, v = _valuation(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    e = alpha * beta * ((p - 1) // 2)
    s = -1 if e % 2 else 1
    return s * _legendre(u, p) ** beta * _legendre(v, p) ** alpha


def is_square_in_qp(a: int, p: int) -> bool:
    """Whether the nonzero integer a is a square in Q_p (p = -1: in R)."""
    if p == -1:
        return a > 0
    k, u = _valuation(a, p)
    if k % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _legendre(u, p) == 1


def _is_rational_square(a: int) -> bool:
    return a >= 0 and isqrt(a) ** 2 == a


def _locally_isotropic(coeffs: list[int], p: int) -> bool:
    n = len(coeffs)
    d = prod(coeffs)
    eps = 1
    for i in range(n):
        for j in range(i + 1, n):
            eps *= hilbert_symbol(coeffs[i], coeffs[j], p)
    if n == 2:
        return is_square_in_qp(-d, p)
    if n == 3:
        return hilbert_symbol(-1, -d, p) == eps
    if n == 4:
        return (not is_square_in_qp(d, p)) or eps == hilbert_symbol(-1, -1, p)
    return True


def is_isotropic_diagonal(coeffs) -> bool:
    """Isotropy over Q of the form sum a_i x_i^2 (all a_i nonzero)."""
    a = [squarefree_part(c) for c in coeffs]
    n = len(a)
    if n <= 1:
        return False
    if all(c > 0 for c in a) or all(c < 0 for c in a):
        return False
    if n == 2:
        return _is_rational_square(-a[0] * a[1])
    if n >= 5:
        return True
    primes = {2}
    for c in a:
        primes |= set(factorint(abs(c)))
    primes.discard(1)
    return all(_locally_isotropic(a, p) for p in sorted(primes))


def is_isotropic(gram) -> bool:
    """Whether the quadratic form with Gram matrix ``gram`` has a nonzero rational zero."""
    diag = diagonalize(gram)
    if any(c == 0 for c in diag):
        return True
    return is_isotropic_diagonal(diag)

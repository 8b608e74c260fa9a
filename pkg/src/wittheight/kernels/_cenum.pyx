# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fincke-Pohst kernels (int64 coordinates, double pruning).

Same tree walk and leaf checks as ``_pyenum``; the dispatcher only routes a
problem here after checking that every exact quantity fits in int64.
"""

from libc.math cimport sqrt, floor, ceil, fabs

cdef enum:
    MAXD = 32


cdef inline long long _isqrt(long long v):
    cdef long long s
    if v < 0:
        return -1
    s = <long long> sqrt(<double> v)
    while s > 0 and s * s > v:
        s -= 1
    while (s + 1) * (s + 1) <= v:
        s += 1
    return s


cdef inline long long _floordiv(long long a, long long b):
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef class _Walk:
    cdef int n
    cdef long long G[MAXD * MAXD]
    cdef long long Q[MAXD * MAXD]
    cdef double M[MAXD * MAXD]
    cdef double q[MAXD]
    cdef double ctr[MAXD]
    cdef double part[MAXD + 1]
    cdef long long x[MAXD]
    cdef long long lo[MAXD]
    cdef long long hi[MAXD]
    cdef long long bound
    cdef double fbound
    cdef double tol

    def __init__(self, list gram, list form, list mu, list qd, long long bound):
        cdef int i, j
        self.n = len(gram)
        if self.n < 1 or self.n > MAXD:
            raise ValueError("dimension out of range for the compiled kernel")
        for i in range(self.n):
            self.q[i] = qd[i]
            self.x[i] = 0
            for j in range(self.n):
                self.G[i * MAXD + j] = gram[i][j]
                self.M[i * MAXD + j] = mu[i][j]
                self.Q[i * MAXD + j] = form[i][j] if form is not None else 0
        self.bound = bound
        self.fbound = <double> bound
        self.tol = 1e-9 * (1.0 + self.fbound)

    cdef inline void _set_level(self, int k):
        cdef int i
        cdef double c = 0.0, rem, r, eps
        for i in range(k + 1, self.n):
            if self.x[i] != 0:
                c -= self.M[i * MAXD + k] * self.x[i]
        self.ctr[k] = c
        rem = self.fbound - self.part[k + 1]
        if rem < -self.tol:
            self.lo[k] = 1
            self.hi[k] = 0
        else:
            if rem < 0:
                rem = 0
            r = sqrt(rem / self.q[k])
            eps = 1e-7 * (1.0 + fabs(c) + r)
            self.lo[k] = <long long> ceil(c - r - eps)
            self.hi[k] = <long long> floor(c + r + eps)
        self.x[k] = self.lo[k] - 1

    cdef inline long long _norm(self):
        cdef int i, j
        cdef long long total = 0, s
        for i in range(self.n):
            if self.x[i] != 0:
                s = 0
                for j in range(self.n):
                    s += self.G[i * MAXD + j] * self.x[j]
                total += self.x[i] * s
        return total

    cdef inline bint _nonzero(self):
        cdef int i
        for i in range(self.n):
            if self.x[i] != 0:
                return True
        return False

    cdef tuple _point(self):
        return tuple([self.x[i] for i in range(self.n)])

    def points(self, long long max_nodes):
        cdef int k = self.n - 1
        cdef long long nodes = 0
        cdef double d
        out = []
        self.part[self.n] = 0.0
        self._set_level(k)
        while True:
            self.x[k] += 1
            if self.x[k] > self.hi[k]:
                self.x[k] = 0
                k += 1
                if k >= self.n:
                    break
                continue
            nodes += 1
            if nodes > max_nodes:
                return out, nodes, False
            if k == 0:
                if self._nonzero() and self._norm() <= self.bound:
                    out.append(self._point())
            else:
                d = self.x[k] - self.ctr[k]
                self.part[k] = self.part[k + 1] + self.q[k] * d * d
                k -= 1
                self._set_level(k)
        return out, nodes, True

    def zeros(self, long long max_nodes):
        cdef int k = self.n - 1
        cdef int i, j
        cdef long long nodes = 0
        cdef long long a, b, c, s, disc, num, t, lo0, hi0
        cdef long long cand[2]
        cdef int ncand
        cdef double d
        out = []
        self.part[self.n] = 0.0
        self._set_level(k)
        while True:
            if k == 0:
                lo0 = self.lo[0]
                hi0 = self.hi[0]
                if lo0 <= hi0:
                    nodes += 1
                    if nodes > max_nodes:
                        return out, nodes, False
                    a = self.Q[0]
                    b = 0
                    for j in range(1, self.n):
                        b += self.Q[j] * self.x[j]
                    c = 0
                    for i in range(1, self.n):
                        if self.x[i] != 0:
                            s = 0
                            for j in range(1, self.n):
                                s += self.Q[i * MAXD + j] * self.x[j]
                            c += self.x[i] * s
                    ncand = 0
                    if a != 0:
                        disc = b * b - a * c
                        if disc >= 0:
                            s = _isqrt(disc)
                            if s * s == disc:
                                num = -b + s
                                if num % a == 0:
                                    cand[ncand] = num / a
                                    ncand += 1
                                if s != 0:
                                    num = -b - s
                                    if num % a == 0:
                                        cand[ncand] = num / a
                                        ncand += 1
                    elif b != 0:
                        if c % (2 * b) == 0:
                            cand[0] = _floordiv(-c, 2 * b)
                            ncand = 1
                    elif c == 0:
                        nodes += hi0 - lo0
                        if nodes > max_nodes:
                            return out, nodes, False
                        t = lo0
                        while t <= hi0:
                            self.x[0] = t
                            if self._nonzero() and self._norm() <= self.bound:
                                out.append(self._point())
                            t += 1
                    for i in range(ncand):
                        t = cand[i]
                        if lo0 <= t <= hi0:
                            self.x[0] = t
                            if self._nonzero() and self._norm() <= self.bound:
                                out.append(self._point())
                self.x[0] = 0
                k = 1
                if k >= self.n:
                    break
                continue
            self.x[k] += 1
            if self.x[k] > self.hi[k]:
                self.x[k] = 0
                k += 1
                if k >= self.n:
                    break
                continue
            nodes += 1
            if nodes > max_nodes:
                return out, nodes, False
            d = self.x[k] - self.ctr[k]
            self.part[k] = self.part[k + 1] + self.q[k] * d * d
            k -= 1
            self._set_level(k)
        return out, nodes, True


def enum_points(list gram, list mu, list q, long long bound, long long max_nodes):
    return _Walk(gram, None, mu, q, bound).points(max_nodes)


def find_zeros(list gram, list form, list mu, list q, long long bound, long long max_nodes):
    return _Walk(gram, form, mu, q, bound).zeros(max_nodes)

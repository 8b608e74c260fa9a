import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittheight.errors import MissingParameter, UnknownBound, UnsupportedField
from wittheight.exact_linalg import Subspace, kernel
from wittheight.heights import (INEQUALITY_IDS, BoundVal, FieldData, Monomial, bound_expr, c_K,
                                certify, compare, grassmann_height_sq, height_sq,
                                inhom_height_sq, local_abs, matrix_height_sq, product_of_local_abs,
                                subspace_height_sq)

nonzero_rationals = st.fractions(min_value=-10**9, max_value=10**9, max_denominator=10**6).filter(bool)
int_vectors = st.lists(st.integers(-20, 20), min_size=1, max_size=5)


class TestExamples:
    def test_vector_heights(self):
        assert height_sq((3, 4)) == 25
        assert height_sq((Fraction(1, 2), Fraction(1, 3))) == 13
        assert height_sq((0, 0, 1)) == 1

    def test_inhomogeneous(self):
        assert inhom_height_sq((0, 0)) == 1
        assert inhom_height_sq((1, 1)) == 3
        assert inhom_height_sq((Fraction(1, 2),)) == 5

    def test_matrix(self):
        assert matrix_height_sq([[1, 0], [0, 1]]) == 2
        assert matrix_height_sq([[0, 1], [1, 0]]) == 2
        assert matrix_height_sq([[1, 2], [3, 4]]) == 30

    def test_subspace(self):
        assert subspace_height_sq(Subspace.span([(1, 0, 0), (0, 1, 0)])) == 1
        assert subspace_height_sq(Subspace.span([(1, 0, 1), (0, 1, 1)])) == 3
        assert subspace_height_sq(Subspace.full(4)) == 1
        assert subspace_height_sq(Subspace.zero(3)) == 1

    def test_zero_vector(self):
        assert height_sq((0, 0)) == 0

    def test_dependent_rows_have_no_grassmann_height(self):
        assert grassmann_height_sq([(1, 2), (2, 4)]) == 0


class TestFieldConstant:
    def test_c1_encloses_one(self):
        b = c_K(1)
        assert b.lo <= 1 <= b.hi

    def test_c2(self):
        b = c_K(2)
        ref = 2 / math.sqrt(math.pi)
        assert float(b.lo) <= ref + 1e-15 and ref - 1e-15 <= float(b.hi)
        assert b.hi - b.lo < Fraction(1, 10**60)

    @pytest.mark.parametrize("j", range(1, 12))
    @pytest.mark.parametrize("digits", [16, 64, 200])
    def test_valid_interval(self, j, digits):
        b = c_K(j, digits)
        assert b.lo <= b.hi
        with mpmath.workdps(digits + 20):
            ref = 2 / mpmath.sqrt(mpmath.pi) * mpmath.gamma(mpmath.mpf(j) / 2 + 1) ** (mpmath.mpf(1) / j)
            slack = mpmath.mpf(10) ** -(digits + 10)  # rounding of the oracle itself
            assert mpmath.mpf(b.lo.numerator) / b.lo.denominator <= ref + slack
            assert ref - slack <= mpmath.mpf(b.hi.numerator) / b.hi.denominator

    def test_other_fields_refused(self):
        with pytest.raises(UnsupportedField):
            FieldData(degree=2, discriminant_abs=5)


def _log_c_sq(j):
    return 2 * (math.log(2) - 0.5 * math.log(math.pi) + math.lgamma(j / 2 + 1) / j)


def _oracle_log(i, p):
    """Natural log of each squared bound, written straight from the formulas."""
    N, L, M, J, r = (p.get(k) for k in ("N", "L", "M", "J", "r"))
    lg = lambda k: math.log(p[k]) if p.get(k) else 0.0
    hf, hz, hu, hx, hs = lg("H_F_sq"), lg("H_Z_sq"), lg("H_U_sq"), lg("H_x_sq"), lg("H_sigma_sq")
    if i == "siegel-1":
        return J * math.log(N) + hu
    if i == "siegel-2":
        return (J * J + J - 2) / 2 * math.log(N) + J * (J + 1) / 2 * hf + J * hu
    if i == "vaaler-1":
        k = L - M
        return k * ((2 * M + 1) * math.log(2) + _log_c_sq(k)) + k / 2 * hf + hz if k else hz
    if i in ("regular-2", "sing-height"):
        return r * _log_c_sq(r) + r / 2 * hf + hz if r else hz
    if i == "regular-3":
        return L * math.log(N) + hz
    if i == "sing":
        return math.log(N) + 2 * r / (N - r) * (_log_c_sq(r) / 2) + r / (2 * (N - r)) * hf
    if i in ("witt-height", "witt-height-reg"):
        ne = M + 5 * L if i == "witt-height" else M + L
        a = L * ((2 * M + 1) * math.log(2) + _log_c_sq(L)) + ne * math.log(N)
        return M * (M + 3) / 4 * a + (M + 1) * (M + 2) / 2 * ((L + 2 * M) / 4 * hf + hz)
    if i == "ref-bound":
        return 2 * math.log(N ** 3 * (N + 2)) + hf + 2 * hx
    if i == "anis":
        return math.log(4 * L) + (L + 2) / 2 * math.log(N) + (L + 2) / (2 * L) * hz
    if i == "isom-bound":
        return (math.log(16 * L * L * (N + 2) ** 2) + (L + 8) * math.log(N) + hf
                + (L + 2) / L * hz)
    if i == "inv-height":
        return (N - J) * (math.log(4) + hs) + hz
    if i == "cd-me-1":
        return 5 ** (L - 1) * (L * L * math.log(2 * N * N) + L / 3 * hf + L / 2 * hz + hs)
    raise KeyError(i)


PARAM_SETS = [
    dict(N=2, J=2, L=2, M=1, r=1, H_U_sq=1, H_F_sq=2, H_Z_sq=1, H_x_sq=1, H_sigma_sq=2),
    dict(N=3, J=1, L=3, M=1, r=2, H_U_sq=6, H_F_sq=14, H_Z_sq=3, H_x_sq=5, H_sigma_sq=9),
    dict(N=4, J=3, L=4, M=2, r=3, H_U_sq=11, H_F_sq=Fraction(97), H_Z_sq=7, H_x_sq=2,
         H_sigma_sq=30),
    dict(N=5, J=2, L=3, M=0, r=4, H_U_sq=2, H_F_sq=300, H_Z_sq=19, H_x_sq=41, H_sigma_sq=5),
]


class TestBoundFormulas:
    def test_siegel_example(self):
        b = bound_expr("siegel-1", {"N": 2, "J": 2, "H_U_sq": 1})
        assert b.lo == b.hi == 4

    def test_ref_bound_example(self):
        b = bound_expr("ref-bound", {"N": 2, "H_F_sq": 4, "H_x_sq": 1})
        assert b.lo == b.hi == 4096

    def test_cd_base_case_finite(self):
        b = bound_expr("cd-me-1", {"N": 2, "L": 1, "H_F_sq": 1, "H_Z_sq": 1, "H_sigma_sq": 1})
        assert 0 < b.lo <= b.hi and b.hi < 10**6

    @pytest.mark.parametrize("params", PARAM_SETS)
    @pytest.mark.parametrize("ident", [i for i in INEQUALITY_IDS
                                       if i not in ("witt-plane", "isotropy-search")])
    def test_against_float_oracle(self, ident, params):
        if ident == "vaaler-1" and params["M"] > params["L"] // 2:
            pytest.skip("M cannot exceed L/2")
        if ident == "sing" and params["r"] >= params["N"]:
            pytest.skip("needs r < N")
        b = bound_expr(ident, params)
        want = _oracle_log(ident, params)
        got = float(mpmath.log(mpmath.mpf(b.hi.numerator) / b.hi.denominator))
        assert got == pytest.approx(want, rel=1e-9, abs=1e-9)
        assert b.lo <= b.hi

    def test_isotropy_search_is_max_over_m(self):
        p = dict(N=4, L=4, H_F_sq=10, H_Z_sq=1)
        b = bound_expr("isotropy-search", p)
        logs = []
        for m in (1, 2):
            k = 4 - m
            v = k * ((2 * m + 1) * math.log(2) + _log_c_sq(k)) + k / 2 * math.log(10)
            logs.append(math.log(4) + v / m)
        got = float(mpmath.log(mpmath.mpf(b.hi.numerator) / b.hi.denominator))
        assert got == pytest.approx(max(logs), rel=1e-12)

    def test_monotone_in_form_height(self):
        lo = bound_expr("isotropy-search", dict(N=3, L=3, H_F_sq=3, H_Z_sq=1))
        hi = bound_expr("isotropy-search", dict(N=3, L=3, H_F_sq=30, H_Z_sq=1))
        assert lo.hi < hi.lo

    def test_unknown_and_missing(self):
        with pytest.raises(UnknownBound):
            bound_expr("nope", {})
        with pytest.raises(MissingParameter):
            bound_expr("siegel-1", {"N": 2})


class TestCompare:
    def _iv(self, lo, hi):
        return BoundVal(Fraction(lo), Fraction(hi), 64)

    def test_pass(self):
        assert compare(25, self._iv(26, Fraction(261, 10))).verdict == "pass"

    def test_fail(self):
        assert compare(25, self._iv(24, Fraction(241, 10))).verdict == "fail"

    def test_indeterminate(self):
        assert compare(25, self._iv(Fraction(249, 10), Fraction(251, 10))).verdict == "indeterminate"

    def test_exact_tie_settles(self):
        c = certify("siegel-1", 4, {"N": 2, "J": 2, "H_U_sq": 1})
        assert c.verdict == "pass"

    def test_exact_irrational_bound(self):
        # 2^(1/2) vs 1.4142135623730951 (just above sqrt 2), decided without pi
        m = [Monomial.of(2, Fraction(1, 2))]
        assert compare(Fraction(14142135623730951, 10**16), BoundVal.from_terms(m)).verdict == "fail"
        assert compare(Fraction(14142135623730950, 10**16), BoundVal.from_terms(m)).verdict == "pass"

    def test_refinement_with_pi(self):
        # pi^2 against a 70-digit rational just below it needs more than 64 digits
        with mpmath.workdps(120):
            below = Fraction(mpmath.nstr(mpmath.pi ** 2, 90, strip_zeros=False)) - Fraction(1, 10**85)
        c = compare(below, BoundVal.from_terms([Monomial.pi(2)]))
        assert c.verdict == "pass" and c.rhs_sq.precision_digits > 64


class TestProperties:
    @given(nonzero_rationals)
    def test_product_formula(self, a):
        assert product_of_local_abs(a) == 1

    def test_local_abs(self):
        assert local_abs(Fraction(12, 5), 2) == Fraction(1, 4)
        assert local_abs(Fraction(12, 5), 5) == 5
        assert local_abs(Fraction(-12, 5), None) == Fraction(12, 5)

    @given(int_vectors.filter(any), nonzero_rationals)
    def test_scaling_invariance(self, v, lam):
        assert height_sq(v) == height_sq([lam * x for x in v])
        assert height_sq(v) >= 1
        assert inhom_height_sq(v) >= height_sq(v)

    @settings(max_examples=80)
    @given(st.lists(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=3, max_size=3),
                    min_size=1, max_size=4),
           st.lists(st.integers(-4, 4), min_size=4, max_size=4).filter(any))
    def test_sum_inequality(self, xs, ms):
        ms = ms[:len(xs)]
        if not any(ms):
            return
        total = [sum(m * x[i] for m, x in zip(ms, xs)) for i in range(3)]
        rhs = sum(m * m for m in ms) * math.prod(inhom_height_sq(x) for x in xs)
        assert inhom_height_sq(total) <= rhs

    @settings(max_examples=60)
    @given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=3))
    def test_height_duality(self, rows):
        ker = kernel(rows)
        assert subspace_height_sq(ker) == subspace_height_sq(Subspace.span(rows, 4))

    @settings(max_examples=60)
    @given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3),
           st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
    def test_product_height(self, a, b):
        ab = [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        if any(map(any, a)) and any(map(any, b)) and any(map(any, ab)):
            assert matrix_height_sq(ab) <= matrix_height_sq(a) * matrix_height_sq(b)

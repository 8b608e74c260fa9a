import random
from fractions import Fraction

import pytest

from wittheight.bilinear_space import BilinearSpace, SymBilinearForm
from wittheight.errors import NotAnIsometry
from wittheight.exact_linalg import Subspace, identity, intersect, kernel, mat_mul, primitive
from wittheight.generate import random_space
from wittheight.heights import certify, matrix_height_sq
from wittheight.isometry import (Isometry, anis_certificate, cartan_dieudonne, compose, det_on_z,
                                 find_cd_vector, invariant_subspace, is_isometry, random_isometry,
                                 reflection, reflection_height_cert, small_reflection)

D = SymBilinearForm.diagonal
full = BilinearSpace.full
I2 = full(D([1, 1]))
ROT = ((0, -1), (1, 0))


class TestReflections:
    def test_examples(self):
        assert reflection(I2, (1, 0)).matrix == ((-1, 0), (0, 1))
        assert reflection(I2, (1, 1)).matrix == ((0, -1), (-1, 0))
        assert reflection(full(D([1, -1])), (1, 0)).matrix == ((-1, 0), (0, 1))

    def test_height_certificate(self):
        c = reflection_height_cert(reflection(I2, (1, 0)), I2)
        assert c.lhs == 2 and c.passed

    def test_corrupted_matrix_reports_honestly(self):
        r = reflection(I2, (1, 0))
        m = tuple(tuple(2 * a for a in row) if i == 0 else row for i, row in enumerate(r.matrix))
        c = certify("ref-bound", matrix_height_sq(m), {"N": 2, "H_F_sq": 2, "H_x_sq": 1})
        # doubling (-1, 0) gives entries (-2, 0, 0, 1): still far below 2048
        assert c.lhs == 5 and c.rhs_sq.lo == 2048 and c.verdict == "pass"
        huge = certify("ref-bound", 4097, {"N": 2, "H_F_sq": 2, "H_x_sq": 1})
        assert huge.verdict == "fail"

    @pytest.mark.parametrize("seed", range(25))
    def test_involution_and_fixed_hyperplane(self, seed):
        rng = random.Random(seed)
        s = random_space(rng, rng.randint(2, 4), None, 8, regular=True)
        while True:
            y = [rng.randint(-3, 3) for _ in range(s.N)]
            if any(y) and s.form(y):
                break
        r = reflection(s, y)
        assert mat_mul(r.matrix, r.matrix) == identity(s.N)
        hyper = intersect(kernel([primitive(s.form.apply(r.mirror))]), s.z)
        assert all(tuple(r(v)) == tuple(Fraction(a) for a in v) for v in hyper.basis)
        assert tuple(r(r.mirror)) == tuple(-Fraction(a) for a in r.mirror)
        assert reflection_height_cert(r, s).passed


class TestIsometryPredicates:
    def test_examples(self):
        assert is_isometry(I2, identity(2))
        assert is_isometry(I2, ((0, 1), (1, 0)))
        assert not is_isometry(I2, ((2, 0), (0, 1)))

    def test_must_fix_complement(self):
        s = BilinearSpace(Subspace.span([(1, 0, 0), (0, 1, 0)]), D([1, 1, 1]))
        assert is_isometry(s, ((0, -1, 0), (1, 0, 0), (0, 0, 1)))
        assert not is_isometry(s, ((0, -1, 0), (1, 0, 0), (0, 0, -1)))

    def test_invariant_subspace(self):
        u, c = invariant_subspace(I2, identity(2))
        assert u == Subspace.full(2) and c.passed
        u, _ = invariant_subspace(I2, reflection(I2, (1, 0)).matrix)
        assert u == Subspace.span([(0, 1)])
        u, c = invariant_subspace(I2, ROT)
        assert u.dim == 0 and c.passed


class TestSmallReflection:
    def test_identity_form(self):
        r, c = small_reflection(I2)
        assert r.mirror == (1, 0) and c.lhs == 2 and c.passed

    def test_hyperbolic(self):
        r, c = small_reflection(full(SymBilinearForm([[0, 1], [1, 0]])))
        assert r.mirror == (1, 1) and c.passed

    def test_line(self):
        s = BilinearSpace(Subspace.span([(1, 2)]), D([1, 1]))
        r, _ = small_reflection(s)
        assert tuple(r((1, 2))) == (-1, -2)

    def test_anis_certificate(self):
        y, _ = find_cd_vector(I2, identity(2))
        assert anis_certificate(I2, y).passed


class TestCdVector:
    def test_rotation(self):
        assert find_cd_vector(I2, ROT) == ((1, 0), "minus")

    def test_minus_identity(self):
        assert find_cd_vector(I2, ((-1, 0), (0, -1)))[1] == "minus"

    def test_identity(self):
        assert find_cd_vector(I2, identity(2))[1] == "plus"


class TestCartanDieudonne:
    def test_identity(self):
        assert cartan_dieudonne(I2, identity(2)).length == 0

    def test_rotation(self):
        res = cartan_dieudonne(I2, ROT)
        assert res.mirrors == [(-1, 1), (0, 1)]
        assert res.reflections[0].matrix == ((0, 1), (1, 0))
        assert res.reflections[1].matrix == ((1, 0), (0, -1))
        assert compose(res.reflections, 2) == ROT and res.verified
        assert all(c.passed for c in res.certificates)

    def test_single_reflection(self):
        res = cartan_dieudonne(I2, reflection(I2, (1, 0)).matrix)
        assert res.length == 1 and res.verified

    def test_rejects_non_isometry(self):
        with pytest.raises(NotAnIsometry):
            cartan_dieudonne(I2, ((2, 0), (0, 1)))

    def test_rejects_singular_space(self):
        with pytest.raises(ValueError):
            cartan_dieudonne(full(D([1, 0])), identity(2))

    @pytest.mark.parametrize("seed", range(40))
    def test_round_trip(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        s = random_space(rng, n, rng.choice([None] + list(range(1, n + 1))), 10, regular=True)
        k = rng.randint(0, 2 * s.L - 1)
        sigma = random_isometry(s, k, seed)
        assert is_isometry(s, sigma.matrix)
        assert det_on_z(s, sigma.matrix) == (-1) ** k
        res = cartan_dieudonne(s, sigma)
        assert res.verified and res.length <= 2 * s.L - 1
        assert all(c.passed for c in res.certificates)
        assert all(s.contains(m) for m in res.mirrors)


class TestRandomIsometry:
    def test_k_zero(self):
        assert random_isometry(I2, 0, 1).matrix == identity(2)

    def test_deterministic(self):
        s = full(D([1, 2, -3]))
        assert random_isometry(s, 3, 11) == random_isometry(s, 3, 11)

    def test_determinant(self):
        s = full(D([1, 2, -3]))
        for k in range(5):
            assert det_on_z(s, random_isometry(s, k, k).matrix) == (-1) ** k


def test_sign_symmetry_on_full_space():
    s = full(D([1, 2, -3]))
    a = random_isometry(s, 3, 4)
    neg = Isometry(tuple(tuple(-x for x in row) for row in a.matrix))
    assert is_isometry(s, neg.matrix)
    assert neg.height_sq == a.height_sq

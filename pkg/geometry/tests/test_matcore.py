import math
import tempfile
from fractions import Fraction
from pathlib import Path
from unittest import mock

import numpy as np
import scipy.linalg
from django.test import SimpleTestCase

from geometry.errors import Diverged, DomainError, ShapeError, SingularMatrixError
from geometry.matcore import (
    ad_power,
    as_mat,
    bernoulli_table,
    commutator,
    dexp_apply,
    expm,
    fro,
    inv,
    logm,
    sqrtm,
    svd_polar,
)
from geometry.matio import format_matrix, parse_matrix, read_matrix, write_matrix
from geometry.verification import random_orthogonal, random_scaled, random_spd, random_well_conditioned


class MatConstructionTests(SimpleTestCase):
    def test_vector_becomes_column(self):
        self.assertEqual(as_mat([1.0, 2.0, 3.0]).shape, (3, 1))

    def test_rejects_non_finite(self):
        with self.assertRaises(DomainError):
            as_mat([[1.0, float("nan")], [0.0, 1.0]])

    def test_rejects_non_square_when_required(self):
        with self.assertRaises(ShapeError):
            as_mat(np.zeros((2, 3)), square=True)

    def test_returns_a_copy(self):
        a = np.eye(2)
        m = as_mat(a)
        m[0, 0] = 5.0
        self.assertEqual(a[0, 0], 1.0)


class MatrixFunctionTests(SimpleTestCase):
    def test_expm_closed_forms(self):
        np.testing.assert_allclose(expm(np.zeros((3, 3))), np.eye(3), atol=0)
        np.testing.assert_allclose(expm(np.diag([math.log(2.0), 0.0])), np.diag([2.0, 1.0]), rtol=1e-14)
        c, s = math.cos(0.5), math.sin(0.5)
        np.testing.assert_allclose(expm([[0.0, -0.5], [0.5, 0.0]]), [[c, -s], [s, c]], atol=1e-15)

    def test_expm_inverse_pair(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a = random_scaled(rng, 4, 5.0)
            self.assertLess(fro(expm(a) @ expm(-a) - np.eye(4)), 1e-11)

    def test_expm_overflow_is_diverged(self):
        with self.assertRaises(Diverged):
            expm(np.diag([1000.0, 0.0]))

    def test_logm_closed_forms(self):
        np.testing.assert_allclose(logm(np.eye(3)), np.zeros((3, 3)), atol=1e-14)
        np.testing.assert_allclose(logm(np.diag([2.0, 1.0])), np.diag([math.log(2.0), 0.0]), atol=1e-14)

    def test_logm_spd_matches_eigendecomposition(self):
        q = random_orthogonal(np.random.default_rng(2), 2)
        a = q.T @ np.diag([1.2, 3.4]) @ q
        expected = q.T @ np.diag([math.log(1.2), math.log(3.4)]) @ q
        self.assertLess(fro(logm(a) - expected), 1e-12)

    def test_logm_negative_eigenvalue_is_named(self):
        with self.assertRaises(DomainError) as ctx:
            logm(np.diag([-1.0, 1.0]))
        self.assertAlmostEqual(ctx.exception.eigenvalue.real, -1.0)

    def test_logm_inverts_expm(self):
        rng = np.random.default_rng(3)
        a = random_scaled(rng, 4, 1.0)
        self.assertLess(fro(logm(expm(a)) - a), 1e-10)

    def test_sqrtm(self):
        np.testing.assert_allclose(sqrtm(np.eye(2)), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(sqrtm(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
        a = random_spd(np.random.default_rng(4), 5)
        r = sqrtm(a)
        self.assertLess(fro(r @ r - a), 1e-11)

    def test_sqrtm_on_cut_raises(self):
        with self.assertRaises(DomainError):
            sqrtm(np.diag([4.0, -1.0]))

    def test_inv_singular(self):
        with self.assertRaises(SingularMatrixError):
            inv([[1.0, 2.0], [2.0, 4.0]])

    def test_inv_ill_conditioned(self):
        with self.assertRaises(SingularMatrixError):
            inv(scipy.linalg.hilbert(12))

    def test_inv_skips_condition_number_when_residual_is_small(self):
        a = random_well_conditioned(np.random.default_rng(8), 5)
        with mock.patch("numpy.linalg.cond") as cond:
            out = inv(a)
        cond.assert_not_called()
        self.assertLess(fro(out @ a - np.eye(5)), 1e-10)


class LieAlgebraTests(SimpleTestCase):
    def test_ad_power_zero_is_copy(self):
        v = np.arange(4.0).reshape(2, 2)
        np.testing.assert_array_equal(ad_power(np.eye(2), v, 0), v)

    def test_ad_power_one(self):
        out = ad_power(np.diag([1.0, 2.0]), [[0.0, 1.0], [0.0, 0.0]], 1)
        np.testing.assert_array_equal(out, [[0.0, -1.0], [0.0, 0.0]])

    def test_ad_power_two_is_nested(self):
        rng = np.random.default_rng(5)
        a, v = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
        self.assertLess(fro(ad_power(a, v, 2) - commutator(a, commutator(a, v))), 1e-12)

    def test_ad_power_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            ad_power(np.eye(2), np.eye(3), 1)

    def test_jacobi_identity(self):
        rng = np.random.default_rng(6)
        a, b, c = (rng.standard_normal((3, 3)) for _ in range(3))
        lhs = ad_power(a, commutator(b, c), 1)
        rhs = commutator(ad_power(a, b, 1), c) + commutator(b, ad_power(a, c, 1))
        self.assertLess(fro(lhs - rhs), 1e-12)

    def test_bernoulli_values(self):
        b = bernoulli_table()
        self.assertEqual(b[0], 1)
        self.assertEqual(b[1], Fraction(-1, 2))
        self.assertEqual(b[2], Fraction(1, 6))
        self.assertEqual(b[4], Fraction(-1, 30))
        self.assertEqual(b[20], Fraction(-174611, 330))
        for j in range(3, 21, 2):
            self.assertEqual(b[j], 0)

    def test_bernoulli_recurrence_exact(self):
        b = bernoulli_table()
        for m in range(1, 21):
            self.assertEqual(sum(math.comb(m + 1, k) * b[k] for k in range(m + 1)), 0)

    def test_dexp_commuting(self):
        a = np.diag([0.1, 0.2])
        v = np.diag([1.0, -1.0])
        np.testing.assert_array_equal(dexp_apply(a, v, 6), v)


class SvdPolarTests(SimpleTestCase):
    def test_orthogonal_input(self):
        q0 = random_orthogonal(np.random.default_rng(7), 4)
        s, q = svd_polar(q0)
        self.assertLess(fro(s - np.eye(4)), 1e-13)
        self.assertLess(fro(q - q0), 1e-13)

    def test_spd_input(self):
        a = random_spd(np.random.default_rng(8), 4)
        s, q = svd_polar(a)
        self.assertLess(fro(s - a), 1e-12)
        self.assertLess(fro(q - np.eye(4)), 1e-12)

    def test_residual_on_random(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            x = random_well_conditioned(rng, 5)
            s, q = svd_polar(x)
            self.assertLess(fro(s @ q - x), 1e-12)
            self.assertLess(fro(q.T @ q - np.eye(5)), 1e-13)
            self.assertGreater(np.min(np.linalg.eigvalsh(s)), 0.0)

    def test_singular_rejected(self):
        with self.assertRaises(SingularMatrixError):
            svd_polar(np.diag([1.0, 0.0]))


class MatrixTextFormatTests(SimpleTestCase):
    def test_format_header_and_rows(self):
        text = format_matrix([[1.0, 2.5], [-3.0, 0.0]])
        self.assertEqual(text.splitlines(), ["2 2", "1 2.5", "-3 0"])

    def test_seventeen_digits_survive(self):
        m = np.array([[0.1, 1.0 / 3.0, math.pi]])
        np.testing.assert_array_equal(parse_matrix(format_matrix(m)), m)

    def test_bad_inputs(self):
        for text in ("", "2\n1 2", "2 2\n1 2", "1 2\n1 2 3", "x y\n1", "1 2\n1 abc"):
            with self.subTest(text=text), self.assertRaises(ShapeError):
                parse_matrix(text)

    def test_file_round_trip(self):
        m = np.array([[1.0, -2.0], [0.25, 4.0]])
        with tempfile.TemporaryDirectory() as tmp:
            path = write_matrix(Path(tmp) / "m.mat", m)
            np.testing.assert_array_equal(read_matrix(path), m)

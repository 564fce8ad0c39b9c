import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from geometry.errors import DomainError, NotInvolutiveError, ShapeError, SingularMatrixError
from geometry.involutions import (
    InvolutionKind,
    anti_identity,
    check_symmetric_space_axioms,
    complex_to_real,
    grading_residuals,
    lift_group_automorphism,
    make_involution,
    k_residual,
    p_residual,
    parse_involution,
    projectors,
    real_to_complex,
    reflection,
    sandwich_product,
    sphere_product,
    split,
)
from geometry.matcore import commutator, expm, fro
from geometry.matio import write_matrix
from geometry.verification import random_orthogonal, random_scaled, random_spd

V = np.array([[0.0, -1.0, -2.0], [1.0, 0.0, -3.0], [2.0, 3.0, 0.0]])


class InvolutionConstructionTests(SimpleTestCase):
    def test_transpose_inverse_fixes_orthogonal(self):
        q = random_orthogonal(np.random.default_rng(0), 4)
        sigma = make_involution(InvolutionKind.TRANSPOSE_INVERSE)
        self.assertLess(fro(sigma.group_map(q) - q), 1e-13)

    def test_transpose_inverse_singular_group_element(self):
        sigma = make_involution("transpose-inverse")
        with self.assertRaises(SingularMatrixError):
            sigma.group_map(np.diag([1.0, 0.0]))

    def test_inner_keeps_so3(self):
        sigma = make_involution(InvolutionKind.INNER, reflection(3))
        x = expm(0.3 * V)
        y = sigma.group_map(x)
        self.assertLess(fro(y.T @ y - np.eye(3)), 1e-13)
        self.assertAlmostEqual(np.linalg.det(y), 1.0, places=12)

    def test_inner_rejects_non_involutive(self):
        with self.assertRaises(NotInvolutiveError):
            make_involution(InvolutionKind.INNER, np.diag([2.0, 1.0]))
        with self.assertRaises(NotInvolutiveError):
            make_involution(InvolutionKind.INNER)

    def test_inner_shape_mismatch(self):
        sigma = make_involution(InvolutionKind.INNER, reflection(3))
        with self.assertRaises(ShapeError):
            split(np.eye(4), sigma)

    def test_conjugate_on_real_embedding(self):
        rng = np.random.default_rng(1)
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        sigma = make_involution(InvolutionKind.CONJUGATE)
        out = sigma.algebra_map(complex_to_real(z))
        np.testing.assert_allclose(real_to_complex(out), np.conj(z), atol=1e-15)

    def test_conjugate_rejects_odd_size(self):
        with self.assertRaises(ShapeError):
            make_involution("conjugate").algebra_map(np.eye(3))

    def test_group_and_algebra_laws(self):
        rng = np.random.default_rng(2)
        for kind, r in (("transpose-inverse", None), ("inner", anti_identity(4)), ("conjugate", None)):
            sigma = make_involution(kind, r)
            with self.subTest(kind=kind):
                x = expm(random_scaled(rng, 4, 0.5))
                y = expm(random_scaled(rng, 4, 0.5))
                X, Y = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
                self.assertLess(fro(sigma.group_map(sigma.group_map(x)) - x), 1e-12)
                self.assertLess(fro(sigma.group_map(x @ y) - sigma.group_map(x) @ sigma.group_map(y)), 1e-12)
                self.assertLess(fro(sigma.algebra_map(sigma.algebra_map(X)) - X), 1e-14)
                lhs = sigma.algebra_map(commutator(X, Y))
                rhs = commutator(sigma.algebra_map(X), sigma.algebra_map(Y))
                self.assertLess(fro(lhs - rhs), 1e-12)


class ParseInvolutionTests(SimpleTestCase):
    def test_builtin_ids(self):
        self.assertIs(parse_involution("transpose-inverse").kind, InvolutionKind.TRANSPOSE_INVERSE)
        self.assertIs(parse_involution(" conjugate ").kind, InvolutionKind.CONJUGATE)

    def test_inner_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_matrix(Path(tmp) / "r.mat", reflection(3))
            sigma = parse_involution(f"inner:{path}")
        self.assertIs(sigma.kind, InvolutionKind.INNER)
        np.testing.assert_array_equal(sigma.r, reflection(3))

    def test_unknown_id(self):
        with self.assertRaises(DomainError):
            parse_involution("hermitian")
        with self.assertRaises(DomainError):
            parse_involution("inner:")


class SplittingTests(SimpleTestCase):
    def test_transpose_inverse_symmetric_and_skew(self):
        sigma = make_involution("transpose-inverse")
        sym = np.array([[1.0, 2.0], [2.0, 3.0]])
        parts = split(sym, sigma)
        np.testing.assert_array_equal(parts.P, sym)
        np.testing.assert_array_equal(parts.K, np.zeros((2, 2)))
        skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
        parts = split(skew, sigma)
        np.testing.assert_array_equal(parts.P, np.zeros((2, 2)))
        np.testing.assert_array_equal(parts.K, skew)

    def test_sphere_splitting_of_skew_matrix(self):
        parts = split(V, make_involution(InvolutionKind.INNER, np.diag([-1.0, 1.0, 1.0])))
        np.testing.assert_array_equal(parts.P, [[0.0, -1.0, -2.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        np.testing.assert_array_equal(parts.K, [[0.0, 0.0, 0.0], [0.0, 0.0, -3.0], [0.0, 3.0, 0.0]])

    def test_parts_reconstruct_and_grade(self):
        rng = np.random.default_rng(3)
        for sigma in (make_involution("transpose-inverse"), make_involution("inner", reflection(4, (0, 2)))):
            x = rng.standard_normal((4, 4))
            parts = split(x, sigma)
            np.testing.assert_array_equal(parts.P + parts.K, x)
            self.assertLess(p_residual(sigma, parts.P), 1e-13)
            self.assertLess(k_residual(sigma, parts.K), 1e-13)

    def test_grading_law_and_triple_closure(self):
        rng = np.random.default_rng(4)
        kinds = (
            make_involution("transpose-inverse"),
            make_involution("inner", reflection(4)),
            make_involution("conjugate"),
        )
        for sigma in kinds:
            for _ in range(5):
                x, y, z = (rng.standard_normal((4, 4)) for _ in range(3))
                res = grading_residuals(x, y, sigma, z)
                self.assertEqual(set(res), {"kk", "kp", "pp", "lts"})
                self.assertLess(max(res.values()), 1e-12)


class ProjectorTests(SimpleTestCase):
    def test_identity_cases(self):
        pair = projectors(np.eye(3))
        np.testing.assert_array_equal(pair.plus, np.eye(3))
        np.testing.assert_array_equal(pair.minus, np.zeros((3, 3)))
        pair = projectors(-np.eye(3))
        np.testing.assert_array_equal(pair.plus, np.zeros((3, 3)))
        np.testing.assert_array_equal(pair.minus, np.eye(3))

    def test_rank_one_reflection(self):
        pair = projectors(reflection(3))
        np.testing.assert_array_equal(pair.minus, np.diag([1.0, 0.0, 0.0]))
        np.testing.assert_array_equal(pair.plus, np.diag([0.0, 1.0, 1.0]))

    def test_projector_identities(self):
        q = random_orthogonal(np.random.default_rng(5), 4)
        s = q @ reflection(4, (0, 1)) @ q.T
        pair = projectors(s)
        eye = np.eye(4)
        self.assertLess(fro(pair.plus + pair.minus - eye), 1e-13)
        self.assertLess(fro(pair.plus @ pair.minus), 1e-13)
        self.assertLess(fro(pair.minus @ pair.plus), 1e-13)
        self.assertLess(fro(pair.plus @ pair.plus - pair.plus), 1e-13)
        self.assertLess(fro(s @ pair.plus - pair.plus), 1e-13)
        self.assertLess(fro(s @ pair.minus + pair.minus), 1e-13)
        self.assertLess(fro(eye - 2.0 * pair.minus - s), 1e-14)

    def test_rejects_non_involutive(self):
        with self.assertRaises(NotInvolutiveError):
            projectors(np.diag([1.0, 0.5]))


class LiftTests(SimpleTestCase):
    def test_spd_maps_to_inverse(self):
        x = random_spd(np.random.default_rng(6), 3)
        out = lift_group_automorphism(make_involution("transpose-inverse"), x)
        self.assertLess(fro(out - np.linalg.inv(x)), 1e-10)

    def test_identity(self):
        out = lift_group_automorphism(make_involution("inner", reflection(3)), np.eye(3))
        self.assertLess(fro(out - np.eye(3)), 1e-15)

    def test_agrees_with_group_map_near_identity(self):
        rng = np.random.default_rng(7)
        sigma = make_involution("inner", anti_identity(4))
        for _ in range(5):
            x = expm(random_scaled(rng, 4, 0.3))
            self.assertLess(fro(lift_group_automorphism(sigma, x) - sigma.group_map(x)), 1e-10)

    def test_domain_error_propagates(self):
        with self.assertRaises(DomainError):
            lift_group_automorphism(make_involution("transpose-inverse"), np.diag([-1.0, 1.0]))


class SymmetricSpaceAxiomTests(SimpleTestCase):
    def test_spd_sandwich_product(self):
        rng = np.random.default_rng(8)
        report = check_symmetric_space_axioms(sandwich_product, [random_spd(rng, 4) for _ in range(20)])
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(set(report.residuals), {"idempotent", "left_inverse", "distributive"})

    def test_sphere_reflection_product(self):
        rng = np.random.default_rng(9)
        units = []
        for _ in range(10):
            v = rng.standard_normal((3, 1))
            units.append(v / np.linalg.norm(v))
        report = check_symmetric_space_axioms(sphere_product, units)
        self.assertTrue(report.passed, report.summary())

    def test_broken_product_fails_left_inverse(self):
        rng = np.random.default_rng(10)
        report = check_symmetric_space_axioms(lambda a, b: a @ b, [random_spd(rng, 3) for _ in range(5)])
        self.assertFalse(report.passed)
        self.assertGreater(report.residuals["left_inverse"], 1e-3)

    def test_undefined_product_is_reported(self):
        samples = [np.eye(2), np.diag([1.0, 0.0]), 2.0 * np.eye(2)]
        report = check_symmetric_space_axioms(sandwich_product, samples)
        self.assertFalse(report.passed)
        self.assertTrue(report.failures)
        self.assertIn("undefined=", report.summary())

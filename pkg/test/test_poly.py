import unittest
import os
import sys

import numpy as np
from hypothesis import given, settings, strategies as st

# add core/ to the python path
core_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'core')
sys.path.append(core_path)
from linac.exception import DomainError, InputError
from linac.poly import ActionPoly, LaurentPoly, PolyMap, action_eval, laurent_circle_average, poly_eval


def e1_action() -> ActionPoly:
    return ActionPoly(2, [
        {(1, 0): LaurentPoly({1: 1})},
        {(0, 1): LaurentPoly({2: 1}), (3, 0): LaurentPoly({2: 1, 3: -1})},
    ])


def trapezoid_average(c: LaurentPoly, nodes: int = 64) -> complex:
    s = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return complex(np.mean(c(s)))


small_ints = st.integers(min_value=-9, max_value=9)
coefficients = st.builds(complex, small_ints, small_ints)
exponents2 = st.tuples(st.integers(0, 4), st.integers(0, 4))
coordinates = st.dictionaries(exponents2, coefficients, max_size=6)
polymaps = st.builds(lambda a, b: PolyMap(2, [a, b]), coordinates, coordinates)


class TestPolyEval(unittest.TestCase):
    def test_examples(self):
        shear = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): 1}])
        inverse_shear = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): -1}])
        test_cases = [
            ("identity", PolyMap.identity(2), [0.3, -0.7j], [0.3, -0.7j]),
            ("shear", shear, [1, 0], [1, 1]),
            ("inverse shear", inverse_shear, [2, 1], [2, -7]),
        ]
        for name, f, x, expected in test_cases:
            with self.subTest(case=name):
                np.testing.assert_array_equal(poly_eval(f, np.array(x, dtype=complex)), np.array(expected, dtype=complex))

    def test_dimension_mismatch(self):
        with self.assertRaises(InputError):
            poly_eval(PolyMap.identity(2), np.zeros(3))

    def test_batch_evaluation_matches_single_points(self):
        f = PolyMap(2, [{(2, 1): 1 - 2j, (0, 0): 3}, {(0, 3): 0.5, (1, 1): 1j}])
        xs = np.array([[0.1 + 0.2j, -0.3], [1.0, 2j], [0, 0]])
        batch = f(xs)
        for k, x in enumerate(xs):
            with self.subTest(row=k):
                np.testing.assert_allclose(batch[k], poly_eval(f, x), rtol=0, atol=1e-15)

    def test_exact_jacobian(self):
        f = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): 1}])
        np.testing.assert_array_equal(f.jacobian(np.array([2.0, 5.0])), np.array([[1, 0], [12, 1]], dtype=complex))

    def test_compose_shear_with_its_inverse(self):
        shear = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): 1}])
        inverse_shear = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1, (3, 0): -1}])
        self.assertEqual(shear.compose(inverse_shear), PolyMap.identity(2))

    def test_items_are_graded_lexicographic(self):
        f = PolyMap(2, [{(0, 2): 1, (3, 0): 1, (1, 0): 1, (0, 0): 1, (1, 1): 1, (2, 0): 1}, {}])
        self.assertEqual([a for a, _ in f.items(0)], [(0, 0), (1, 0), (2, 0), (1, 1), (0, 2), (3, 0)])

    def test_zero_coefficients_are_dropped(self):
        f = PolyMap(1, [{(1,): 0, (2,): 1}])
        self.assertEqual(dict(f.coords[0]), {(2,): 1})
        self.assertTrue(LaurentPoly({3: 0}).is_zero)

    def test_chop(self):
        f = PolyMap(2, [{(1, 0): 1, (2, 0): 1e-12j}, {(0, 1): 1, (3, 0): 1 - 1e-15, (1, 1): -5e-10}])
        chopped = f.chop(1e-9)
        self.assertEqual(set(chopped.coords[0]), {(1, 0)})
        self.assertEqual(set(chopped.coords[1]), {(0, 1), (3, 0)})
        self.assertEqual(f.chop(0), f)

    def test_negative_exponent_rejected(self):
        with self.assertRaises(InputError):
            PolyMap(2, [{(-1, 0): 1}, {}])

    @given(polymaps, polymaps)
    @settings(max_examples=60, deadline=None)
    def test_canonical_form_closure(self, f, g):
        self.assertEqual((f + g) - g, f)


class TestLaurentCircleAverage(unittest.TestCase):
    def test_examples(self):
        test_cases = [
            ("1 - s", LaurentPoly({0: 1, 1: -1}), 1),
            ("s^-2 + 5 + 3 s^7", LaurentPoly({-2: 1, 0: 5, 7: 3}), 5),
            ("s", LaurentPoly({1: 1}), 0),
        ]
        for name, c, expected in test_cases:
            with self.subTest(c=name):
                self.assertEqual(laurent_circle_average(c), expected)
                self.assertAlmostEqual(abs(trapezoid_average(c) - expected), 0, places=13)

    def test_inverse_monomials_average_to_one(self):
        for k in range(-16, 17):
            with self.subTest(k=k):
                product = LaurentPoly.monomial(k) * LaurentPoly.monomial(-k)
                self.assertEqual(laurent_circle_average(product), 1)

    def test_negative_power_at_zero(self):
        with self.assertRaises(DomainError):
            LaurentPoly({-1: 1})(0)


class TestActionEval(unittest.TestCase):
    def test_examples(self):
        test_cases = [
            ("e1 at s=1", e1_action(), 1, [0.4 - 0.1j, 2.0], [0.4 - 0.1j, 2.0]),
            ("e1 at s=2", e1_action(), 2, [1, 0], [2, -4]),
            ("diagonal (1,-1)", ActionPoly.diagonal([1, -1]), 2, [1, 1], [2, 0.5]),
        ]
        for name, phi, s, x, expected in test_cases:
            with self.subTest(case=name):
                np.testing.assert_array_equal(action_eval(phi, s, np.array(x, dtype=complex)),
                                              np.array(expected, dtype=complex))

    def test_zero_group_parameter(self):
        with self.assertRaises(DomainError):
            action_eval(e1_action(), 0, np.array([1.0, 1.0]))

    def test_identity_at_one(self):
        phi = e1_action()
        self.assertEqual(phi.identity_defect(), 0.0)
        rng = np.random.default_rng(7)
        xs = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
        for x in xs:
            self.assertLessEqual(np.max(np.abs(action_eval(phi, 1, x) - x)), 1e-14)

    def test_translate_moves_fixed_point(self):
        p = np.array([1.0, -0.5])
        shifted = e1_action().translate(-p)
        # shifted(s, x) = phi(s, x - p) + p fixes p
        for s in (2.0, 0.5j, -3 + 1j):
            with self.subTest(s=s):
                np.testing.assert_allclose(shifted(s, p), p, atol=1e-12)
        back = shifted.translate(p)
        self.assertLessEqual(back.at(2.0).max_coefficient_distance(e1_action().at(2.0)), 1e-12)

    def test_conjugate_linear_of_diagonal(self):
        g = np.array([[2.0, 1.0], [1.0, 1.0]])
        phi = ActionPoly.diagonal([1, 3]).conjugate_linear(g)
        s = 1.7 - 0.4j
        expected = np.linalg.inv(g) @ np.diag([s, s ** 3]) @ g
        linear = np.array([[c(s) for c in row] for row in phi.linear_part()])
        np.testing.assert_allclose(linear, expected, atol=1e-12)

    def test_evaluate_many_matches_pointwise(self):
        phi = e1_action()
        s = np.exp(2j * np.pi * np.arange(5) / 5)
        x = np.array([0.3, 0.1])
        values = phi.evaluate_many(s, x)
        for k in range(5):
            np.testing.assert_allclose(values[k], phi(s[k], x), atol=1e-15)


if __name__ == '__main__':
    unittest.main()

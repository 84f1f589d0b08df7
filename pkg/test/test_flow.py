import unittest
import os
import sys

import numpy as np
import scipy.linalg

# add core/ to the python path
core_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'core')
sys.path.append(core_path)
from linac.exception import IntegrationFailure, InputError
from linac.flow import (
    FlowQuery,
    integrate_flow,
    integrate_path,
    linear_flow_matrix,
    orbit_samples,
    periodicity_check,
    sample_path,
    variational_matrix,
)
from linac.poly import PolyMap
from linac.run_configs import IntegratorConfig, PeriodicityConfig
from linac.spec_io import load_action_spec

SAMPLES = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'samples')
TWO_PI_I = 2j * np.pi


def linear_field() -> PolyMap:
    return PolyMap.affine(TWO_PI_I * np.diag([1, 2]))


def euler_cubic() -> PolyMap:
    return load_action_spec(os.path.join(SAMPLES, "euler_cubic.json")).field


def euler_closed_form(z, x):
    s = np.exp(TWO_PI_I * z)
    return np.array([s * x[0], s ** 2 * x[1] + (s ** 3 - s ** 2) * x[0] ** 3])


class TestIntegrateFlow(unittest.TestCase):
    def test_linear_quarter_turn(self):
        y = integrate_flow(linear_field(), FlowQuery(0.25, np.array([1.0, 1.0])))
        np.testing.assert_allclose(y, [1j, -1], atol=1e-8)

    def test_zero_time_is_exact(self):
        x = np.array([0.3 - 0.2j, 1.7])
        y = integrate_flow(euler_cubic(), FlowQuery(0, x))
        np.testing.assert_array_equal(y, x)
        self.assertIsNot(y, x)

    def test_matches_closed_form(self):
        field = euler_cubic()
        test_cases = [
            (1.0, [0.3, 0.2]),
            (0.5, [1.0, 0.0]),
            (0.1j, [1.0, 0.0]),
            (0.35 - 0.05j, [0.4 + 0.1j, -0.3j]),
        ]
        for z, x in test_cases:
            with self.subTest(z=z):
                x = np.array(x, dtype=complex)
                np.testing.assert_allclose(integrate_flow(field, FlowQuery(z, x)), euler_closed_form(z, x), atol=1e-8)

    def test_one_period_returns_home(self):
        x = np.array([0.3, 0.2], dtype=complex)
        np.testing.assert_allclose(integrate_flow(euler_cubic(), FlowQuery(1.0, x)), x, atol=1e-8)

    def test_path_is_independent_of_route(self):
        field = euler_cubic()
        x = np.array([0.5, -0.1], dtype=complex)
        states = integrate_path(field, x, [0.3, 0.3 + 0.2j, 0.1j])
        self.assertEqual(states.shape, (3, 2))
        for z, row in zip([0.3, 0.3 + 0.2j, 0.1j], states):
            with self.subTest(z=z):
                np.testing.assert_allclose(row, integrate_flow(field, FlowQuery(z, x)), atol=1e-8)

    def test_semigroup(self):
        field = euler_cubic()
        x = np.array([0.2 + 0.1j, 0.4], dtype=complex)
        z1, z2 = 0.2 + 0.05j, 0.45 - 0.1j
        two_steps = integrate_flow(field, FlowQuery(z2, integrate_flow(field, FlowQuery(z1, x))))
        np.testing.assert_allclose(two_steps, integrate_flow(field, FlowQuery(z1 + z2, x)), atol=1e-8)

    def test_escape(self):
        blowup = PolyMap(1, [{(2,): 1.0}])
        with self.assertRaises(IntegrationFailure):
            integrate_flow(blowup, FlowQuery(2.0, np.array([1.0])))

    def test_step_budget(self):
        with self.assertRaises(IntegrationFailure) as ctx:
            integrate_flow(euler_cubic(), FlowQuery(1.0, np.array([0.3, 0.2])), IntegratorConfig(max_steps=3))
        self.assertEqual(ctx.exception.steps, 3)

    def test_dimension_mismatch(self):
        with self.assertRaises(InputError):
            integrate_flow(euler_cubic(), FlowQuery(0.5, np.array([1.0, 2.0, 3.0])))


class TestVariationalMatrix(unittest.TestCase):
    def test_examples(self):
        test_cases = [
            (0, np.eye(2)),
            (0.25, np.diag([1j, -1])),
            (0.5, np.diag([-1, 1])),
        ]
        for z, expected in test_cases:
            with self.subTest(z=z):
                np.testing.assert_allclose(variational_matrix(euler_cubic(), z, np.zeros(2)), expected, atol=1e-12)

    def test_inverse_product(self):
        field = euler_cubic()
        z = 0.17 + 0.08j
        product = variational_matrix(field, z, np.zeros(2)) @ variational_matrix(field, -z, np.zeros(2))
        np.testing.assert_allclose(product, np.eye(2), atol=1e-12)

    def test_defective_generator(self):
        nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
        np.testing.assert_allclose(linear_flow_matrix(nilpotent, 1.0), [[1, 1], [0, 1]], atol=1e-12)

    def test_non_diagonal_generator(self):
        d = TWO_PI_I * np.array([[1.0, 0.5], [0.0, 2.0]])
        z = 0.3 - 0.1j
        np.testing.assert_allclose(linear_flow_matrix(d, z), scipy.linalg.expm(z * d), atol=1e-10)


class TestPeriodicityCheck(unittest.TestCase):
    def test_periodic_field(self):
        report = periodicity_check(euler_cubic(), PeriodicityConfig(count=4))
        self.assertTrue(report.passed)
        self.assertEqual(report.sample_count, 4)
        self.assertLessEqual(report.max_residual, 1e-8)

    def test_non_periodic_field(self):
        field = PolyMap.affine(np.diag([1.0, 2.0]))
        report = periodicity_check(field, np.array([[0.3, 0.2], [0.1, -0.1]]))
        self.assertFalse(report.passed)
        self.assertGreater(report.max_residual, 0.1)
        np.testing.assert_array_equal(report.worst_point, [0.3, 0.2])

    def test_fixed_point_sample(self):
        report = periodicity_check(euler_cubic(), np.zeros((1, 2)))
        self.assertEqual(report.max_residual, 0.0)
        self.assertTrue(report.passed)


class TestOrbitSamples(unittest.TestCase):
    def test_sample_path(self):
        ts, zs = sample_path([1, 1 + 1j], per_leg=2)
        np.testing.assert_allclose(ts, [0, 0.5, 1, 1.5, 2])
        np.testing.assert_allclose(zs, [0, 0.5, 1, 1 + 0.5j, 1 + 1j])

    def test_empty_leg_count(self):
        with self.assertRaises(InputError):
            sample_path([1], per_leg=0)

    def test_orbit_starts_at_initial_point(self):
        spec = load_action_spec(os.path.join(SAMPLES, "e1.json"))
        x0 = np.array([0.5, 0.25], dtype=complex)
        ts, zs, states = orbit_samples(spec.flow_along, x0, [1.0], per_leg=4)
        self.assertEqual(states.shape, (5, 2))
        np.testing.assert_array_equal(states[0], x0)
        np.testing.assert_allclose(states[-1], x0, atol=1e-12)

    def test_vector_field_orbit_matches_closed_form(self):
        spec = load_action_spec(os.path.join(SAMPLES, "euler_cubic.json"))
        x0 = np.array([0.5, 0.25], dtype=complex)
        _, zs, states = orbit_samples(spec.flow_along, x0, [0.5, 0.5 + 0.1j], per_leg=3)
        for z, row in zip(zs, states):
            with self.subTest(z=z):
                np.testing.assert_allclose(row, euler_closed_form(z, x0), atol=1e-8)


if __name__ == '__main__':
    unittest.main()

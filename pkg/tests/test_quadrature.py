"""
Tests for the quadrature rules.
"""

import unittest
from fractions import Fraction

import numpy as np

from weightlab.errors import NoConvergence
from weightlab.measure import RationalInterval
from weightlab.quadrature import graded_rule, integrate_pieces, node_anchors, node_distances


class TestGradedRule(unittest.TestCase):

    def test_001_00_weights_sum_to_length(self):
        from_right, offsets, weights = graded_rule(0.5, 6, 6)
        self.assertAlmostEqual(weights.sum(), 0.5, places=14)
        self.assertEqual(from_right.sum() * 2, from_right.size)
        self.assertTrue(np.all(offsets[from_right] < 0))
        self.assertTrue(np.all(offsets[~from_right] > 0))

    def test_001_01_log_singularity(self):
        # int_0^1 -log(x) dx = 1
        from_right, offsets, weights = graded_rule(1.0, 24, 16)
        x = np.where(from_right, 1.0 + offsets, offsets)
        self.assertAlmostEqual(float(np.dot(-np.log(x), weights)), 1.0, places=6)


class TestIntegratePieces(unittest.TestCase):

    def test_002_00_constant(self):
        pieces = [(RationalInterval(Fraction(0), Fraction(1, 3)), 3.0),
                  (RationalInterval(Fraction(1), Fraction(2)), 0.5)]
        value, error = integrate_pieces(lambda interval, right, offsets: np.ones(offsets.shape), pieces)
        self.assertAlmostEqual(value, 1.5, places=13)
        self.assertLess(error, 1e-12)

    def test_002_01_distance_integrand(self):
        piece = RationalInterval(Fraction(0), Fraction(1))

        def g(interval, from_right, offsets):
            to_a, _ = node_distances(piece, interval, from_right, offsets)
            return to_a

        value, _ = integrate_pieces(g, [(piece, 2.0)])
        self.assertAlmostEqual(value, 1.0, places=13)

    def test_002_02_anchors(self):
        interval = RationalInterval(Fraction(1), Fraction(2))
        self.assertEqual(node_anchors(interval, np.array([False, True])), [Fraction(1), Fraction(2)])

    def test_002_03_distances_inside_piece(self):
        piece = RationalInterval(Fraction(0), Fraction(4))
        interval = RationalInterval(Fraction(1), Fraction(2))
        to_a, to_b = node_distances(piece, interval, np.array([False, True]), np.array([0.25, -0.25]))
        np.testing.assert_allclose(to_a, [1.25, 1.75])
        np.testing.assert_allclose(to_b, [2.75, 2.25])

    def test_002_04_no_convergence(self):
        calls = []

        def unstable(interval, from_right, offsets):
            calls.append(1)
            return np.full(offsets.shape, float(len(calls)))

        with self.assertRaises(NoConvergence):
            integrate_pieces(unstable, [(RationalInterval(Fraction(0), Fraction(1)), 1.0)])


if __name__ == '__main__':
    unittest.main()

# coding: utf-8
# Distributed under the terms of the MIT License.

import pickle
import unittest

import numpy as np

from repvote.simulate.streams import RandomStream, MAX_SEED

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"


class RandomStreamTest(unittest.TestCase):

    def test_same_key_same_draws(self):
        a = RandomStream(42, (3, 1, 7)).generator.random(5)
        b = RandomStream(42, (3, 1, 7)).generator.random(5)
        np.testing.assert_array_equal(a, b)

    def test_keys_are_independent(self):
        base = RandomStream(42)
        a = base.spawn(0, 1).generator.random(5)
        b = base.spawn(1, 0).generator.random(5)
        c = RandomStream(43, (0, 1)).generator.random(5)
        self.assertFalse(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def test_order_independence(self):
        base = RandomStream(7, (2,))
        first = base.spawn(1, 0).generator.random(3)
        second = base.spawn(1, 1).generator.random(3)

        base = RandomStream(7, (2,))
        second_again = base.spawn(1, 1).generator.random(3)
        first_again = base.spawn(1, 0).generator.random(3)
        np.testing.assert_array_equal(first, first_again)
        np.testing.assert_array_equal(second, second_again)

    def test_spawn(self):
        stream = RandomStream(5).spawn(4).spawn(2, 9)
        self.assertEqual(stream, RandomStream(5, (4, 2, 9)))
        self.assertEqual(hash(stream), hash(RandomStream(5, (4, 2, 9))))
        self.assertNotEqual(stream, RandomStream(5, (4, 2)))

    def test_seed_range(self):
        RandomStream(0)
        RandomStream(MAX_SEED).generator.random()
        self.assertRaises(ValueError, RandomStream, -1)
        self.assertRaises(ValueError, RandomStream, MAX_SEED + 1)
        self.assertRaises(ValueError, RandomStream, 1, (0, -2))

    def test_pickle(self):
        stream = RandomStream(11, (1, 2))
        clone = pickle.loads(pickle.dumps(stream))
        np.testing.assert_array_equal(stream.generator.random(4),
                                      clone.generator.random(4))


if __name__ == "__main__":
    unittest.main()

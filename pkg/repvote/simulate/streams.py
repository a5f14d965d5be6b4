# coding: utf-8
# Distributed under the terms of the MIT License.

import numpy as np

"""
Counter-based, splittable random streams.

A stream is identified by (master_seed, key...). Its generator is a Philox
counter-based bit generator seeded through a SeedSequence whose spawn_key is
the key, so a stream for (seed, replication, round, voter) is the same no
matter which other streams were drawn before it or in which process.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

MAX_SEED = 2 ** 64 - 1

# Reserved round indices for non-voting draws
ELECTORATE_ROUND = 0


class RandomStream:
    """
    A named position in the tree of random streams under one master seed.
    """

    def __init__(self, master_seed, key=()):
        """
        :param master_seed: Unsigned 64-bit int.
        :param key: Tuple of nonnegative ints identifying the substream.
        """

        master_seed = int(master_seed)
        if not 0 <= master_seed <= MAX_SEED:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        key = tuple(int(k) for k in key)
        if any(k < 0 for k in key):
            raise ValueError("Stream keys must be nonnegative")

        self.master_seed = master_seed
        self.key = key
        self._generator = None

    def spawn(self, *key):
        """
        Substream keyed by this stream's key extended with key.
        """
        return RandomStream(self.master_seed, self.key + tuple(key))

    @property
    def generator(self):
        """
        numpy Generator for this stream, created on first use.
        """
        if self._generator is None:
            seq = np.random.SeedSequence(self.master_seed, spawn_key=self.key)
            self._generator = np.random.Generator(np.random.Philox(seq))
        return self._generator

    def __eq__(self, other):
        if not isinstance(other, RandomStream):
            return NotImplemented
        return (self.master_seed, self.key) == (other.master_seed, other.key)

    def __hash__(self):
        return hash((self.master_seed, self.key))

    def __repr__(self):
        return "RandomStream(seed={}, key={})".format(self.master_seed,
                                                      self.key)

"""Deterministic seed splitting.

A master seed ``s`` feeds ``numpy.random.SeedSequence(s)``; task ``i`` of a
run uses the first 32-bit word of the ``i``-th spawned child.  Named suites
use the position of their name in :data:`SUITES` as the task index.
"""

import numpy as np

SUITES = ("rank2", "region_p", "threefold_det", "lift", "monte_carlo")


def child_seeds(seed, count):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def suite_seed(seed, name):
    return child_seeds(seed, len(SUITES))[SUITES.index(name)]

import os

import hypothesis
import numpy as np
import pytest

from module_block_building.model import instance_from_arrays
from module_experiment.dists import REFERENCE_DISTRIBUTIONS
from module_experiment.utils.seeding import make_rng

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def random_instances(count, seed=12345, max_n=18):
    """
    Seeded corpus of small instances: utilities from each reference distribution in
    turn, gas uniform on [1, 3], gas limits from heavily to not at all binding.
    """
    rng = make_rng(seed)
    for i in range(count):
        dist = REFERENCE_DISTRIBUTIONS[i % len(REFERENCE_DISTRIBUTIONS)]
        n = int(rng.integers(0, max_n + 1))
        q = dist.sample(n, rng)
        a = rng.uniform(1.0, 3.0, n)
        total = float(a.sum()) if n else 1.0
        b = max(float(rng.uniform(0.05, 1.2)) * total, 0.5)
        yield dist, instance_from_arrays(q, a, b, min_tx_gas=1.0, max_tx_gas=3.0)


@pytest.fixture
def rng():
    return make_rng(2024)


@pytest.fixture
def write_file(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write

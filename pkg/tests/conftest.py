import numpy as np
import pytest

from confmech import models
from confmech.conformal import sample_states
from confmech.reduction import to_hyperspherical


@pytest.fixture(scope="session")
def catalog_specs():
    return models.catalog()


@pytest.fixture(scope="session")
def catalog_systems(catalog_specs):
    return [(ms, models.build(ms)) for ms in catalog_specs]


def chart_interior(s, margin=1e-2):
    """True when the state reduces without getting near a chart pole."""
    try:
        to_hyperspherical(s, delta=margin)
    except Exception:
        return False
    return True


def model_states(sys_, n, seed, predicate=None, box=2.0):
    """Seeded off-singularity states for one system."""
    rng = np.random.default_rng(seed)

    def ok(s):
        if sys_.d == 1 and s.q[0] <= 1e-2:
            return False
        return predicate(s) if predicate is not None else True

    return sample_states(sys_.d, n, rng, box=box,
                         singular_distance=sys_.singular_distance,
                         exclusion=5e-2, predicate=ok)

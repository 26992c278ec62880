import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from psiwave import PrimaryWave, solve_branch  # noqa: E402
from psiwave.resonance import Branch, kink_regime  # noqa: E402

PRIMARY_WAVES = [(1, 1), (2, 2), (1, 3)]


def resonant_samples(pw, count, seed=0, ymin=0.05, ymax=50.0):
    """``count`` resonant points with log-uniform |y| on both branches."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        y = float(np.exp(rng.uniform(np.log(ymin), np.log(ymax))))
        if rng.random() < 0.5:
            y = -y
        if kink_regime(pw) and abs(y + pw.n_hat) < 1e-3:
            continue
        p = solve_branch(pw, y, Branch.PLUS if y > 0 else Branch.MINUS)
        out.append(np.array(p.mu))
    return out


@pytest.fixture(params=PRIMARY_WAVES, ids=lambda k: f"k{k[0]}{k[1]}")
def pw(request):
    return PrimaryWave(*request.param)


@pytest.fixture
def pw11():
    return PrimaryWave(1, 1)


@pytest.fixture
def mu11(pw11):
    """Resonant point of k=(1,1) at y=1."""
    return np.array(solve_branch(pw11, 1.0, "plus").mu)

"""Session-scoped heavy simulation runs shared across test modules.

The 20000-trial experiments below take seconds to minutes each; several
tests score different aspects of the same run, so each run happens once
per session.  Master seeds are fixed: every assertion downstream is
deterministic, not a statistical coin flip per CI run.
"""

import pytest

from sandlap.graphs import ModelParams
from sandlap.montecarlo import ExperimentConfig, run_corank_experiment

HEAVY_TRIALS = 20000
HEAVY_SEED = 20260821


def _bipartite_cfg(workers: int = 1) -> ExperimentConfig:
    params = ModelParams(n=64, alpha=1.0, q=0.5, p=2, seed=HEAVY_SEED)
    return ExperimentConfig(
        model="bipartite",
        params=params,
        trials=HEAVY_TRIALS,
        master_seed=HEAVY_SEED,
        statistic="corank",
        comparison="theorem",
        workers=workers,
    )


@pytest.fixture(scope="session")
def bipartite_p2_report():
    """20000 bipartite trials, p=2, n=64, alpha=1, q=1/2, one worker."""
    return run_corank_experiment(_bipartite_cfg(workers=1))


@pytest.fixture(scope="session")
def bipartite_p2_report_w8():
    """The exact same experiment pushed through eight workers."""
    return run_corank_experiment(_bipartite_cfg(workers=8))


@pytest.fixture(scope="session")
def bipartite_p3_report():
    """20000 bipartite trials at p=3, n=60."""
    params = ModelParams(n=60, alpha=1.0, q=0.5, p=3, seed=HEAVY_SEED)
    cfg = ExperimentConfig(
        model="bipartite",
        params=params,
        trials=HEAVY_TRIALS,
        master_seed=HEAVY_SEED,
        statistic="corank",
        comparison="theorem",
    )
    return run_corank_experiment(cfg)


def _iid_cfg(u: int) -> ExperimentConfig:
    params = ModelParams(n=64, alpha=1.0, q=0.5, p=2, seed=HEAVY_SEED + u)
    return ExperimentConfig(
        model="iid_rect",
        params=params,
        trials=HEAVY_TRIALS,
        master_seed=HEAVY_SEED + u,
        statistic="corank",
        u=u,
        comparison="iid",
    )


@pytest.fixture(scope="session")
def iid_u1_report():
    """20000 trials of the 65 x 64 iid Bernoulli model at p=2."""
    return run_corank_experiment(_iid_cfg(1))


@pytest.fixture(scope="session")
def iid_u0_report():
    """20000 trials of the square 64 x 64 iid Bernoulli model at p=2."""
    return run_corank_experiment(_iid_cfg(0))

import numpy as np
import pytest

from separability.conf import tau_detect
from separability.services.criteria import ParamPair, shi_margin, sun_margin, theorem1_margin
from separability.services.errors import BadConfig, NotBipartite
from separability.services.optimizer import OptimizerConfig, evaluate_objective, optimize_params
from separability.services.states import bell, example1, ghz, random_separable, tiles_noise


def test_config_validation():
    with pytest.raises(BadConfig):
        OptimizerConfig(n=0)
    with pytest.raises(BadConfig):
        OptimizerConfig(restarts=0)
    with pytest.raises(BadConfig):
        OptimizerConfig(max_iters=0)
    with pytest.raises(BadConfig):
        OptimizerConfig(init_scale=0.0)
    with pytest.raises(BadConfig):
        OptimizerConfig(seed=-1)
    with pytest.raises(BadConfig):
        OptimizerConfig(max_evaluations=0)
    with pytest.raises(BadConfig):
        OptimizerConfig(n=1, m=1, warm_starts=(ParamPair([1.0, 2.0], [1.0]),))


def test_bell_margin_reaches_one():
    result = optimize_params(bell(), OptimizerConfig(restarts=4, max_iters=300, seed=1))
    assert result.margin == pytest.approx(1.0, abs=1e-3)
    assert result.margin == pytest.approx(evaluate_objective(bell(), result.best))
    assert result.best.n == 2 and result.best.m == 2


def test_same_seed_same_result():
    cfg = OptimizerConfig(restarts=2, max_iters=60, seed=42)
    first = optimize_params(tiles_noise(0.95), cfg)
    second = optimize_params(tiles_noise(0.95), cfg)
    assert np.array_equal(first.best.mu, second.best.mu)
    assert np.array_equal(first.best.nu, second.best.nu)
    assert first.evaluations == second.evaluations


def test_warm_start_is_evaluated_first():
    cfg = OptimizerConfig(restarts=1, max_iters=20, warm_starts=(ParamPair([1.0], [1.0]),))
    result = optimize_params(bell(), cfg)
    assert result.trace[0][0] == 1
    assert result.trace[0][1] == pytest.approx(1.0)
    assert result.margin >= result.trace[0][1]


def test_trace_is_monotone():
    result = optimize_params(tiles_noise(0.95), OptimizerConfig(restarts=3, max_iters=80, seed=3))
    margins = [m for _, m in result.trace]
    assert margins == sorted(margins)
    assert result.trace[-1][1] == pytest.approx(result.margin)


def test_evaluation_budget():
    result = optimize_params(bell(), OptimizerConfig(restarts=5, max_evaluations=7))
    assert result.timed_out
    assert result.evaluations == 7
    assert result.as_dict()["timed_out"] is True


def test_optimizer_needs_bipartite_state():
    with pytest.raises(NotBipartite):
        optimize_params(ghz(3))


def test_separable_states_never_exceed_tau():
    # a short budget keeps |mu| and |nu| where the margin is resolved to well below tau
    for seed in range(100):
        rho = random_separable((2, 3), 1 + seed % 5, seed)
        cfg = OptimizerConfig(restarts=1, init_scale=0.1, max_evaluations=20, seed=seed)
        result = optimize_params(rho, cfg)
        assert result.margin <= tau_detect(), (seed, result.margin)
        assert not theorem1_margin(rho, result.best).entangled, seed


def test_optimizer_detects_example1_below_the_scalar_thresholds():
    rho = example1(0.233)
    result = optimize_params(rho, OptimizerConfig(n=5, m=5, restarts=20, seed=20240601))
    assert result.margin > 0
    assert theorem1_margin(rho, result.best).entangled
    assert result.margin >= sun_margin(rho, 11.66, 11.75, 5).margin
    assert result.margin >= shi_margin(rho, 11.66, 11.75).margin

import math

import numpy as np
import pytest

from clipfit.encoder import LOG_TAU_MAX
from clipfit.errors import ConfigError
from clipfit.optim import AdamWState, TrainConfig, adamw_step


def _cfg(**kw):
    base = dict(learning_rate=0.1, beta1=0.9, beta2=0.98, eps=1e-6, weight_decay=0.0, epochs=1, batch_size=2)
    base.update(kw)
    return TrainConfig(**base)


def test_defaults_follow_full_scale_recipe():
    cfg = TrainConfig()
    assert cfg.learning_rate == 5e-7
    assert cfg.beta1 == 0.9
    assert cfg.beta2 == 0.98
    assert cfg.eps == 1e-6
    assert cfg.weight_decay == 0.2
    assert cfg.epochs == 60
    assert cfg.batch_size == 2048
    assert cfg.prompt_mode == "template"


def test_toy_overrides():
    cfg = TrainConfig.toy()
    assert cfg.learning_rate == 1e-3
    assert cfg.batch_size == 64
    assert cfg.weight_decay == 0.2
    cfg2 = TrainConfig.toy(seed=5, prompt_mode="fixed")
    assert cfg2.seed == 5
    assert cfg2.prompt_mode == "fixed"


@pytest.mark.parametrize(
    "bad",
    [
        dict(learning_rate=0.0),
        dict(learning_rate=-1.0),
        dict(beta1=1.0),
        dict(beta2=-0.1),
        dict(eps=0.0),
        dict(weight_decay=-0.5),
        dict(epochs=0),
        dict(batch_size=1),
        dict(prompt_mode="ensemble"),
        dict(max_steps=0),
    ],
)
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        TrainConfig(**bad)


def test_zero_gradient_pure_decay_single_step():
    params = {"w": np.array([1.0])}
    state = AdamWState.for_params(params)
    adamw_step(params, {"w": np.array([0.0])}, state, _cfg(weight_decay=0.2))
    assert abs(params["w"][0] - 0.98) < 1e-15


def test_zero_gradient_decay_compounds():
    params = {"w": np.array([1.0, -2.0, 0.5])}
    state = AdamWState.for_params(params)
    cfg = _cfg(weight_decay=0.2)
    n = 17
    for _ in range(n):
        adamw_step(params, {"w": np.zeros(3)}, state, cfg)
    expected = np.array([1.0, -2.0, 0.5]) * (1.0 - 0.1 * 0.2) ** n
    assert np.all(np.abs(params["w"] - expected) < 1e-12)


def test_first_step_moves_by_learning_rate():
    # Bias correction makes the very first update mhat/sqrt(vhat) = sign(g).
    params = {"w": np.array([0.0])}
    state = AdamWState.for_params(params)
    adamw_step(params, {"w": np.array([3.7])}, state, _cfg())
    assert abs(params["w"][0] + 0.1) < 1e-6


def test_sign_symmetry_first_step():
    params = {"w": np.array([0.0, 0.0])}
    state = AdamWState.for_params(params)
    adamw_step(params, {"w": np.array([2.0, -2.0])}, state, _cfg())
    assert abs(params["w"][0] + 0.1) < 1e-6
    assert abs(params["w"][1] - 0.1) < 1e-6


def test_updates_are_in_place():
    arr = np.zeros(4)
    params = {"w": arr}
    state = AdamWState.for_params(params)
    adamw_step(params, {"w": np.ones(4)}, state, _cfg())
    assert arr is params["w"]
    assert not np.allclose(arr, 0.0)


def test_missing_gradient_means_zero():
    params = {"w": np.array([1.0]), "b": np.array([1.0])}
    state = AdamWState.for_params(params)
    adamw_step(params, {"w": np.array([0.0])}, state, _cfg(weight_decay=0.2))
    assert abs(params["b"][0] - 0.98) < 1e-15


def test_log_scale_skips_decay():
    params = {"log_scale": np.asarray(2.0).reshape(())}
    state = AdamWState.for_params(params)
    adamw_step(params, {"log_scale": np.asarray(0.0).reshape(())}, state, _cfg(weight_decay=0.9))
    assert float(params["log_scale"]) == 2.0


def test_log_scale_clamped_to_cap():
    params = {"log_scale": np.asarray(LOG_TAU_MAX + 1.0).reshape(())}
    state = AdamWState.for_params(params)
    adamw_step(params, {"log_scale": np.asarray(-5.0).reshape(())}, state, _cfg())
    assert float(params["log_scale"]) <= LOG_TAU_MAX
    assert math.exp(float(params["log_scale"])) <= 100.0 + 1e-9


def test_moment_accumulation_two_steps():
    # Hand-rolled two-step trace with b1=0.5, b2=0.5 on a scalar.
    eps = 1e-6
    cfg = _cfg(learning_rate=0.1, beta1=0.5, beta2=0.5, eps=eps)
    params = {"w": np.array([1.0])}
    state = AdamWState.for_params(params)

    p = 1.0
    m = v = 0.0
    for t, g in enumerate([2.0, -1.0], start=1):
        m = 0.5 * m + 0.5 * g
        v = 0.5 * v + 0.5 * g * g
        mhat = m / (1 - 0.5**t)
        vhat = v / (1 - 0.5**t)
        p -= 0.1 * mhat / (math.sqrt(vhat) + eps)
        adamw_step(params, {"w": np.array([g])}, state, cfg)
        assert abs(params["w"][0] - p) < 1e-12


def test_state_tracks_shapes():
    params = {"a": np.zeros((3, 4)), "b": np.zeros(7)}
    state = AdamWState.for_params(params)
    assert state.m["a"].shape == (3, 4)
    assert state.v["b"].shape == (7,)
    assert state.step == 0
    adamw_step(params, {"a": np.ones((3, 4)), "b": np.ones(7)}, state, _cfg())
    assert state.step == 1

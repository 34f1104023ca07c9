"""MLP ensembles: forward semantics, composite loss and gradients,
training determinism, block sharing, prediction statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcfed.nn import (
    EnsembleModel,
    MlpParams,
    SharedBlock,
    apply_block,
    block_average,
    composite_loss,
    data_loss,
    ensemble_predict,
    forward,
    init_params,
    load_ensemble,
    load_trace,
    r2_score,
    save_ensemble,
    save_trace,
    train_steps,
)
from dcfed.nn.ensemble import TrainSettings


def _zero_net(dims=(2, 2, 2, 2, 1), out_bias=0.0):
    weights = [np.zeros((a, b)) for a, b in zip(dims, dims[1:])]
    biases = [np.zeros(b) for b in dims[1:]]
    biases[3][:] = out_bias
    return MlpParams(weights, biases)


def test_zero_weights_output_is_final_bias():
    net = _zero_net(out_bias=3.25)
    for u in (np.zeros(2), np.ones(2), np.array([-7.0, 4.0])):
        assert forward(net, u) == pytest.approx(3.25)


def test_forward_matches_hand_arithmetic():
    # fixed 2-2-2-2-1 net evaluated two ways: through the module and by
    # writing out the matrix algebra explicitly
    rng = np.random.default_rng(4)
    net = init_params((2, 2, 2, 2, 1), rng)
    u = np.array([0.7, -1.2])
    h = u.copy()
    for k in range(3):
        h = np.maximum(h @ net.weights[k] + net.biases[k], 0.0)
    expected = h @ net.weights[3] + net.biases[3]
    assert forward(net, u, mode="infer") == pytest.approx(expected)
    # train mode with dropout off is identical
    assert forward(net, u, mode="train", rng=rng, dropout_p=0.0) == \
        pytest.approx(expected)


def test_train_mode_dropout_reproducible_under_seed():
    net = init_params((3, 4, 4, 4, 2), np.random.default_rng(0))
    u = np.ones(3)
    a = forward(net, u, mode="train", rng=np.random.default_rng(42), dropout_p=0.4)
    b = forward(net, u, mode="train", rng=np.random.default_rng(42), dropout_p=0.4)
    c = forward(net, u, mode="train", rng=np.random.default_rng(43), dropout_p=0.4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_forward_rejects_bad_shapes():
    net = _zero_net()
    with pytest.raises(ValueError):
        forward(net, np.zeros(5))


def test_data_loss_hand_value():
    # residual 0.5 everywhere: 0.85*0.25 + 0.15*(0.5*0.25) = 0.23125
    assert data_loss(np.array([1.0]), np.array([0.5])) == pytest.approx(0.23125)


def test_loss_zero_at_exact_fit():
    net = _zero_net(out_bias=2.0)
    u = np.array([[0.3, 0.4], [1.0, -1.0]])
    t = np.full((2, 1), 2.0)
    loss, grad = composite_loss(net, u, t, lambda_reg=0.0)
    assert loss == pytest.approx(0.0, abs=1e-15)
    for k in range(4):
        assert np.allclose(grad.weights[k], 0.0)
        assert np.allclose(grad.biases[k], 0.0)


def _flatten(p: MlpParams):
    return np.concatenate([a.ravel() for pair in zip(p.weights, p.biases)
                           for a in pair])


def _fd_gradient(net, u, t, lam, eps=1e-5):
    out = []
    for k in range(4):
        for arr in (net.weights[k], net.biases[k]):
            g = np.zeros_like(arr)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                old = arr[idx]
                arr[idx] = old + eps
                up, _ = composite_loss(net, u, t, lam)
                arr[idx] = old - eps
                dn, _ = composite_loss(net, u, t, lam)
                arr[idx] = old
                g[idx] = (up - dn) / (2 * eps)
            out.append(g.ravel())
    return np.concatenate(out)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_central_differences(seed):
    rng = np.random.default_rng(seed)
    net = init_params((2, 4, 5, 4, 2), rng)  # 76 weights + biases < 200
    u = rng.normal(size=(3, 2))
    t = rng.normal(size=(3, 2))
    _, grad = composite_loss(net, u, t, lambda_reg=1e-5)
    analytic = np.concatenate(
        [a.ravel() for pair in zip(grad.weights, grad.biases) for a in pair])
    numeric = _fd_gradient(net, u, t, 1e-5)
    denom = np.maximum(np.abs(numeric), 1e-6)
    assert float(np.max(np.abs(analytic - numeric) / denom)) <= 1e-4


def test_train_zero_lr_freezes_parameters():
    model = EnsembleModel.create((2, 3, 3, 3, 1), n_members=2, dropout_p=0.0,
                                 seed=1)
    before = [_flatten(m) for m in model.members]
    data = np.random.default_rng(0).normal(size=(16, 2))
    targets = data @ np.array([[2.0], [0.0]])
    trace = train_steps(model, data, targets,
                        TrainSettings(steps=10, batch_size=16, lr=0.0))
    for b, m in zip(before, model.members):
        assert np.array_equal(b, _flatten(m))
    assert np.ptp(trace) == pytest.approx(0.0, abs=1e-15)


def test_training_learns_linear_map():
    rng = np.random.default_rng(7)
    data = rng.normal(size=(256, 1))
    targets = 2.0 * data
    model = EnsembleModel.create((1, 8, 8, 8, 1), n_members=1, dropout_p=0.0,
                                 seed=3)
    trace = train_steps(model, data, targets,
                        TrainSettings(steps=200, batch_size=64, lr=5e-3))
    head = np.median(trace[:20])
    tail = np.median(trace[-20:])
    assert tail < 0.25 * head


def test_training_deterministic_under_seed():
    def run():
        model = EnsembleModel.create((2, 4, 4, 4, 1), n_members=3,
                                     dropout_p=0.2, seed=11)
        rng = np.random.default_rng(5)
        data = rng.normal(size=(64, 2))
        targets = data.sum(axis=1, keepdims=True)
        trace = train_steps(model, data, targets,
                            TrainSettings(steps=25, batch_size=16, lr=1e-3),
                            stream=4)
        return trace, _flatten(model.members[0])

    t1, p1 = run()
    t2, p2 = run()
    assert np.array_equal(t1, t2)
    assert np.array_equal(p1, p2)


def test_block_average_single_member_identity():
    model = EnsembleModel.create((2, 3, 3, 3, 1), n_members=1, seed=0)
    block = block_average(model)
    ref = SharedBlock.from_params(model.members[0])
    assert np.array_equal(block.data, ref.data)


def test_block_average_symmetry_cancels():
    model = EnsembleModel.create((2, 3, 3, 3, 1), n_members=1, seed=0)
    neg = model.members[0].copy()
    for k in range(4):
        neg.weights[k] *= -1.0
        neg.biases[k] *= -1.0
    pair = EnsembleModel([model.members[0], neg], dropout_p=0.0)
    assert np.allclose(block_average(pair).data, 0.0)


def test_block_average_matches_reordered_sum():
    model = EnsembleModel.create((3, 4, 4, 4, 2), n_members=3, seed=9)
    block = block_average(model)
    # independent accumulation: reversed member order, pairwise adds
    acc = None
    for m in reversed(model.members):
        v = SharedBlock.from_params(m).data
        acc = v if acc is None else acc + v
    assert np.allclose(block.data, acc / 3.0, atol=1e-12)


def test_apply_block_leaves_head_untouched_and_roundtrips():
    model = EnsembleModel.create((2, 3, 3, 3, 2), n_members=3, seed=2)
    heads = [m.weights[3].copy() for m in model.members]
    block = block_average(model)
    once = apply_block(model, block)
    twice = apply_block(once, block_average(once))
    for m, h in zip(once.members, heads):
        assert np.array_equal(m.weights[3], h)
    for a, b in zip(once.members, twice.members):
        assert np.array_equal(_flatten(a), _flatten(b))
    assert np.allclose(block_average(once).data, block.data, atol=1e-12)


def test_ensemble_predict_statistics():
    lone = EnsembleModel([_zero_net(out_bias=5.0)], dropout_p=0.0)
    mean, std = ensemble_predict(lone, np.zeros(2))
    assert mean == pytest.approx(5.0) and std == pytest.approx(0.0)

    two = EnsembleModel([_zero_net(out_bias=1.0), _zero_net(out_bias=3.0)],
                        dropout_p=0.0)
    mean, std = ensemble_predict(two, np.ones(2))
    assert mean == pytest.approx(2.0)
    assert std == pytest.approx(1.0)  # population convention

    outs = [forward(m, np.ones(2)) for m in two.members]
    assert mean == pytest.approx(np.mean(outs))


def test_dropout_expectation_matches_infer_on_positive_net():
    # ReLU must stay in its linear region for the mask expectation to
    # factor, so the net is built with positive weights and biases
    rng = np.random.default_rng(3)
    dims = (2, 4, 4, 4, 1)
    weights = [rng.uniform(0.1, 0.6, size=(a, b)) for a, b in zip(dims, dims[1:])]
    biases = [rng.uniform(0.5, 1.0, size=b) for b in dims[1:]]
    net = MlpParams(weights, biases)
    u = np.array([0.8, 1.3])
    infer = forward(net, u, mode="infer")
    draws = np.array([
        forward(net, u, mode="train", rng=rng, dropout_p=0.3)
        for _ in range(10_000)
    ]).ravel()
    se = draws.std(ddof=1) / np.sqrt(len(draws))
    assert abs(draws.mean() - float(infer)) <= 3.0 * se


def test_r2_hand_values():
    assert r2_score([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)
    y = np.array([1.0, 2.0, 3.0])
    assert r2_score(y, np.full(3, y.mean())) == pytest.approx(0.0)
    assert r2_score([1.0, 2.0, 3.0], [1.0, 2.0, 4.0]) == pytest.approx(0.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=12),
       st.floats(-5, 5))
def test_r2_bounded_and_shift_invariant(values, shift):
    y = np.array(values)
    rng = np.random.default_rng(0)
    pred = y + rng.normal(0, 0.5, size=len(y))
    base = r2_score(y, pred)
    assert base <= 1.0 + 1e-12
    shifted = r2_score(y + shift, pred + shift)
    if np.var(y) > 1e-9:
        assert shifted == pytest.approx(base, abs=1e-6)


def test_checkpoint_roundtrip(tmp_path):
    model = EnsembleModel.create((2, 3, 3, 3, 1), n_members=2, dropout_p=0.15,
                                 seed=8)
    save_ensemble(model, tmp_path / "ens.txt")
    back = load_ensemble(tmp_path / "ens.txt")
    assert back.n == 2 and back.dropout_p == 0.15 and back.seed == 8
    for a, b in zip(model.members, back.members):
        assert np.array_equal(_flatten(a), _flatten(b))

    trace = np.array([1.5, 0.25, 0.125])
    save_trace(trace, tmp_path / "trace.csv")
    assert np.array_equal(load_trace(tmp_path / "trace.csv"), trace)
    assert (tmp_path / "trace.csv").read_text().splitlines()[0] == "step,loss"

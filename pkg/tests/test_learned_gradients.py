"""Finite-difference checks of the analytic gradients."""

import numpy as np
import pytest

from rceval.learned import (
    ClassificationHead,
    RegressionHead,
    TinyTransformerEncoder,
    pad_batch,
    pack_input,
)


def tiny_encoder(seed=0, hidden=16, layers=2):
    return TinyTransformerEncoder(
        vocab_size=128, hidden_size=hidden, num_layers=layers,
        num_heads=2, ffn_size=24, max_len=32, seed=seed,
    )


def random_batch(encoder, rng, batch=3):
    packed = []
    for _ in range(batch):
        words = lambda n: " ".join(rng.choice(["cat", "dog", "sun", "sky", "red"]) for _ in range(n))
        packed.append(
            pack_input(
                words(rng.integers(1, 5)), words(rng.integers(1, 3)),
                words(rng.integers(1, 3)), words(rng.integers(1, 3)),
                tokenizer=encoder.tokenizer, max_len=encoder.max_len,
            )
        )
    return pad_batch(packed)


def mse_loss(encoder, head, ids, mask, targets):
    hidden, cache = encoder.forward_batch(ids, mask)
    loss, head_grads, d_pooled = head.loss_and_grads(hidden[:, 0, :], targets)
    d_hidden = np.zeros_like(hidden)
    d_hidden[:, 0, :] = d_pooled
    enc_grads = encoder.backward_batch(cache, d_hidden)
    return loss, {**enc_grads, **head_grads}


def ce_loss(encoder, head, ids, mask, labels):
    hidden, cache = encoder.forward_batch(ids, mask)
    loss, head_grads, d_pooled = head.loss_and_grads(hidden[:, 0, :], labels)
    d_hidden = np.zeros_like(hidden)
    d_hidden[:, 0, :] = d_pooled
    enc_grads = encoder.backward_batch(cache, d_hidden)
    return loss, {**enc_grads, **head_grads}


def central_difference(loss_fn, param, index, eps=1e-6):
    original = param[index]
    param[index] = original + eps
    hi = loss_fn()
    param[index] = original - eps
    lo = loss_fn()
    param[index] = original
    return (hi - lo) / (2 * eps)


def relative_error(analytic, numeric):
    denom = max(abs(analytic), abs(numeric), 1e-8)
    return abs(analytic - numeric) / denom


def sample_indices(array, rng, k=2):
    flat = [tuple(idx) for idx in np.ndindex(*array.shape)]
    picks = rng.choice(len(flat), size=min(k, len(flat)), replace=False)
    return [flat[p] for p in picks]


def test_mse_head_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    encoder = tiny_encoder()
    head = RegressionHead(encoder.hidden_size, seed=1)
    for probe in range(20):
        ids, mask = random_batch(encoder, rng)
        targets = rng.uniform(1, 5, size=ids.shape[0])
        _, grads = mse_loss(encoder, head, ids, mask, targets)
        params = head.params()
        for name, array in params.items():
            for index in sample_indices(array, rng):
                numeric = central_difference(
                    lambda: mse_loss(encoder, head, ids, mask, targets)[0],
                    array, index,
                )
                assert relative_error(grads[name][index], numeric) < 1e-3


def test_cross_entropy_head_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    encoder = tiny_encoder(seed=2)
    head = ClassificationHead(encoder.hidden_size, seed=3)
    for probe in range(20):
        ids, mask = random_batch(encoder, rng)
        labels = rng.integers(0, 3, size=ids.shape[0])
        _, grads = ce_loss(encoder, head, ids, mask, labels)
        for name, array in head.params().items():
            for index in sample_indices(array, rng):
                numeric = central_difference(
                    lambda: ce_loss(encoder, head, ids, mask, labels)[0],
                    array, index,
                )
                assert relative_error(grads[name][index], numeric) < 1e-3


@pytest.mark.parametrize("group", [
    "tok_emb", "pos_emb", "emb_ln_g", "emb_ln_b",
    "l0.wq", "l0.bk", "l0.wv", "l0.wo", "l0.ln1_g", "l0.w1", "l0.b2",
    "l1.wk", "l1.ln2_b", "l1.w2",
])
def test_encoder_gradients_match_finite_differences(group):
    """Backprop through the whole encoder, one parameter group at a time."""
    rng = np.random.default_rng(42)
    encoder = tiny_encoder(seed=5, hidden=8, layers=2)
    head = RegressionHead(encoder.hidden_size, seed=6)
    ids, mask = random_batch(encoder, rng)
    targets = rng.uniform(1, 5, size=ids.shape[0])
    _, grads = mse_loss(encoder, head, ids, mask, targets)
    array = encoder.params()[group]
    if group == "tok_emb":
        # only probe rows that actually received gradient
        rows = sorted({int(t) for t in ids.ravel()})
        indices = [(rows[0], 0), (rows[-1], array.shape[1] - 1)]
    else:
        indices = sample_indices(array, rng, k=3)
    for index in indices:
        numeric = central_difference(
            lambda: mse_loss(encoder, head, ids, mask, targets)[0], array, index
        )
        analytic = grads[group][index]
        # tiny gradients sit at the finite-difference noise floor; accept
        # agreement in absolute terms there
        assert (
            relative_error(analytic, numeric) < 1e-3 or abs(analytic - numeric) < 1e-9
        ), (group, index, analytic, numeric)

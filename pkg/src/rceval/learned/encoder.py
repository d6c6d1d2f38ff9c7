"""Encoder contract and a small self-contained transformer implementation.

The trainable metric only assumes the ``Encoder`` interface: a tokenizer,
a hidden size, a length budget, and a batched forward pass returning one
hidden state per input position (position 0 is the pooled representation).
``TinyTransformerEncoder`` is a from-scratch numpy implementation with an
explicit backward pass, sized for desk-scale training and gradient
checking; a full-scale pretrained encoder can be plugged in behind the
same contract.

Everything runs in float64 for determinism and stable finite-difference
checks.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .tokenizer import HashTokenizer


class Encoder:
    """Contract: see module docstring. Subclasses own their parameters."""

    hidden_size: int
    max_len: int
    tokenizer: HashTokenizer

    def forward_batch(self, ids: np.ndarray, mask: np.ndarray):
        """(B, T) int ids and 0/1 mask -> ((B, T, d) hidden states, cache)."""
        raise NotImplementedError

    def backward_batch(self, cache, d_hidden: np.ndarray) -> dict[str, np.ndarray]:
        """Gradient of a scalar loss w.r.t. parameters, given d(hidden)."""
        raise NotImplementedError

    def params(self) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def get_state(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params().items()}

    def set_state(self, state: Mapping[str, np.ndarray]) -> None:
        params = self.params()
        if set(params) != set(state):
            raise ValueError("parameter names do not match this encoder")
        for k, v in params.items():
            v[...] = state[k]

    def describe(self) -> dict:
        raise NotImplementedError


def _gelu(x):
    # tanh approximation; smooth and self-contained
    c = math.sqrt(2.0 / math.pi)
    u = c * (x + 0.044715 * x**3)
    return 0.5 * x * (1.0 + np.tanh(u))


def _gelu_grad(x):
    c = math.sqrt(2.0 / math.pi)
    u = c * (x + 0.044715 * x**3)
    t = np.tanh(u)
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * c * (1.0 + 3 * 0.044715 * x**2)


class TinyTransformerEncoder(Encoder):
    def __init__(
        self,
        vocab_size: int = 2048,
        hidden_size: int = 32,
        num_layers: int = 2,
        num_heads: int = 4,
        ffn_size: int = 64,
        max_len: int = 128,
        seed: int = 0,
    ):
        if hidden_size % num_heads:
            raise ValueError("hidden_size must be divisible by num_heads")
        self.vocab_size = vocab_size
        self.hidden_size = hidden_size
        self.num_layers = num_layers
        self.num_heads = num_heads
        self.ffn_size = ffn_size
        self.max_len = max_len
        self.seed = seed
        self.tokenizer = HashTokenizer(vocab_size)

        rng = np.random.default_rng(seed)
        d, f = hidden_size, ffn_size

        def w(*shape):
            return rng.normal(0.0, 0.02, size=shape)

        self._p: dict[str, np.ndarray] = {
            "tok_emb": w(vocab_size, d),
            "pos_emb": w(max_len, d),
            "emb_ln_g": np.ones(d),
            "emb_ln_b": np.zeros(d),
        }
        for i in range(num_layers):
            self._p.update(
                {
                    f"l{i}.wq": w(d, d), f"l{i}.bq": np.zeros(d),
                    f"l{i}.wk": w(d, d), f"l{i}.bk": np.zeros(d),
                    f"l{i}.wv": w(d, d), f"l{i}.bv": np.zeros(d),
                    f"l{i}.wo": w(d, d), f"l{i}.bo": np.zeros(d),
                    f"l{i}.ln1_g": np.ones(d), f"l{i}.ln1_b": np.zeros(d),
                    f"l{i}.w1": w(d, f), f"l{i}.b1": np.zeros(f),
                    f"l{i}.w2": w(f, d), f"l{i}.b2": np.zeros(d),
                    f"l{i}.ln2_g": np.ones(d), f"l{i}.ln2_b": np.zeros(d),
                }
            )

    def params(self) -> dict[str, np.ndarray]:
        return self._p

    def describe(self) -> dict:
        return {
            "type": "tiny_transformer",
            "vocab_size": self.vocab_size,
            "hidden_size": self.hidden_size,
            "num_layers": self.num_layers,
            "num_heads": self.num_heads,
            "ffn_size": self.ffn_size,
            "max_len": self.max_len,
            "seed": self.seed,
        }

    @classmethod
    def from_description(cls, desc: dict) -> "TinyTransformerEncoder":
        if desc.get("type") != "tiny_transformer":
            raise ValueError(f"not a tiny_transformer description: {desc.get('type')!r}")
        return cls(
            vocab_size=desc["vocab_size"],
            hidden_size=desc["hidden_size"],
            num_layers=desc["num_layers"],
            num_heads=desc["num_heads"],
            ffn_size=desc["ffn_size"],
            max_len=desc["max_len"],
            seed=desc["seed"],
        )

    # --- layer norm over the last axis ---

    @staticmethod
    def _ln_forward(x, g, b, eps=1e-6):
        mu = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + eps)
        xhat = (x - mu) * inv
        return xhat * g + b, (xhat, inv, g)

    @staticmethod
    def _ln_backward(d_out, cache):
        xhat, inv, g = cache
        d_g = (d_out * xhat).sum(axis=tuple(range(d_out.ndim - 1)))
        d_b = d_out.sum(axis=tuple(range(d_out.ndim - 1)))
        d_xhat = d_out * g
        n = xhat.shape[-1]
        d_x = inv * (
            d_xhat
            - d_xhat.mean(axis=-1, keepdims=True)
            - xhat * (d_xhat * xhat).mean(axis=-1, keepdims=True)
        )
        return d_x, d_g, d_b

    def forward_batch(self, ids: np.ndarray, mask: np.ndarray):
        p = self._p
        B, T = ids.shape
        if T > self.max_len:
            raise ValueError(f"sequence length {T} exceeds max_len {self.max_len}")
        h = self.num_heads
        d = self.hidden_size
        dk = d // h

        x_in = p["tok_emb"][ids] + p["pos_emb"][:T]
        x, emb_ln_cache = self._ln_forward(x_in, p["emb_ln_g"], p["emb_ln_b"])

        # additive mask on attention logits: padded keys get -inf-ish
        neg = (1.0 - mask)[:, None, None, :] * -1e30

        layer_caches = []
        for i in range(self.num_layers):
            q = x @ p[f"l{i}.wq"] + p[f"l{i}.bq"]
            k = x @ p[f"l{i}.wk"] + p[f"l{i}.bk"]
            v = x @ p[f"l{i}.wv"] + p[f"l{i}.bv"]
            qh = q.reshape(B, T, h, dk).transpose(0, 2, 1, 3)
            kh = k.reshape(B, T, h, dk).transpose(0, 2, 1, 3)
            vh = v.reshape(B, T, h, dk).transpose(0, 2, 1, 3)
            scores = qh @ kh.transpose(0, 1, 3, 2) / math.sqrt(dk) + neg
            scores -= scores.max(axis=-1, keepdims=True)
            attn = np.exp(scores)
            attn /= attn.sum(axis=-1, keepdims=True)
            ctx = attn @ vh  # (B, h, T, dk)
            ctx_flat = ctx.transpose(0, 2, 1, 3).reshape(B, T, d)
            attn_out = ctx_flat @ p[f"l{i}.wo"] + p[f"l{i}.bo"]
            r1 = x + attn_out
            x1, ln1_cache = self._ln_forward(r1, p[f"l{i}.ln1_g"], p[f"l{i}.ln1_b"])
            f1 = x1 @ p[f"l{i}.w1"] + p[f"l{i}.b1"]
            g1 = _gelu(f1)
            f2 = g1 @ p[f"l{i}.w2"] + p[f"l{i}.b2"]
            r2 = x1 + f2
            x2, ln2_cache = self._ln_forward(r2, p[f"l{i}.ln2_g"], p[f"l{i}.ln2_b"])
            layer_caches.append(
                (x, qh, kh, vh, attn, ctx_flat, x1, f1, g1, ln1_cache, ln2_cache)
            )
            x = x2

        cache = (ids, mask, emb_ln_cache, layer_caches, (B, T))
        return x, cache

    def backward_batch(self, cache, d_hidden: np.ndarray) -> dict[str, np.ndarray]:
        p = self._p
        ids, mask, emb_ln_cache, layer_caches, (B, T) = cache
        h = self.num_heads
        d = self.hidden_size
        dk = d // h
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        dx = d_hidden

        for i in reversed(range(self.num_layers)):
            (x, qh, kh, vh, attn, ctx_flat, x1, f1, g1, ln1_cache, ln2_cache) = layer_caches[i]

            d_r2, d_g, d_b = self._ln_backward(dx, ln2_cache)
            grads[f"l{i}.ln2_g"] += d_g
            grads[f"l{i}.ln2_b"] += d_b

            d_x1 = d_r2.copy()
            d_f2 = d_r2
            grads[f"l{i}.w2"] += np.einsum("btf,btd->fd", g1, d_f2)
            grads[f"l{i}.b2"] += d_f2.sum(axis=(0, 1))
            d_g1 = d_f2 @ p[f"l{i}.w2"].T
            d_f1 = d_g1 * _gelu_grad(f1)
            grads[f"l{i}.w1"] += np.einsum("btd,btf->df", x1, d_f1)
            grads[f"l{i}.b1"] += d_f1.sum(axis=(0, 1))
            d_x1 += d_f1 @ p[f"l{i}.w1"].T

            d_r1, d_g, d_b = self._ln_backward(d_x1, ln1_cache)
            grads[f"l{i}.ln1_g"] += d_g
            grads[f"l{i}.ln1_b"] += d_b

            d_x = d_r1.copy()
            d_attn_out = d_r1
            grads[f"l{i}.wo"] += np.einsum("btd,bte->de", ctx_flat, d_attn_out)
            grads[f"l{i}.bo"] += d_attn_out.sum(axis=(0, 1))
            d_ctx_flat = d_attn_out @ p[f"l{i}.wo"].T
            d_ctx = d_ctx_flat.reshape(B, T, h, dk).transpose(0, 2, 1, 3)

            d_attn = d_ctx @ vh.transpose(0, 1, 3, 2)
            d_vh = attn.transpose(0, 1, 3, 2) @ d_ctx
            d_scores = attn * (d_attn - (d_attn * attn).sum(axis=-1, keepdims=True))
            d_scores /= math.sqrt(dk)
            d_qh = d_scores @ kh
            d_kh = d_scores.transpose(0, 1, 3, 2) @ qh

            d_q = d_qh.transpose(0, 2, 1, 3).reshape(B, T, d)
            d_k = d_kh.transpose(0, 2, 1, 3).reshape(B, T, d)
            d_v = d_vh.transpose(0, 2, 1, 3).reshape(B, T, d)

            grads[f"l{i}.wq"] += np.einsum("btd,bte->de", x, d_q)
            grads[f"l{i}.bq"] += d_q.sum(axis=(0, 1))
            grads[f"l{i}.wk"] += np.einsum("btd,bte->de", x, d_k)
            grads[f"l{i}.bk"] += d_k.sum(axis=(0, 1))
            grads[f"l{i}.wv"] += np.einsum("btd,bte->de", x, d_v)
            grads[f"l{i}.bv"] += d_v.sum(axis=(0, 1))

            d_x += d_q @ p[f"l{i}.wq"].T
            d_x += d_k @ p[f"l{i}.wk"].T
            d_x += d_v @ p[f"l{i}.wv"].T
            dx = d_x

        d_x_in, d_g, d_b = self._ln_backward(dx, emb_ln_cache)
        grads["emb_ln_g"] += d_g
        grads["emb_ln_b"] += d_b
        np.add.at(grads["tok_emb"], ids, d_x_in)
        grads["pos_emb"][:T] += d_x_in.sum(axis=0)
        return grads

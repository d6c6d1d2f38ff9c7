"""Output heads on the pooled representation.

The regression head is a single linear map to one score; its bias starts
at the judgment-scale midpoint (3.0) and can be disabled entirely for the
strict no-bias form. The classification head maps to 3 logits for the
answer-pair pre-training task.
"""

from __future__ import annotations

import numpy as np


class RegressionHead:
    def __init__(self, hidden_size: int, use_bias: bool = True, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.hidden_size = hidden_size
        self.use_bias = use_bias
        self.w = rng.normal(0.0, 0.02, size=hidden_size)
        self.b = np.array([3.0 if use_bias else 0.0])

    def params(self) -> dict[str, np.ndarray]:
        out = {"head.w": self.w}
        if self.use_bias:
            out["head.b"] = self.b
        return out

    def forward(self, pooled: np.ndarray) -> np.ndarray:
        """(B, d) pooled states -> (B,) raw scores."""
        return pooled @ self.w + self.b[0]

    def loss_and_grads(self, pooled: np.ndarray, targets: np.ndarray):
        """Mean squared error; returns (loss, grads, d_pooled)."""
        pred = self.forward(pooled)
        err = pred - targets
        n = len(targets)
        loss = float(np.mean(err * err))
        d_pred = 2.0 * err / n
        grads = {"head.w": pooled.T @ d_pred}
        if self.use_bias:
            grads["head.b"] = np.array([d_pred.sum()])
        d_pooled = np.outer(d_pred, self.w)
        return loss, grads, d_pooled

    def describe(self) -> dict:
        return {"type": "regression", "hidden_size": self.hidden_size, "use_bias": self.use_bias}


class ClassificationHead:
    N_CLASSES = 3

    def __init__(self, hidden_size: int, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.hidden_size = hidden_size
        self.w = rng.normal(0.0, 0.02, size=(self.N_CLASSES, hidden_size))
        self.b = np.zeros(self.N_CLASSES)

    def params(self) -> dict[str, np.ndarray]:
        return {"head.w": self.w, "head.b": self.b}

    def forward(self, pooled: np.ndarray) -> np.ndarray:
        """(B, d) pooled states -> (B, 3) logits."""
        return pooled @ self.w.T + self.b

    @staticmethod
    def softmax(logits: np.ndarray) -> np.ndarray:
        shifted = logits - logits.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=-1, keepdims=True)

    def loss_and_grads(self, pooled: np.ndarray, labels: np.ndarray):
        """Mean cross-entropy over int labels; returns (loss, grads, d_pooled)."""
        logits = self.forward(pooled)
        probs = self.softmax(logits)
        n = len(labels)
        loss = float(-np.mean(np.log(probs[np.arange(n), labels] + 1e-300)))
        d_logits = probs.copy()
        d_logits[np.arange(n), labels] -= 1.0
        d_logits /= n
        grads = {
            "head.w": d_logits.T @ pooled,
            "head.b": d_logits.sum(axis=0),
        }
        d_pooled = d_logits @ self.w
        return loss, grads, d_pooled

    def describe(self) -> dict:
        return {"type": "classification", "hidden_size": self.hidden_size}

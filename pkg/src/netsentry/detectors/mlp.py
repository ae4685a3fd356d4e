"""Multilayer perceptron scorer: ReLU hidden layers, sigmoid output.

Trained with minibatch gradient descent on binary cross-entropy, early
stopping on validation loss with a best-snapshot rollback. The loss is
computed on logits via softplus(z) - y*z, which keeps gradients smooth for
the finite-difference checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError

Params = list[tuple[np.ndarray, np.ndarray]]  # (weight, bias) per layer


@dataclass(frozen=True)
class MlpConfig:
    hidden_layers: tuple[int, ...] = (256, 128, 64)
    learning_rate: float = 1e-3
    batch_size: int = 256
    max_epochs: int = 200
    patience: int = 10
    seed: int = 0


def init_params(n_features: int, hidden: tuple[int, ...], rng: np.random.Generator) -> Params:
    """He-scaled init for ReLU layers, Glorot-ish for the output layer."""
    sizes = (n_features, *hidden, 1)
    params: Params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = math.sqrt(2.0 / fan_in)
        params.append((rng.normal(0.0, scale, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return params


def _forward(params: Params, X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Returns (logits, per-layer post-ReLU activations including the input)."""
    acts = [X]
    a = X
    for W, b in params[:-1]:
        a = np.maximum(a @ W + b, 0.0)
        acts.append(a)
    W, b = params[-1]
    z = (a @ W + b).ravel()
    return z, acts


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, z)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def bce_loss(params: Params, X: np.ndarray, y: np.ndarray) -> float:
    z, _ = _forward(params, X)
    return float(np.mean(_softplus(z) - y * z))


def loss_and_grads(
    params: Params, X: np.ndarray, y: np.ndarray
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Mean BCE and its analytic gradients for every weight and bias."""
    z, acts = _forward(params, X)
    n = len(y)
    loss = float(np.mean(_softplus(z) - y * z))
    delta = ((_sigmoid(z) - y) / n)[:, None]
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(params)  # type: ignore[list-item]
    for layer in range(len(params) - 1, -1, -1):
        a_prev = acts[layer]
        grads[layer] = (a_prev.T @ delta, delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ params[layer][0].T) * (acts[layer] > 0.0)
    return loss, grads


@dataclass(frozen=True)
class MlpModel:
    params: tuple[tuple[np.ndarray, np.ndarray], ...]
    config: MlpConfig
    n_features: int
    epochs_trained: int = 0
    best_val_loss: float = math.inf
    kind: str = field(default="mlp")

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        z, _ = _forward(list(self.params), X)
        return _sigmoid(z)

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.atleast_2d(x))[0])


def train_mlp(
    X: np.ndarray,
    y: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    cfg: MlpConfig = MlpConfig(),
) -> MlpModel:
    """Minibatch GD with early stopping; returns the best-validation snapshot."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    X_val = np.ascontiguousarray(X_val, dtype=np.float64)
    y_val = np.asarray(y_val, dtype=np.float64)
    if len(y) == 0 or len(y_val) == 0:
        raise DataError("MLP training needs non-empty train and validation sets")

    rng = np.random.default_rng(cfg.seed)
    params = init_params(X.shape[1], cfg.hidden_layers, rng)

    best = [(W.copy(), b.copy()) for W, b in params]
    best_loss = bce_loss(params, X_val, y_val)
    epochs_since_best = 0
    epoch = 0
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(y))
        for start in range(0, len(y), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            loss, grads = loss_and_grads(params, X[batch], y[batch])
            if not math.isfinite(loss):
                raise DataError(f"non-finite training loss at epoch {epoch}")
            params = [
                (W - cfg.learning_rate * dW, b - cfg.learning_rate * db)
                for (W, b), (dW, db) in zip(params, grads)
            ]
        val_loss = bce_loss(params, X_val, y_val)
        if not math.isfinite(val_loss):
            raise DataError(f"non-finite validation loss at epoch {epoch}")
        if val_loss < best_loss:
            best_loss = val_loss
            best = [(W.copy(), b.copy()) for W, b in params]
            epochs_since_best = 0
        else:
            epochs_since_best += 1
            if epochs_since_best >= cfg.patience:
                break

    return MlpModel(
        params=tuple((W, b) for W, b in best),
        config=cfg,
        n_features=X.shape[1],
        epochs_trained=epoch,
        best_val_loss=best_loss,
    )

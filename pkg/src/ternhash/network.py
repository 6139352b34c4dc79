"""Dense feature network with a ternary hash head, trained by SGD with momentum.

Layout: input -> hidden dense layers with max(0, .) -> hash layer of width d,
squashed onto (-1, 1) by tanh so the ternary activation's premise holds ->
smoothed ternary activation -> linear classifier. Cross-entropy is applied to
the classifier output; the sharpness exponent k steps up between epochs.

Everything runs in float64 on the CPU and is bit-deterministic for a fixed
seed. Checkpoints store parameters as little-endian float32.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .activation import (
    ActivationConfig,
    ContinuationSchedule,
    hard_ternary,
    schedule_k,
    smooth_ternary,
    smooth_ternary_grad,
)

_CHECKPOINT_MAGIC = b"TNH1"


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    hidden_dims: tuple = (256, 256)
    code_dim: int = 16
    num_classes: int = 10
    activation: ActivationConfig = ActivationConfig()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))
        dims = (self.input_dim, *self.hidden_dims, self.code_dim, self.num_classes)
        if any(not isinstance(v, int) or v < 1 for v in dims):
            raise ValueError(f"all layer dims must be positive integers, got {dims}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def layer_dims(self) -> tuple:
        """Widths of consecutive layers, input first, classifier last."""
        return (self.input_dim, *self.hidden_dims, self.code_dim, self.num_classes)


@dataclass
class Network:
    """Dense layers as parallel weight/bias lists; the last two are hash layer and classifier."""

    config: NetworkConfig
    weights: list
    biases: list

    def __post_init__(self):
        dims = self.config.layer_dims
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ValueError(f"expected {len(dims) - 1} layers, got {len(self.weights)} weights")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i], dims[i + 1]) or b.shape != (dims[i + 1],):
                raise ValueError(f"layer {i} shapes {w.shape}/{b.shape} do not chain {dims[i]}->{dims[i + 1]}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i} has non-finite parameters")

    @classmethod
    def initialize(cls, config: NetworkConfig) -> "Network":
        """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, seeded."""
        rng = np.random.default_rng(config.seed)
        dims = config.layer_dims
        weights, biases = [], []
        for fan_in, fan_out in zip(dims, dims[1:]):
            lim = math.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(config=config, weights=weights, biases=biases)

    def params(self) -> list:
        """Live parameter arrays, interleaved W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


def _check_batch(net: Network, batch) -> np.ndarray:
    arr = np.asarray(batch, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] != net.config.input_dim:
        raise ValueError(f"batch must be non-empty [B x {net.config.input_dim}], got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("batch must be finite")
    return arr


def _check_labels(labels, batch_size: int, num_classes: int) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.shape != (batch_size,):
        raise ValueError(f"labels must be [{batch_size}], got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"labels must be integers, got dtype {arr.dtype}")
    if arr.min() < 0 or arr.max() >= num_classes:
        raise ValueError(f"labels must lie in [0, {num_classes})")
    return arr


def _forward_cached(net: Network, batch: np.ndarray, k):
    n_hidden = len(net.config.hidden_dims)
    h = batch
    pre_relu = []
    hidden_in = []
    for i in range(n_hidden):
        hidden_in.append(h)
        z = h @ net.weights[i] + net.biases[i]
        pre_relu.append(z)
        h = np.maximum(z, 0.0)
    s = h @ net.weights[n_hidden] + net.biases[n_hidden]
    hash_pre = np.tanh(s)
    if k is None:
        hash_act = hash_pre
    else:
        hash_act = smooth_ternary(hash_pre, ActivationConfig(net.config.activation.alpha, k))
    logits = hash_act @ net.weights[n_hidden + 1] + net.biases[n_hidden + 1]
    return hidden_in, pre_relu, h, hash_pre, hash_act, logits


def forward(net: Network, batch, k):
    """Run a batch through the net at exponent k.

    Returns (hash_pre, hash_act, logits). hash_pre is the tanh-squashed hash
    layer in (-1, 1); hash_act applies the smoothed ternary map to it, or is
    hash_pre itself when k is None (the plain-feature variant the two-step
    baseline trains).
    """
    arr = _check_batch(net, batch)
    _, _, _, hash_pre, hash_act, logits = _forward_cached(net, arr, k)
    return hash_pre, hash_act, logits


def cross_entropy(logits, labels) -> float:
    """Mean over the batch of -log softmax(logits)[label], max-subtracted."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2 or logits.shape[0] == 0:
        raise ValueError(f"logits must be non-empty [B x C], got shape {logits.shape}")
    labels = _check_labels(labels, logits.shape[0], logits.shape[1])
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(labels.size), labels].mean())


def _loss_and_grads(net: Network, batch: np.ndarray, labels: np.ndarray, k):
    n_hidden = len(net.config.hidden_dims)
    hidden_in, pre_relu, h_last, hash_pre, hash_act, logits = _forward_cached(net, batch, k)
    b_size = batch.shape[0]

    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    softmax = exp / exp.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(exp.sum(axis=1, keepdims=True))
    loss = float(-log_probs[np.arange(b_size), labels].mean())

    dlogits = softmax.copy()
    dlogits[np.arange(b_size), labels] -= 1.0
    dlogits /= b_size

    grads = [None] * (2 * (n_hidden + 2))
    grads[2 * (n_hidden + 1)] = hash_act.T @ dlogits
    grads[2 * (n_hidden + 1) + 1] = dlogits.sum(axis=0)

    d_act = dlogits @ net.weights[n_hidden + 1].T
    if k is None:
        d_pre = d_act
    else:
        d_pre = d_act * smooth_ternary_grad(hash_pre, ActivationConfig(net.config.activation.alpha, k))
    d_s = d_pre * (1.0 - hash_pre**2)
    grads[2 * n_hidden] = h_last.T @ d_s
    grads[2 * n_hidden + 1] = d_s.sum(axis=0)

    d_h = d_s @ net.weights[n_hidden].T
    for i in reversed(range(n_hidden)):
        d_z = d_h * (pre_relu[i] > 0.0)
        grads[2 * i] = hidden_in[i].T @ d_z
        grads[2 * i + 1] = d_z.sum(axis=0)
        if i:
            d_h = d_z @ net.weights[i].T
    return loss, grads


def backward(net: Network, batch, labels, k) -> list:
    """Exact gradients of cross_entropy(forward(...)) for every parameter, in params() order."""
    arr = _check_batch(net, batch)
    labs = _check_labels(labels, arr.shape[0], net.config.num_classes)
    _, grads = _loss_and_grads(net, arr, labs, k)
    return grads


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 150
    batch_size: int = 64
    lr0: float = 1e-3
    momentum: float = 0.9
    weight_decay: float = 1e-4
    schedule: ContinuationSchedule = ContinuationSchedule()

    def __post_init__(self):
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise ValueError(f"batch_size must be a positive integer, got {self.batch_size!r}")
        if not math.isfinite(self.lr0) or self.lr0 < 0:
            raise ValueError(f"lr0 must be a non-negative real, got {self.lr0!r}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must lie in [0, 1), got {self.momentum!r}")
        if not math.isfinite(self.weight_decay) or self.weight_decay < 0:
            raise ValueError(f"weight_decay must be a non-negative real, got {self.weight_decay!r}")
        if self.schedule.total_epochs < self.epochs:
            raise ValueError(
                f"schedule covers {self.schedule.total_epochs} epochs but training runs {self.epochs}"
            )


@dataclass
class TrainState:
    """Momentum buffers plus the loop position, for stepwise drivers."""

    velocity: list
    epoch: int = 0
    k: int | None = None
    rng: np.random.Generator = field(default_factory=np.random.default_rng)


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    k: int | None
    lr: float
    loss: float
    quant_error: float


def cosine_lr(epoch: int, train_cfg: TrainConfig) -> float:
    """lr0 * 0.5 * (1 + cos(pi * epoch / epochs))."""
    if not isinstance(epoch, int) or epoch < 0 or epoch >= train_cfg.epochs:
        raise ValueError(f"epoch must be in [0, {train_cfg.epochs}), got {epoch!r}")
    return train_cfg.lr0 * 0.5 * (1.0 + math.cos(math.pi * epoch / train_cfg.epochs))


def sgd_momentum_step(net: Network, state: TrainState, grads: list, lr: float, momentum: float, weight_decay: float):
    """In-place update: v <- momentum*v + (grad + wd*param); param <- param - lr*v.

    Decay hits weights and biases alike.
    """
    params = net.params()
    if len(grads) != len(params) or len(state.velocity) != len(params):
        raise ValueError("gradient/velocity lists do not match the parameter list")
    for p, v, g in zip(params, state.velocity, grads):
        if g.shape != p.shape or v.shape != p.shape:
            raise ValueError(f"shape mismatch: param {p.shape}, grad {g.shape}, velocity {v.shape}")
        v *= momentum
        v += g + weight_decay * p
        p -= lr * v
    return net, state


def quantization_error(net: Network, features, k) -> float:
    """Mean |activation - hard quantization| of the hash layer over a feature set."""
    hash_pre, hash_act, _ = forward(net, features, k)
    return float(np.abs(hash_act - hard_ternary(hash_pre, net.config.activation.alpha)).mean())


def hash_features(net: Network, features) -> np.ndarray:
    """Squashed hash-layer outputs in (-1, 1), the values the quantizer thresholds."""
    hash_pre, _, _ = forward(net, features, None)
    return hash_pre


def train(net_cfg: NetworkConfig, train_cfg: TrainConfig, features, labels, *, ternary: bool = True, epoch_hook=None):
    """Train a fresh network; returns (network, per-epoch logs).

    With ternary=True the hash head runs the smoothed ternary activation at
    the scheduled exponent; with ternary=False it is the identity (the
    learn-features-then-threshold baseline). Deterministic for a fixed seed:
    one RNG stream initializes parameters, an independent same-seeded stream
    drives the per-epoch reshuffle. The last short batch of an epoch is kept.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] == 0:
        raise ValueError(f"features must be a non-empty [N x dim] matrix, got shape {feats.shape}")
    if feats.shape[1] != net_cfg.input_dim:
        raise ValueError(f"features have dim {feats.shape[1]}, config expects {net_cfg.input_dim}")
    labs = _check_labels(labels, feats.shape[0], net_cfg.num_classes)

    net = Network.initialize(net_cfg)
    state = TrainState(
        velocity=[np.zeros_like(p) for p in net.params()],
        rng=np.random.default_rng(net_cfg.seed),
    )
    n = feats.shape[0]
    logs = []
    for epoch in range(train_cfg.epochs):
        k = schedule_k(epoch, train_cfg.schedule) if ternary else None
        lr = cosine_lr(epoch, train_cfg)
        perm = state.rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, train_cfg.batch_size):
            idx = perm[start : start + train_cfg.batch_size]
            loss, grads = _loss_and_grads(net, feats[idx], labs[idx], k)
            sgd_momentum_step(net, state, grads, lr, train_cfg.momentum, train_cfg.weight_decay)
            loss_sum += loss * idx.size
        state.epoch = epoch + 1
        state.k = k
        entry = EpochLog(
            epoch=epoch,
            k=k,
            lr=lr,
            loss=loss_sum / n,
            quant_error=quantization_error(net, feats, k),
        )
        if not (math.isfinite(entry.loss) and math.isfinite(entry.quant_error)):
            raise FloatingPointError(f"non-finite training metrics at epoch {epoch}: {entry}")
        logs.append(entry)
        if epoch_hook is not None:
            epoch_hook(net, entry)
    return net, logs


def save_checkpoint(path, net: Network, schedule: ContinuationSchedule) -> None:
    """Write magic 'TNH1', the config block, then float32 little-endian parameters.

    Config block: u32 input_dim, u32 hidden-layer count, u32 per hidden dim,
    u32 code_dim, u32 num_classes, u64 seed, f64 alpha, u32 activation k,
    u32 k_start, u32 k_end, u32 stride_epochs, u32 total_epochs.
    """
    cfg = net.config
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", cfg.input_dim, len(cfg.hidden_dims)))
        fh.write(struct.pack(f"<{len(cfg.hidden_dims)}I", *cfg.hidden_dims))
        fh.write(struct.pack("<IIQ", cfg.code_dim, cfg.num_classes, cfg.seed))
        fh.write(struct.pack("<dIIIII", cfg.activation.alpha, cfg.activation.k,
                             schedule.k_start, schedule.k_end, schedule.stride_epochs, schedule.total_epochs))
        for p in net.params():
            fh.write(p.astype("<f4").tobytes())


def load_checkpoint(path):
    """Inverse of save_checkpoint; returns (Network, ContinuationSchedule)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CHECKPOINT_MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_CHECKPOINT_MAGIC!r}")
        input_dim, n_hidden = struct.unpack("<II", fh.read(8))
        hidden_dims = struct.unpack(f"<{n_hidden}I", fh.read(4 * n_hidden))
        code_dim, num_classes, seed = struct.unpack("<IIQ", fh.read(16))
        alpha, k, k_start, k_end, stride, total = struct.unpack("<dIIIII", fh.read(28))
        cfg = NetworkConfig(
            input_dim=input_dim,
            hidden_dims=hidden_dims,
            code_dim=code_dim,
            num_classes=num_classes,
            activation=ActivationConfig(alpha=alpha, k=k),
            seed=seed,
        )
        schedule = ContinuationSchedule(k_start=k_start, k_end=k_end, stride_epochs=stride, total_epochs=total)
        dims = cfg.layer_dims
        weights, biases = [], []
        for fan_in, fan_out in zip(dims, dims[1:]):
            w_raw = fh.read(4 * fan_in * fan_out)
            b_raw = fh.read(4 * fan_out)
            if len(w_raw) != 4 * fan_in * fan_out or len(b_raw) != 4 * fan_out:
                raise ValueError("truncated parameter payload")
            weights.append(np.frombuffer(w_raw, dtype="<f4").astype(np.float64).reshape(fan_in, fan_out))
            biases.append(np.frombuffer(b_raw, dtype="<f4").astype(np.float64))
        if fh.read(1):
            raise ValueError("trailing bytes after parameter payload")
    return Network(config=cfg, weights=weights, biases=biases), schedule

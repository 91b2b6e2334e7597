"""Hand-rolled policy-value MLP with skip connections.

The whole stack (forward, backprop, Adam) is plain numpy so the
gradients can be audited against finite differences.  Layout: an input
layer to ``width``, then ``depth - 1`` square hidden layers with a
residual add every ``skip`` layers, then a linear 53-wide head whose
first 52 outputs are card logits and whose last output is the value in
game points.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

MAGIC = b"GZPV0001"


class ModelCorruptError(RuntimeError):
    pass


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class NetConfig:
    depth: int = 16
    width: int = 512
    skip: int = 2
    lam: float = 0.01
    n_in: int = 434
    n_out: int = 53

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("depth must be at least 2")
        if self.skip < 1:
            raise ValueError("skip period must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class TrainingSample:
    input: np.ndarray
    target_policy: np.ndarray
    target_value: float
    legal_mask: np.ndarray


def stack_samples(samples):
    X = np.stack([s.input for s in samples])
    T = np.stack([s.target_policy for s in samples])
    V = np.array([s.target_value for s in samples], dtype=float)
    M = np.stack([s.legal_mask for s in samples])
    return X, T, V, M


def masked_policy(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Probabilities over the legal support only.

    Illegal logits are cut from the softmax entirely, so illegal
    probability is exactly 0 and no exp(0)=1 mass leaks in.
    """
    logits = np.asarray(logits, dtype=float)
    mask = np.asarray(mask, dtype=float)
    if logits.ndim == 1:
        return masked_policy(logits[None, :], mask[None, :])[0]
    if not (mask > 0).any(axis=1).all():
        raise ValueError("mask admits no legal move")
    z = np.where(mask > 0, logits, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def kl_divergence(target: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if target.ndim == 1:
        target, predicted = target[None, :], predicted[None, :]
    terms = np.where(
        target > 0,
        target * (np.log(np.maximum(target, 1e-300))
                  - np.log(np.maximum(predicted, 1e-300))),
        0.0)
    return terms.sum(axis=1)


class PolicyValueNet:
    def __init__(self, config: NetConfig = None, seed: int = 0,
                 dtype=np.float32):
        self.config = config or NetConfig()
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        c = self.config
        # depth counts hidden layers; the 53-wide head rides on top.
        dims = [c.n_in] + [c.width] * c.depth + [c.n_out]
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(
                -bound, bound, size=(fan_in, fan_out)).astype(self.dtype))
            self.biases.append(np.zeros(fan_out, dtype=self.dtype))

    # -- parameter plumbing ------------------------------------------------

    def params(self) -> List[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "PolicyValueNet":
        twin = PolicyValueNet.__new__(PolicyValueNet)
        twin.config = self.config
        twin.dtype = self.dtype
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        return twin

    def check_finite(self):
        for p in self.params():
            if not np.isfinite(p).all():
                raise ModelCorruptError("non-finite weights in model")

    # -- forward -----------------------------------------------------------

    def _forward_cache(self, X: np.ndarray):
        c = self.config
        X = np.asarray(X, dtype=self.dtype)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        acts = []  # hidden activations, post-relu
        zs = []
        h = X
        for i in range(c.depth):
            z = h @ self.weights[i] + self.biases[i]
            if i >= c.skip and i % c.skip == 0:
                z = z + acts[i - c.skip]
            a = np.maximum(z, 0)
            zs.append(z)
            acts.append(a)
            h = a
        out = h @ self.weights[-1] + self.biases[-1]
        return X, zs, acts, out, squeeze

    def forward_batch(self, X: np.ndarray):
        self.check_finite()
        _, _, _, out, squeeze = self._forward_cache(X)
        if not np.isfinite(out).all():
            raise ModelCorruptError("non-finite network output")
        logits, values = out[:, :52], out[:, 52]
        if squeeze:
            return logits[0], float(values[0])
        return logits, values

    def forward(self, x: np.ndarray):
        return self.forward_batch(np.asarray(x))

    # -- loss and gradients --------------------------------------------------

    def loss_and_grads(self, X, T, V, M):
        """Mean KL(target‖masked policy) + λ·|Δvalue|, with gradients."""
        c = self.config
        T = np.asarray(T, dtype=float)
        M = np.asarray(M, dtype=float)
        V = np.asarray(V, dtype=float)
        _validate_targets(T, M)
        X, zs, acts, out, _ = self._forward_cache(X)
        B = X.shape[0]
        logits = out[:, :52].astype(float)
        values = out[:, 52].astype(float)

        P = masked_policy(logits, M)
        kl = kl_divergence(T, P)
        dv = values - V
        loss = float(kl.mean() + c.lam * np.abs(dv).mean())

        d_out = np.empty_like(out, dtype=self.dtype)
        d_out[:, :52] = ((P - T) * (M > 0) / B).astype(self.dtype)
        d_out[:, 52] = (c.lam * np.sign(dv) / B).astype(self.dtype)

        gW = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        gW[-1] = acts[-1].T @ d_out
        gb[-1] = d_out.sum(axis=0)
        d_act = [np.zeros_like(a) for a in acts]
        d_act[-1] = d_out @ self.weights[-1].T
        for i in range(c.depth - 1, -1, -1):
            d_z = d_act[i] * (zs[i] > 0)
            below = X if i == 0 else acts[i - 1]
            gW[i] = below.T @ d_z
            gb[i] = d_z.sum(axis=0)
            if i > 0:
                d_act[i - 1] += d_z @ self.weights[i].T
            if i >= c.skip and i % c.skip == 0:
                d_act[i - c.skip] += d_z
        grads = []
        for w, b in zip(gW, gb):
            grads.extend((w, b))
        return loss, grads

    # -- persistence ---------------------------------------------------------

    def save(self, path):
        c = self.config
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<5I", c.depth, c.width, c.skip,
                                 c.n_in, c.n_out))
            fh.write(struct.pack("<d", c.lam))
            for p in self.params():
                fh.write(np.ascontiguousarray(p, dtype=np.float32).tobytes())

    @classmethod
    def load(cls, path) -> "PolicyValueNet":
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:8] != MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        depth, width, skip, n_in, n_out = struct.unpack_from("<5I", blob, 8)
        (lam,) = struct.unpack_from("<d", blob, 28)
        config = NetConfig(depth=depth, width=width, skip=skip, lam=lam,
                           n_in=n_in, n_out=n_out)
        net = cls(config, dtype=np.float32)
        offset = 36
        for p in net.params():
            nbytes = p.size * 4
            if offset + nbytes > len(blob):
                raise ValueError(f"{path}: truncated checkpoint")
            p[...] = np.frombuffer(
                blob, dtype="<f4", count=p.size, offset=offset,
            ).reshape(p.shape)
            offset += nbytes
        if offset != len(blob):
            raise ValueError(f"{path}: trailing bytes in checkpoint")
        net.check_finite()
        return net


def _validate_targets(T, M):
    sums = T.sum(axis=1)
    if not np.allclose(sums, 1.0, atol=1e-6):
        raise ValueError("target policy rows must sum to 1")
    if (T < -1e-12).any():
        raise ValueError("target policy entries must be non-negative")
    if (T[M <= 0] > 1e-12).any():
        raise ValueError("target policy puts mass on illegal moves")


def batch_loss(net: PolicyValueNet, X, T, V, M) -> float:
    T = np.asarray(T, dtype=float)
    M = np.asarray(M, dtype=float)
    _validate_targets(T, M)
    logits, values = net.forward_batch(np.asarray(X))
    kl = kl_divergence(T, masked_policy(logits.astype(float), M))
    dv = np.abs(values.astype(float) - np.asarray(V, dtype=float))
    return float(kl.mean() + net.config.lam * dv.mean())


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.3
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: Optional[List[np.ndarray]] = None
    v: Optional[List[np.ndarray]] = None
    initial_loss: Optional[float] = None
    history: List[float] = field(default_factory=list)


def train_step(net: PolicyValueNet, opt: AdamState, X, T, V, M,
               iterations: int = 3) -> float:
    """Run Adam for ``iterations`` passes over one batch; returns loss."""
    if opt.m is None:
        opt.m = [np.zeros_like(p) for p in net.params()]
        opt.v = [np.zeros_like(p) for p in net.params()]
    loss = None
    for _ in range(iterations):
        loss, grads = net.loss_and_grads(X, T, V, M)
        if opt.initial_loss is None:
            opt.initial_loss = loss
        if loss > 10 * opt.initial_loss + 1e-9:
            raise TrainingDivergedError(
                f"loss {loss:.4f} exceeds 10x initial {opt.initial_loss:.4f}")
        opt.t += 1
        bc1 = 1 - opt.beta1 ** opt.t
        bc2 = 1 - opt.beta2 ** opt.t
        for p, g, m, v in zip(net.params(), grads, opt.m, opt.v):
            g = g.astype(p.dtype)
            m[...] = opt.beta1 * m + (1 - opt.beta1) * g
            v[...] = opt.beta2 * v + (1 - opt.beta2) * g * g
            p -= (opt.lr * (m / bc1) / (np.sqrt(v / bc2) + opt.eps)).astype(
                p.dtype)
        opt.history.append(loss)
    return loss

"""Signature-feedback controls.

Two families: linear functionals of the truncated signature, and ReLU MLPs
acting on Lyndon coordinates of the log-signature.  Both expose a feature
map (so training loops can precompute features for a fixed path pool), a
forward pass with cache, and a parameter-gradient backward pass consuming
per-sample control adjoints.
"""

import json

import numpy as np

from .errors import ConfigError
from .tensor import LyndonBasis, tensor_log, total_words


class BoxProjection:
    """Coordinate-wise clamp onto a box; None bounds mean unbounded."""

    def __init__(self, lo=None, hi=None):
        self.lo = None if lo is None else np.atleast_1d(np.asarray(lo, float))
        self.hi = None if hi is None else np.atleast_1d(np.asarray(hi, float))
        if self.lo is not None and self.hi is not None \
                and np.any(self.lo > self.hi):
            raise ConfigError("box projection requires lo <= hi")

    @property
    def is_identity(self):
        return self.lo is None and self.hi is None

    def __call__(self, v):
        return np.clip(v, self.lo, self.hi) if not self.is_identity else v

    def active_mask(self, v_pre):
        """1.0 where the projection is locally the identity, 0.0 where clamped."""
        if self.is_identity:
            return np.ones_like(v_pre)
        mask = np.ones_like(v_pre)
        if self.lo is not None:
            mask *= v_pre > self.lo
        if self.hi is not None:
            mask *= v_pre < self.hi
        return mask


def _truncate(flat_sigs, dim, level):
    """Restrict a flat signature array to the policy's truncation level.

    Levels are stored consecutively, so a higher-level signature restricts
    to a prefix; a shorter array cannot be extended.
    """
    flat = np.asarray(flat_sigs, dtype=np.float64)
    p = total_words(dim, level)
    if flat.shape[-1] < p:
        raise ValueError(
            f"signature has {flat.shape[-1]} coefficients, policy needs {p}")
    return flat[..., :p]


class LinearPolicy:
    """u_i = <ell_i, S> followed by projection; parameters are the ell_i."""

    kind = "linear"

    def __init__(self, dim, level, n_controls=1, projection=None):
        self.dim = dim
        self.level = level
        self.n_controls = n_controls
        self.projection = projection or BoxProjection()
        self.coeffs = np.zeros((n_controls, total_words(dim, level)))

    @property
    def n_params(self):
        return self.coeffs.size

    def get_params(self):
        return self.coeffs.ravel().copy()

    def set_params(self, vec):
        self.coeffs = np.asarray(vec, float).reshape(self.coeffs.shape).copy()

    def features(self, flat_sigs):
        return _truncate(flat_sigs, self.dim, self.level)

    def forward(self, feat):
        pre = feat @ self.coeffs.T
        return self.projection(pre), (feat, pre)

    def evaluate(self, flat_sigs):
        return self.forward(self.features(flat_sigs))[0]

    def grad_params(self, cache, mu):
        """Gradient of sum_samples mu . u with respect to the flat parameters."""
        feat, pre = cache
        mu = mu * self.projection.active_mask(pre)
        return (mu.T @ feat).ravel()


class DeepPolicy:
    """ReLU MLP on Lyndon log-signature coordinates, then projection.

    Architecture A_0 o relu o A_1 o ... o relu o A_depth mapping
    eta -> hidden -> ... -> hidden -> n_controls.
    """

    kind = "deep"

    def __init__(self, dim, level, n_controls=1, hidden=None, depth=2,
                 projection=None, seed=0, zero_weights=False):
        self.dim = dim
        self.level = level
        self.n_controls = n_controls
        self.depth = depth
        self.projection = projection or BoxProjection()
        self.basis = LyndonBasis(dim, level)
        eta = self.basis.eta
        self.hidden = hidden if hidden is not None else 30 + eta
        sizes = [eta] + [self.hidden] * depth + [n_controls]
        rng = np.random.default_rng(seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            if zero_weights:
                w = np.zeros((fan_out, fan_in))
            else:
                w = rng.standard_normal((fan_out, fan_in)) * np.sqrt(2.0 / fan_in)
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    @property
    def n_params(self):
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def get_params(self):
        parts = [w.ravel() for w in self.weights] + [b for b in self.biases]
        return np.concatenate(parts)

    def set_params(self, vec):
        vec = np.asarray(vec, float)
        pos = 0
        for i, w in enumerate(self.weights):
            self.weights[i] = vec[pos:pos + w.size].reshape(w.shape).copy()
            pos += w.size
        for i, b in enumerate(self.biases):
            self.biases[i] = vec[pos:pos + b.size].copy()
            pos += b.size

    def features(self, flat_sigs):
        """Lyndon coordinates of log(S), batched."""
        flat = _truncate(flat_sigs, self.dim, self.level)
        return self.basis.coordinates(tensor_log(flat, self.dim, self.level))

    def forward(self, feat):
        h = feat
        acts = [h]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            if i < len(self.weights) - 1:
                h = np.maximum(z, 0.0)
            else:
                h = z
            acts.append(h)
        return self.projection(h), acts

    def evaluate(self, flat_sigs):
        return self.forward(self.features(flat_sigs))[0]

    def grad_params(self, cache, mu):
        acts = cache
        delta = mu * self.projection.active_mask(acts[-1])
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = delta.T @ acts[i]
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i]) * (acts[i] > 0.0)
        parts = [g.ravel() for g in grads_w] + grads_b
        return np.concatenate(parts)


def init_policy(kind, dim, level, n_controls=1, seed=0, projection=None,
                hidden=None, depth=2, zero_weights=False):
    """Construct a fresh policy; Linear starts at the null control."""
    if kind == "linear":
        return LinearPolicy(dim, level, n_controls, projection)
    if kind == "deep":
        return DeepPolicy(dim, level, n_controls, hidden=hidden, depth=depth,
                          projection=projection, seed=seed,
                          zero_weights=zero_weights)
    raise ConfigError(f"unknown policy kind '{kind}'")


def save_policy(policy, path):
    """Flat key-value dump (JSON) of architecture and parameters."""
    meta = {
        "kind": policy.kind,
        "dim": policy.dim,
        "level": policy.level,
        "n_controls": policy.n_controls,
        "params": policy.get_params().tolist(),
    }
    if policy.kind == "deep":
        meta["hidden"] = policy.hidden
        meta["depth"] = policy.depth
    proj = policy.projection
    meta["lo"] = None if proj.lo is None else proj.lo.tolist()
    meta["hi"] = None if proj.hi is None else proj.hi.tolist()
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=1)


def load_policy(path):
    with open(path) as fh:
        meta = json.load(fh)
    proj = BoxProjection(meta.get("lo"), meta.get("hi"))
    policy = init_policy(meta["kind"], meta["dim"], meta["level"],
                         meta["n_controls"], projection=proj,
                         hidden=meta.get("hidden"), depth=meta.get("depth", 2))
    policy.set_params(np.array(meta["params"]))
    return policy

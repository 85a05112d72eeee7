"""Named parameters, seeded initialization, Adam and gradient clipping."""
import zlib
from typing import Dict, Iterator, Tuple

import numpy as np

from viddial.errors import ConfigError, DimensionError
from viddial.numerics.tensor import Tensor


def substream(seed, name):
    """Independent generator for a named random stream under ``seed``."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode("utf-8"))])


class ParameterStore:
    """Name -> trainable tensor map with deterministic (sorted) iteration.

    Parameters are created lazily by :meth:`get`; each one draws its initial
    values from its own named random substream, so adding a parameter never
    perturbs the initialization of the others.
    """

    def __init__(self, seed=0, init_scale=0.08):
        self.seed = int(seed)
        self.init_scale = init_scale
        self._params: Dict[str, Tensor] = {}

    def get(self, name, shape, init="uniform"):
        shape = tuple(int(s) for s in shape)
        param = self._params.get(name)
        if param is not None:
            if param.shape != shape:
                raise DimensionError(f"parameter {name!r} has shape {param.shape}, requested {shape}")
            return param
        if init == "uniform":
            data = substream(self.seed, "init/" + name).uniform(-self.init_scale, self.init_scale, size=shape)
        elif init == "zeros":
            data = np.zeros(shape)
        else:
            raise ConfigError(f"unknown init {init!r}")
        param = Tensor(data, requires_grad=True, name=name)
        self._params[name] = param
        return param

    def register(self, name, tensor):
        """Adopt an existing tensor (e.g. pretrained embeddings) as a parameter."""
        if name in self._params:
            raise ConfigError(f"parameter {name!r} already exists")
        tensor.requires_grad = True
        tensor.name = name
        self._params[name] = tensor
        return tensor

    def __getitem__(self, name):
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def __len__(self):
        return len(self._params)

    def __iter__(self) -> Iterator[Tuple[str, Tensor]]:
        for name in sorted(self._params):
            yield name, self._params[name]

    def names(self):
        return sorted(self._params)

    def zero_grad(self):
        for p in self._params.values():
            p.grad = None

    def state_dict(self):
        return {name: p.data.copy() for name, p in self}

    def load_state_dict(self, state, strict=True):
        for name, arr in state.items():
            arr = np.asarray(arr, dtype=np.float64)
            if name in self._params:
                if self._params[name].shape != arr.shape:
                    raise DimensionError(f"parameter {name!r}: stored {arr.shape} vs model {self._params[name].shape}")
                self._params[name].data[...] = arr
            elif strict:
                raise ConfigError(f"unexpected parameter {name!r}")
            else:
                self._params[name] = Tensor(arr.copy(), requires_grad=True, name=name)

    def fill(self, value):
        for p in self._params.values():
            p.data[...] = value

    def num_elements(self):
        return sum(p.size for p in self._params.values())


def global_grad_norm(store: ParameterStore):
    total = 0.0
    for _, p in store:
        if p.grad is not None:
            total += float(np.sum(p.grad * p.grad))
    return float(np.sqrt(total))


def clip_grad_norm(store: ParameterStore, max_norm):
    """Scale all grads so their global L2 norm is at most ``max_norm``.

    Returns the norm measured before clipping.
    """
    norm = global_grad_norm(store)
    if norm > max_norm:
        scale = max_norm / norm
        for _, p in store:
            if p.grad is not None:
                p.grad *= scale
    return norm


class Adam:
    def __init__(self, store: ParameterStore, lr=1e-4, betas=(0.9, 0.999), eps=1e-8):
        if lr <= 0:
            raise ConfigError("learning rate must be positive")
        self.store = store
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}

    def step(self):
        """Apply one update from the accumulated grads, then zero them."""
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        corr1 = 1.0 - b1 ** self.t
        corr2 = 1.0 - b2 ** self.t
        for name, p in self.store:
            g = p.grad
            if g is None:
                continue
            m = self._m.get(name)
            if m is None:
                m = self._m[name] = np.zeros_like(p.data)
                self._v[name] = np.zeros_like(p.data)
            v = self._v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p.data -= self.lr * (m / corr1) / (np.sqrt(v / corr2) + self.eps)
        self.store.zero_grad()

"""
MIT License

Copyright (c) 2024-present Isabelle Phoebe <izzy@uwu.gal>

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final, Sequence

import numpy as np

from qtransduce.errors import InvalidArgument


__all__: Final[tuple[str, ...]] = (
    "MlpParams",
    "initialize",
    "zeros",
    "mlp_forward",
    "mlp_gradient",
    "mlp_backward",
)


@dataclass(frozen=True, slots=True, eq=False)
class MlpParams:
    """
    Weights and biases of a fully connected network. ``weights[k]`` has shape (out, in); hidden layers
    use ``tanh`` and the output layer is linear.

    Parameter gradients share this layout, so the same type carries both.
    """

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        weights = tuple(np.array(w, dtype=np.float64) for w in self.weights)
        biases = tuple(np.array(b, dtype=np.float64) for b in self.biases)
        if not weights or len(weights) != len(biases):
            raise InvalidArgument(f"expected matching weight and bias layers, got {len(weights)} and {len(biases)}")
        for index, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise InvalidArgument(f"layer {index}: weight {w.shape} does not match bias {b.shape}")
            if index and w.shape[1] != weights[index - 1].shape[0]:
                raise InvalidArgument(
                    f"layer {index} expects {w.shape[1]} inputs but layer {index - 1} produces "
                    f"{weights[index - 1].shape[0]}"
                )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def sizes(self) -> tuple[int, ...]:
        """Layer widths, input first."""
        return (self.weights[0].shape[1], *(w.shape[0] for w in self.weights))

    @property
    def finite(self) -> bool:
        return all(np.all(np.isfinite(w)) and np.all(np.isfinite(b)) for w, b in zip(self.weights, self.biases))

    def flat(self) -> np.ndarray:
        return np.concatenate([part.ravel() for w, b in zip(self.weights, self.biases) for part in (w, b)])

    @classmethod
    def from_flat(cls, sizes: Sequence[int], vector: np.ndarray) -> MlpParams:
        vector = np.asarray(vector, dtype=np.float64)
        expected = sum(n_out * (n_in + 1) for n_in, n_out in zip(sizes[:-1], sizes[1:]))
        if vector.shape != (expected,):
            raise InvalidArgument(f"expected {expected} parameters for sizes {tuple(sizes)}, got {vector.shape}")
        weights, biases, offset = [], [], 0
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            weights.append(vector[offset : offset + n_out * n_in].reshape(n_out, n_in))
            offset += n_out * n_in
            biases.append(vector[offset : offset + n_out])
            offset += n_out
        return cls(weights=tuple(weights), biases=tuple(biases))

    def step(self, gradient: MlpParams, rate: float) -> MlpParams:
        """``self + rate * gradient``."""
        return MlpParams(
            weights=tuple(w + rate * g for w, g in zip(self.weights, gradient.weights)),
            biases=tuple(b + rate * g for b, g in zip(self.biases, gradient.biases)),
        )

    def __add__(self, other: MlpParams) -> MlpParams:
        return self.step(other, 1.0)

    def scaled(self, factor: float) -> MlpParams:
        return MlpParams(
            weights=tuple(factor * w for w in self.weights),
            biases=tuple(factor * b for b in self.biases),
        )

    def same_as(self, other: MlpParams) -> bool:
        """Bitwise equality of every parameter."""
        return self.sizes == other.sizes and all(
            np.array_equal(a, b) for a, b in zip(self.weights + self.biases, other.weights + other.biases)
        )

    def to_dict(self) -> dict[str, list]:
        return {
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict[str, list]) -> MlpParams:
        return cls(
            weights=tuple(np.array(w, dtype=np.float64) for w in data["weights"]),
            biases=tuple(np.array(b, dtype=np.float64) for b in data["biases"]),
        )


def _check_sizes(sizes: Sequence[int]) -> None:
    if len(sizes) < 2 or min(sizes) < 1:
        raise InvalidArgument(f"network needs at least an input and an output layer, got sizes {tuple(sizes)}")


def initialize(sizes: Sequence[int], rng: np.random.Generator) -> MlpParams:
    """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases alike."""
    _check_sizes(sizes)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        limit = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-limit, limit, size=(n_out, n_in)))
        biases.append(rng.uniform(-limit, limit, size=n_out))
    return MlpParams(weights=tuple(weights), biases=tuple(biases))


def zeros(sizes: Sequence[int]) -> MlpParams:
    _check_sizes(sizes)
    return MlpParams(
        weights=tuple(np.zeros((n_out, n_in)) for n_in, n_out in zip(sizes[:-1], sizes[1:])),
        biases=tuple(np.zeros(n_out) for n_out in sizes[1:]),
    )


def _check_input(p: MlpParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.sizes[0],):
        raise InvalidArgument(f"network expects input of shape ({p.sizes[0]},), got {x.shape}")
    return x


def _activations(p: MlpParams, x: np.ndarray) -> list[np.ndarray]:
    layers = [x]
    last = len(p.weights) - 1
    for index, (w, b) in enumerate(zip(p.weights, p.biases)):
        z = w @ layers[-1] + b
        layers.append(z if index == last else np.tanh(z))
    return layers


def mlp_forward(p: MlpParams, x: np.ndarray) -> np.ndarray:
    return _activations(p, _check_input(p, x))[-1]


def mlp_backward(p: MlpParams, x: np.ndarray, upstream: np.ndarray) -> tuple[MlpParams, np.ndarray]:
    """
    Reverse-mode pass for ``upstream = dL/d(output)``.

    Returns the parameter gradients and ``dL/d(input)``.
    """
    layers = _activations(p, _check_input(p, x))
    g = np.asarray(upstream, dtype=np.float64)
    if g.shape != (p.sizes[-1],):
        raise InvalidArgument(f"upstream gradient must have shape ({p.sizes[-1]},), got {g.shape}")

    weight_grads: list[np.ndarray] = []
    bias_grads: list[np.ndarray] = []
    for index in reversed(range(len(p.weights))):
        weight_grads.append(np.outer(g, layers[index]))
        bias_grads.append(g.copy())
        g = p.weights[index].T @ g
        if index:
            g = g * (1.0 - layers[index] ** 2)
    gradient = MlpParams(weights=tuple(reversed(weight_grads)), biases=tuple(reversed(bias_grads)))
    return gradient, g


def mlp_gradient(p: MlpParams, x: np.ndarray, upstream: np.ndarray) -> MlpParams:
    return mlp_backward(p, x, upstream)[0]

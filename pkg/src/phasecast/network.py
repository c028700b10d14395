"""Three-layer qubit-phase network: genome layout and forward pass.

A candidate network is a flat genome of phase angles. For a topology with
n input, p hidden, and one output node the layout is, in order:

    input weights        n*p   (row-major by input node)
    hidden biases        p     (one threshold phase per hidden node)
    output weights       p
    hidden reversals     p     (delta, sigmoid-squashed C-NOT controls)
    output reversal      1

The weight-and-bias portion has the classic (n+1)*p + p*q count; the
reversal parameters are trainable and appended after it so the activation
offset of every neuron is learned rather than frozen.

Hidden node j:   acc_j = sum_i f(W_ij) f(theta_i) - f(bias_j)
                 out_j = pi/2 * sigmoid(delta_j) - arg(acc_j)
Output node:     acc   = sum_j f(V_j) f(out_j)
                 theta = pi/2 * sigmoid(delta_out) - arg(acc)
Prediction:      y     = sin(theta)^2    in [0, 1]

where f(t) = cos t + i*sin t. The sin^2 readout is the squared amplitude of
the |1> component, so it is guaranteed to land in [0, 1]; it is isolated
here so alternative readouts can be swapped in for experimentation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class Topology:
    """n-p-q architecture descriptor; the output layer is fixed at one node."""

    n_input: int
    p_hidden: int
    q_output: int = 1

    def __post_init__(self):
        if self.n_input < 1 or self.p_hidden < 1:
            raise ShapeError(
                f"topology needs at least one input and one hidden node, "
                f"got ({self.n_input}, {self.p_hidden})")
        if self.q_output != 1:
            raise ShapeError(f"output layer is fixed at 1 node, got {self.q_output}")

    @property
    def genome_length(self) -> int:
        n, p, q = self.n_input, self.p_hidden, self.q_output
        return (n + 1) * p + p * q + (p + q)


@dataclass
class DecodedNetwork:
    """Genome phases sliced into named parameter blocks."""

    input_weights: np.ndarray   # (n, p)
    hidden_biases: np.ndarray   # (p,)
    output_weights: np.ndarray  # (p,)
    hidden_deltas: np.ndarray   # (p,)
    output_delta: float


def sigmoid(x):
    """Logistic squash 1 / (1 + exp(-x)); stable for large |x|."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def encode_input(values) -> np.ndarray:
    """Map normalized values in [0, 1] to input phases pi/2 * d in [0, pi/2]."""
    arr = np.asarray(values, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError("inputs must be finite and lie in [0, 1]")
    return HALF_PI * arr


def decode(genome, topo: Topology) -> DecodedNetwork:
    """Slice a flat genome into the network's parameter blocks."""
    genome = np.asarray(genome, dtype=float)
    if genome.shape != (topo.genome_length,):
        raise ShapeError(
            f"genome length {genome.shape} does not match topology "
            f"({topo.n_input}, {topo.p_hidden}, {topo.q_output}) "
            f"which needs {topo.genome_length} phases")
    n, p = topo.n_input, topo.p_hidden
    k = n * p
    return DecodedNetwork(
        input_weights=genome[:k].reshape(n, p),
        hidden_biases=genome[k:k + p],
        output_weights=genome[k + p:k + 2 * p],
        hidden_deltas=genome[k + 2 * p:k + 3 * p],
        output_delta=float(genome[k + 3 * p]),
    )


def encode(net: DecodedNetwork) -> np.ndarray:
    """Inverse of decode: flatten the parameter blocks back into a genome."""
    return np.concatenate([
        np.asarray(net.input_weights, dtype=float).reshape(-1),
        np.asarray(net.hidden_biases, dtype=float),
        np.asarray(net.output_weights, dtype=float),
        np.asarray(net.hidden_deltas, dtype=float),
        np.asarray([net.output_delta], dtype=float),
    ])


def _principal_angles(z: np.ndarray) -> np.ndarray:
    # np.angle with the -pi edge folded onto +pi, matching qubit.phase_of.
    a = np.angle(z)
    a = np.where(a == -np.pi, np.pi, a)
    return a


def hidden_layer(input_phases, net: DecodedNetwork) -> np.ndarray:
    """Hidden phase vector for one window of input phases."""
    input_phases = np.asarray(input_phases, dtype=float)
    n, p = net.input_weights.shape
    if input_phases.shape != (n,):
        raise ShapeError(f"expected {n} input phases, got {input_phases.shape}")
    acc = np.exp(1j * input_phases) @ np.exp(1j * net.input_weights)
    acc -= np.exp(1j * net.hidden_biases)
    return HALF_PI * sigmoid(net.hidden_deltas) - _principal_angles(acc)


def output_layer(hidden_phases, net: DecodedNetwork) -> float:
    """Output phase for one vector of hidden phases."""
    hidden_phases = np.asarray(hidden_phases, dtype=float)
    p = net.output_weights.shape[0]
    if hidden_phases.shape != (p,):
        raise ShapeError(f"expected {p} hidden phases, got {hidden_phases.shape}")
    acc = np.sum(np.exp(1j * net.output_weights) * np.exp(1j * hidden_phases))
    return float(HALF_PI * sigmoid(net.output_delta) - _principal_angles(acc))


def predict(genome, topo: Topology, window) -> float:
    """Full forward pass for one window of normalized values; result in [0, 1]."""
    net = decode(genome, topo)
    phases = encode_input(window)
    theta_out = output_layer(hidden_layer(phases, net), net)
    return float(np.sin(theta_out) ** 2)


def predict_batch(genome, topo: Topology, windows) -> np.ndarray:
    """Forward pass over an (m, n) matrix of windows; returns m predictions.

    Same arithmetic as predict, batched for fitness evaluation.
    """
    net = decode(genome, topo)
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != topo.n_input:
        raise ShapeError(
            f"expected windows of shape (m, {topo.n_input}), got {windows.shape}")
    phases = encode_input(windows)
    acc = np.exp(1j * phases) @ np.exp(1j * net.input_weights)
    acc -= np.exp(1j * net.hidden_biases)[None, :]
    hidden = HALF_PI * sigmoid(net.hidden_deltas)[None, :] - _principal_angles(acc)
    out_acc = np.exp(1j * hidden) @ np.exp(1j * net.output_weights)
    theta_out = HALF_PI * sigmoid(net.output_delta) - _principal_angles(out_acc)
    return np.sin(theta_out) ** 2

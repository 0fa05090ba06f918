"""Synchronous simulation of a 2-D lattice of coupled pulse neurons.

Each neuron keeps three memory units: a feeding unit that accumulates the
external input plus synaptic drive, a linking unit that accumulates synaptic
drive only, and a dynamic threshold.  A neuron emits a spike when

    feed * (1 + link) > threshold

Spiking consumes part of the feeding and linking charge (multiplicative decay
by ``alpha`` / ``beta``), while the threshold leaks by ``gamma`` every step and
is reinforced by ``lam`` for each spike.  All neurons update simultaneously
from the previous step's spike plane (double-buffered).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

__all__ = [
    "DEFAULT_KERNEL",
    "NeuronParams",
    "LatticeState",
    "SpikeMatrix",
    "fire_predicate",
    "lattice_step",
    "run_lattice",
]

# 3x3 synaptic kernel: no self-synapse, orthogonal neighbours twice the
# diagonal ones.  Its weight sum (1.2) is the only statistic that enters the
# continuous-firing analysis.
DEFAULT_KERNEL = np.array(
    [
        [0.1, 0.2, 0.1],
        [0.2, 0.0, 0.2],
        [0.1, 0.2, 0.1],
    ]
)


@dataclass(frozen=True)
class NeuronParams:
    """Complete parameterization of one coupled pulse lattice."""

    alpha: float = 0.8
    beta: float = 0.2
    gamma: float = 0.5
    lam: float = 15.0
    kernel: np.ndarray = field(default_factory=lambda: DEFAULT_KERNEL.copy())

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            val = getattr(self, name)
            if not (0.0 < val < 1.0):
                raise ValueError(f"{name} must lie strictly in (0, 1), got {val}")
        if self.lam < 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        kernel = np.asarray(self.kernel, dtype=np.float64)
        if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
            raise ValueError("kernel must be 2-D with odd side lengths")
        if np.any(kernel < 0.0) or not np.all(np.isfinite(kernel)):
            raise ValueError("kernel weights must be finite and >= 0")
        if kernel[kernel.shape[0] // 2, kernel.shape[1] // 2] != 0.0:
            raise ValueError("kernel center must be 0 (no self-synapse)")
        if kernel.sum() <= 0.0:
            raise ValueError("kernel weight sum must be > 0")
        object.__setattr__(self, "kernel", kernel)

    @property
    def kernel_sum(self) -> float:
        return float(self.kernel.sum())


@dataclass
class LatticeState:
    """Per-pixel simulation state at one time step.

    ``fired`` holds the binary spike plane of the *previous* step; every field
    in the successor state is computed from this snapshot alone.
    """

    feed: np.ndarray
    link: np.ndarray
    thresh: np.ndarray
    fired: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, shape: tuple[int, int]) -> "LatticeState":
        return cls(
            feed=np.zeros(shape),
            link=np.zeros(shape),
            thresh=np.zeros(shape),
            fired=np.zeros(shape, dtype=np.uint8),
            step=0,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.feed.shape


@dataclass
class SpikeMatrix:
    """Cumulative per-pixel firing counts over a fixed number of iterations."""

    counts: np.ndarray
    total_steps: int


def fire_predicate(u_val, v_val, t_val):
    """Spike condition: 1 iff u*(1+v) strictly exceeds t. Works elementwise."""
    fired = np.asarray(u_val) * (1.0 + np.asarray(v_val)) > np.asarray(t_val)
    if np.isscalar(u_val) or np.ndim(fired) == 0:
        return int(fired)
    return fired.astype(np.uint8)


def _synaptic_drive(fired: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Weighted sum of previous-step neighbour spikes, zero beyond the border."""
    return cv2.filter2D(
        fired.astype(np.float64), -1, kernel, borderType=cv2.BORDER_CONSTANT
    )


def lattice_step(
    state: LatticeState, input_map: np.ndarray, params: NeuronParams
) -> LatticeState:
    """Advance the lattice one step, reading only the time-t buffers.

    The threshold leaks every iteration and is recharged by ``lam`` per spike;
    feeding/linking charge is consumed only on the steps where the neuron
    actually fired.
    """
    input_map = np.asarray(input_map, dtype=np.float64)
    if input_map.shape != state.shape:
        raise ValueError(
            f"input shape {input_map.shape} does not match lattice {state.shape}"
        )
    prev = state.fired.astype(np.float64)
    drive = _synaptic_drive(state.fired, params.kernel)

    feed = np.where(prev == 1.0, params.alpha * state.feed, state.feed) + input_map + drive
    link = np.where(prev == 1.0, params.beta * state.link, state.link) + drive
    thresh = params.gamma * state.thresh + params.lam * prev
    fired = fire_predicate(feed, link, thresh)
    return LatticeState(feed=feed, link=link, thresh=thresh, fired=fired, step=state.step + 1)


def run_lattice(
    input_map: np.ndarray, params: NeuronParams, iterations: int
) -> SpikeMatrix:
    """Run from the all-zero state and accumulate per-pixel spike counts."""
    input_map = np.asarray(input_map, dtype=np.float64)
    if input_map.ndim != 2:
        raise ValueError("input must be a 2-D matrix")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if not np.all(np.isfinite(input_map)):
        raise ValueError("input contains non-finite values")
    if np.any(input_map < 0.0):
        raise ValueError("input values must be >= 0")

    state = LatticeState.zeros(input_map.shape)
    counts = np.zeros(input_map.shape, dtype=np.int64)
    for _ in range(iterations):
        state = lattice_step(state, input_map, params)
        counts += state.fired
    return SpikeMatrix(counts=counts, total_steps=iterations)

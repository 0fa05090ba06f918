"""Closed-form neuron trajectories and the continuous-firing constraint.

A single neuron driven by a constant input either settles into intermittent
spiking (informative firing counts) or locks into firing at every step, which
destroys the count signal.  The boundary input separating the two regimes has
a closed form in the lattice parameters; everything here is built around it:
closed-form trajectories for the always-firing regime, a single-neuron
simulator for cross-checking them, and an automatic input rescaling that keeps
every lattice neuron on the safe side of the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .lattice import NeuronParams

__all__ = [
    "FiringRegimeReport",
    "NeuronTrace",
    "continuous_firing_threshold",
    "closed_form_feed",
    "closed_form_link",
    "closed_form_threshold",
    "single_neuron_trace",
    "classify_regime",
    "auto_configure",
]


@dataclass
class NeuronTrace:
    """Single-neuron trajectory; index i holds the state after step i+1."""

    feed: np.ndarray
    link: np.ndarray
    thresh: np.ndarray
    fired: np.ndarray

    def firing_rate(self, steps: int | None = None) -> float:
        fired = self.fired if steps is None else self.fired[:steps]
        return float(fired.mean())

    def always_firing(self, burn_in: int = 0) -> bool:
        """True when every step after the burn-in produced a spike."""
        return bool(self.fired[burn_in:].all())


@dataclass
class FiringRegimeReport:
    threshold: float
    input_max: float
    regime: str  # "safe" | "continuous"
    firing_rate: float


def continuous_firing_threshold(params: NeuronParams) -> float:
    """Largest constant input that does not force eventual continuous firing.

    Inputs strictly above the returned value drive a neuron (with neighbours
    firing in lockstep) into firing at every step once transients die out.
    """
    s = params.kernel_sum
    num = params.lam * (1.0 - params.alpha) * (1.0 - params.beta)
    den = (1.0 - params.gamma) * (1.0 - params.beta + s)
    return num / den - s


def closed_form_feed(
    t: int, input_value: float, params: NeuronParams, k_history: Sequence[float]
) -> float:
    """Feeding-unit value after t steps, assuming a spike at every step.

    ``k_history[i]`` is the synaptic drive received at step i; k_history[0]
    must be 0 because the lattice starts silent.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    k = np.asarray(k_history, dtype=np.float64)
    if k.shape[0] < t:
        raise ValueError("k_history shorter than t")
    if k[0] != 0.0:
        raise ValueError("k_history[0] must be 0 (silent initial state)")
    a = params.alpha
    powers = a ** (t - 1 - np.arange(t))
    return float(input_value * (1.0 - a**t) / (1.0 - a) + np.dot(k[:t], powers))


def closed_form_link(
    t: int, params: NeuronParams, k_history: Sequence[float]
) -> float:
    """Linking-unit value after t steps under the always-firing assumption."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    k = np.asarray(k_history, dtype=np.float64)
    if k.shape[0] < t:
        raise ValueError("k_history shorter than t")
    if k[0] != 0.0:
        raise ValueError("k_history[0] must be 0 (silent initial state)")
    b = params.beta
    powers = b ** (t - 1 - np.arange(t))
    return float(np.dot(k[:t], powers))


def closed_form_threshold(t: int, params: NeuronParams) -> float:
    """Threshold value after t steps under the always-firing assumption."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    g = params.gamma
    return float(params.lam * (1.0 - g ** (t - 1)) / (1.0 - g))


def single_neuron_trace(
    input_value: float, params: NeuronParams, iterations: int
) -> NeuronTrace:
    """Simulate one neuron whose neighbours mirror its own previous spike.

    The synaptic drive is then kernel_sum * fired(t-1), the same substitution
    used in the continuous-firing analysis.  Returns the states after steps
    1..iterations.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not np.isfinite(input_value):
        raise ValueError("input must be finite")
    s = params.kernel_sum
    a, b, g, lam = params.alpha, params.beta, params.gamma, params.lam

    feed = np.empty(iterations)
    link = np.empty(iterations)
    thresh = np.empty(iterations)
    fired = np.empty(iterations, dtype=np.uint8)
    u = v = th = 0.0
    p = 0
    for i in range(iterations):
        drive = s * p
        u = (a * u if p else u) + input_value + drive
        v = (b * v if p else v) + drive
        th = g * th + lam * p
        p = 1 if u * (1.0 + v) > th else 0
        feed[i], link[i], thresh[i], fired[i] = u, v, th, p
    return NeuronTrace(feed=feed, link=link, thresh=thresh, fired=fired)


def classify_regime(
    input_value: float, params: NeuronParams, horizon: int = 500
) -> FiringRegimeReport:
    """Theoretical regime label plus the simulated firing rate.

    The regime follows the closed-form boundary (inputs at the boundary count
    as safe); the firing rate comes from simulating the homogeneous neuron
    over ``horizon`` steps.
    """
    threshold = continuous_firing_threshold(params)
    trace = single_neuron_trace(input_value, params, horizon) if input_value > 0 else None
    rate = trace.firing_rate() if trace is not None else 0.0
    regime = "continuous" if input_value > threshold else "safe"
    return FiringRegimeReport(
        threshold=threshold, input_max=float(input_value), regime=regime, firing_rate=rate
    )


def auto_configure(
    focus_maps: Iterable[np.ndarray], base: NeuronParams
) -> tuple[NeuronParams, float]:
    """Joint input rescaling that rules out continuous firing.

    Returns the unchanged parameters and a single scale factor s such that the
    global maximum over *all* supplied maps lands exactly on the
    continuous-firing boundary after scaling.  Using one joint scale keeps
    cross-image spike-count comparisons fair.
    """
    maps = [np.asarray(m, dtype=np.float64) for m in focus_maps]
    if not maps:
        raise ValueError("need at least one focus map")
    for m in maps:
        if not np.all(np.isfinite(m)):
            raise ValueError("focus map contains non-finite values")
        if np.any(m < 0.0):
            raise ValueError("focus map contains negative values")
    global_max = max(float(m.max()) for m in maps)
    if global_max == 0.0:
        return base, 1.0
    threshold = continuous_firing_threshold(base)
    if threshold <= 0.0:
        raise ValueError(
            "continuous-firing boundary is not positive for these parameters; "
            "no input rescaling can avoid continuous firing"
        )
    return base, threshold / global_max

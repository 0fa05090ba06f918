"""Training-free multi-focus image fusion on coupled spiking lattices."""

from .lattice import (
    DEFAULT_KERNEL,
    LatticeState,
    NeuronParams,
    SpikeMatrix,
    fire_predicate,
    lattice_step,
    run_lattice,
)
from .dynamics import (
    FiringRegimeReport,
    NeuronTrace,
    auto_configure,
    classify_regime,
    closed_form_feed,
    closed_form_link,
    closed_form_threshold,
    continuous_firing_threshold,
    single_neuron_trace,
)
from .focus import modified_laplacian, sml, to_luminance
from .pipeline import (
    FusionConfig,
    FusionResult,
    decision_map,
    fuse_pair,
    run_fusion,
    spike_density,
)
from .metrics import MetricReport, evaluate_pair, psnr, qabf, ssim

__version__ = "0.1.0"

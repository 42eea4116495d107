"""Self-driven particle simulation on a square arena with wrapped positions.

Particles move at constant speed; each frame every normal particle turns
toward the circular mean heading of the particles in its neighborhood
(itself included) plus a uniform angular perturbation, while noise
particles pick a fresh uniform heading.  Headings are updated synchronously
from the previous frame, then every particle advances and wraps.

The alignment neighborhood is configurable.  The default ("knn") is the
particle's k nearest neighbors by plain straight-line distance on the raw
coordinates, mirroring how the measurement graph defines neighborhoods;
"radius" uses the interaction-disk rule instead.  ``wrap_alignment``
controls whether those alignment distances wrap around the arena (they do
not by default, so the wrap seam is invisible to the interaction rule even
though positions wrap).  The defaults reproduce the reference behavior of
the flocking benchmark (see the project README).

A *run* couples the simulation with the graph measurement: per frame it
builds the K-nearest-neighbor graph over all particles under the torus
metric (weights = clamped heading cosines) and records the measured
collectiveness next to the ground truth (the length of the mean
unit-velocity vector of the normal particles).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import knn_select
from .errors import ParameterError, UndefinedMetricError
from .graph import WeightedDigraph, build_knn_graph, pairwise_distances
from .ncl import NclConfig, coherence, graph_collectiveness, learn_cliques, node_collectiveness


@dataclass(frozen=True)
class SdpParams:
    """Simulation and stop-rule parameters (defaults match the experiments).

    ``alignment`` picks the neighborhood of the heading update: "knn" uses
    the k_neighbors nearest particles, "radius" everything within the
    interaction radius; ``wrap_alignment`` makes those distances periodic.
    ``radius`` only matters in radius mode.
    """

    n_particles: int = 400
    k_neighbors: int = 20
    box_side: float = 7.0
    speed: float = 0.03
    radius: float = 1.0
    eta: float = 0.0
    noise_ratio: float = 0.0
    max_frames: int = 100
    gt_stop: float = 0.95
    alignment: str = "knn"
    wrap_alignment: bool = False

    def __post_init__(self):
        if self.n_particles < 2:
            raise ParameterError(f"need at least 2 particles, got {self.n_particles}")
        if not 1 <= self.k_neighbors <= self.n_particles - 1:
            raise ParameterError(
                f"k_neighbors must be in 1..{self.n_particles - 1}, got {self.k_neighbors}")
        if self.box_side <= 0 or self.speed <= 0 or self.radius <= 0:
            raise ParameterError("box_side, speed and radius must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError(f"eta must be in [0, 1], got {self.eta}")
        if not 0.0 <= self.noise_ratio <= 1.0:
            raise ParameterError(f"noise_ratio must be in [0, 1], got {self.noise_ratio}")
        if self.max_frames < 1:
            raise ParameterError(f"max_frames must be >= 1, got {self.max_frames}")
        if self.alignment not in ("knn", "radius"):
            raise ParameterError(f"alignment must be 'knn' or 'radius', got {self.alignment!r}")


@dataclass(frozen=True)
class SdpState:
    """Positions in [0, L)^2, headings in [0, 2*pi), per-particle noise flags."""

    positions: np.ndarray
    headings: np.ndarray
    is_noise: np.ndarray
    frame: int = 0


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    measured_phi: float
    ground_truth: float


def _init_state(params: SdpParams, rng: np.random.Generator) -> SdpState:
    n = params.n_particles
    positions = rng.uniform(0.0, params.box_side, size=(n, 2))
    headings = rng.uniform(0.0, 2.0 * np.pi, size=n)
    is_noise = np.zeros(n, dtype=bool)
    is_noise[: round(params.noise_ratio * n)] = True
    return SdpState(positions, headings, is_noise, frame=0)


def init(params: SdpParams, seed: int) -> SdpState:
    """Fresh state: uniform positions and headings, reproducible from seed.

    The first round(noise_ratio * N) particles are flagged as noise.
    """
    return _init_state(params, np.random.default_rng(seed))


def step(state: SdpState, params: SdpParams, rng: np.random.Generator) -> SdpState:
    """Advance one frame (synchronous heading update, then move and wrap)."""
    n = params.n_particles
    sin_t = np.sin(state.headings)
    cos_t = np.cos(state.headings)
    if params.alignment == "knn":
        side = params.box_side if params.wrap_alignment else 0.0
        nbr = knn_select(np.ascontiguousarray(state.positions), params.k_neighbors, side)
        sin_sum = sin_t[nbr].sum(axis=1) + sin_t  # neighborhood plus self
        cos_sum = cos_t[nbr].sum(axis=1) + cos_t
    else:
        if params.wrap_alignment:
            dist = pairwise_distances(state.positions, "torus", params.box_side)
        else:
            dist = pairwise_distances(state.positions)
        within = dist <= params.radius  # diagonal is 0, so self always counts
        sin_sum = within @ sin_t
        cos_sum = within @ cos_t
    mean_dir = np.arctan2(sin_sum, cos_sum)

    u = rng.random(n)  # one draw per particle, ascending id
    jitter = (2.0 * u - 1.0) * params.eta * np.pi
    headings = np.where(state.is_noise, 2.0 * np.pi * u, mean_dir + jitter)
    headings = np.mod(headings, 2.0 * np.pi)

    positions = state.positions + params.speed * np.column_stack(
        [np.cos(headings), np.sin(headings)])
    positions = np.mod(positions, params.box_side)
    return SdpState(positions, headings, state.is_noise, state.frame + 1)


def ground_truth(state: SdpState) -> float:
    """Length of the mean unit-velocity vector over the normal particles."""
    normal = ~state.is_noise
    if not normal.any():
        raise UndefinedMetricError("every particle is a noise particle; ground truth undefined")
    theta = state.headings[normal]
    v = float(np.hypot(np.cos(theta).mean(), np.sin(theta).mean()))
    return min(v, 1.0)


@dataclass(frozen=True)
class Simulation:
    """One finished trajectory: the visited states and their ground truths."""

    states: list[SdpState]
    ground_truths: list[float]

    def __len__(self) -> int:
        return len(self.states)


def simulate(params: SdpParams, seed: int, initial_state: SdpState | None = None) -> Simulation:
    """Run the particle dynamics alone, honoring the stop rule.

    Stops after max_frames recorded frames, or as soon as the ground truth
    of a recorded frame exceeds gt_stop.  At least one frame is recorded.
    The trajectory does not depend on any measurement parameter.
    """
    rng = np.random.default_rng(seed)
    state = _init_state(params, rng) if initial_state is None else initial_state
    states: list[SdpState] = []
    gts: list[float] = []
    while True:
        states.append(state)
        gt = ground_truth(state)
        gts.append(gt)
        if gt > params.gt_stop or len(states) >= params.max_frames:
            return Simulation(states, gts)
        state = step(state, params, rng)


def frame_graph(state: SdpState, k: int, box_side: float) -> WeightedDigraph:
    """K-NN torus graph over all particles with heading-cosine weights."""
    velocities = np.column_stack([np.cos(state.headings), np.sin(state.headings)])
    return build_knn_graph(state.positions, velocities, k, metric="torus", box_side=box_side)


def measure_simulation(sim: Simulation, k: int, box_side: float,
                       configs: list[NclConfig]) -> dict[NclConfig, list[float]]:
    """Collectiveness series of one trajectory under several configs at once.

    The graph is built once per frame and the learned cliques are shared by
    the configs that differ only in coherence scheme, so sweeping thresholds
    and schemes costs far less than independent runs.
    """
    series: dict[NclConfig, list[float]] = {cfg: [] for cfg in configs}
    spread_groups: dict[tuple[float, str, bool], list[NclConfig]] = {}
    for cfg in configs:
        spread_groups.setdefault((cfg.lam, cfg.strategy, cfg.batched), []).append(cfg)
    for state in sim.states:
        g = frame_graph(state, k, box_side)
        for (lam, strategy, batched), group in spread_groups.items():
            c = learn_cliques(g, NclConfig(lam=lam, strategy=strategy, batched=batched,
                                           scheme=group[0].scheme))
            for cfg in group:
                z = coherence(c, cfg.scheme)
                phi = node_collectiveness(z)
                series[cfg].append(graph_collectiveness(phi))
    return series


def run(params: SdpParams, cfg: NclConfig, seed: int,
        initial_state: SdpState | None = None) -> list[FrameRecord]:
    """Simulate and measure one run; one record per frame, 1-based."""
    sim = simulate(params, seed, initial_state)
    phis = measure_simulation(sim, params.k_neighbors, params.box_side, [cfg])[cfg]
    return [FrameRecord(i + 1, phi, gt)
            for i, (phi, gt) in enumerate(zip(phis, sim.ground_truths))]

import numpy as np
import pytest

from collectiveness import (NclConfig, ParameterError, SdpParams, SdpState,
                            UndefinedMetricError, frame_graph, ground_truth, init,
                            measure, measure_simulation, run, simulate, step)


def small_params(**kw):
    defaults = dict(n_particles=60, k_neighbors=8, box_side=3.0, max_frames=40)
    defaults.update(kw)
    return SdpParams(**defaults)


def test_params_validation():
    with pytest.raises(ParameterError):
        SdpParams(n_particles=1)
    with pytest.raises(ParameterError):
        SdpParams(k_neighbors=400)
    with pytest.raises(ParameterError):
        SdpParams(eta=1.5)
    with pytest.raises(ParameterError):
        SdpParams(noise_ratio=-0.1)
    with pytest.raises(ParameterError):
        SdpParams(speed=0.0)
    with pytest.raises(ParameterError):
        SdpParams(alignment="voronoi")


def test_init_is_reproducible():
    p = small_params()
    a = init(p, seed=42)
    b = init(p, seed=42)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.headings, b.headings)
    assert a.frame == 0
    assert not np.array_equal(a.positions, init(p, seed=43).positions)


def test_init_noise_flags():
    assert init(small_params(), 0).is_noise.sum() == 0
    assert init(SdpParams(noise_ratio=0.5), 0).is_noise.sum() == 200
    flags = init(small_params(noise_ratio=0.25), 0).is_noise
    assert flags.sum() == 15 and flags[:15].all() and not flags[15:].any()


def test_init_ranges():
    st = init(SdpParams(), 7)
    assert st.positions.min() >= 0.0 and st.positions.max() < 7.0
    assert st.headings.min() >= 0.0 and st.headings.max() < 2 * np.pi


@pytest.mark.parametrize("alignment", ["knn", "radius"])
def test_step_fixed_point_of_aligned_headings(alignment):
    p = small_params(n_particles=5, k_neighbors=2, box_side=1.0, radius=2.0,
                     alignment=alignment)
    pos = np.array([[0.1, 0.1], [0.2, 0.1], [0.3, 0.2], [0.5, 0.5], [0.8, 0.2]])
    theta = np.full(5, 1.234)
    st = SdpState(pos, theta, np.zeros(5, dtype=bool), 0)
    out = step(st, p, np.random.default_rng(0))
    assert np.allclose(out.headings, theta, atol=1e-12)
    assert out.frame == 1


def test_step_radius_neighborhood_selects_by_distance():
    # particle 2 sits beyond the disk of particle 0 but inside its knn set
    p = SdpParams(n_particles=3, k_neighbors=2, box_side=10.0, radius=1.0,
                  alignment="radius")
    pos = np.array([[0.0, 0.0], [0.5, 0.0], [3.0, 0.0]])
    theta = np.array([0.0, 0.0, np.pi / 2])
    st = SdpState(pos, theta, np.zeros(3, dtype=bool), 0)
    out = step(st, p, np.random.default_rng(0))
    # 0 and 1 average only each other; 2 is alone and keeps its heading
    assert out.headings[0] == pytest.approx(0.0, abs=1e-12)
    assert out.headings[2] == pytest.approx(np.pi / 2, abs=1e-12)

    p_knn = SdpParams(n_particles=3, k_neighbors=2, box_side=10.0, alignment="knn")
    out_knn = step(st, p_knn, np.random.default_rng(0))
    # under knn alignment particle 0 also listens to particle 2
    assert out_knn.headings[0] == pytest.approx(np.arctan2(1.0, 2.0), abs=1e-12)


def test_wrap_alignment_sees_across_the_seam():
    # neighbors straddle the arena edge only when distances wrap
    pos = np.array([[0.1, 0.0], [6.9, 0.0], [3.0, 0.0]])
    theta = np.array([0.0, np.pi / 2, 0.0])
    st = SdpState(pos, theta, np.zeros(3, dtype=bool), 0)
    base = dict(n_particles=3, k_neighbors=1, box_side=7.0, radius=1.0)
    for alignment in ("knn", "radius"):
        wrapped = step(st, SdpParams(alignment=alignment, wrap_alignment=True, **base),
                       np.random.default_rng(0))
        plain = step(st, SdpParams(alignment=alignment, wrap_alignment=False, **base),
                     np.random.default_rng(0))
        assert wrapped.headings[0] == pytest.approx(np.pi / 4, abs=1e-12)
        assert plain.headings[0] != pytest.approx(np.pi / 4, abs=1e-3)


def test_step_torus_wrap_arithmetic():
    p = SdpParams(n_particles=2, k_neighbors=1)
    st = SdpState(np.array([[6.99, 0.0], [6.99, 0.5]]), np.zeros(2),
                  np.zeros(2, dtype=bool), 0)
    out = step(st, p, np.random.default_rng(0))
    assert out.positions[0, 0] == pytest.approx(0.02, abs=1e-12)
    assert out.positions[0, 1] == pytest.approx(0.0, abs=1e-12)


def test_step_positions_stay_wrapped():
    p = small_params()
    rng = np.random.default_rng(1)
    st = init(p, 1)
    for _ in range(25):
        st = step(st, p, rng)
        assert st.positions.min() >= 0.0
        assert st.positions.max() < p.box_side


def test_noise_particles_draw_uniform_headings():
    # pool headings over many frames and check uniformity on [0, 2pi)
    p = SdpParams(n_particles=8, k_neighbors=2, box_side=3.0, noise_ratio=1.0)
    rng = np.random.default_rng(2)
    st = init(p, 2)
    pooled = []
    for _ in range(2000):
        st = step(st, p, rng)
        pooled.extend(st.headings.tolist())
    pooled = np.array(pooled)
    counts, _ = np.histogram(pooled, bins=16, range=(0.0, 2 * np.pi))
    expected = len(pooled) / 16
    assert np.all(np.abs(counts - expected) < 6 * np.sqrt(expected))
    mean_vec = np.hypot(np.cos(pooled).mean(), np.sin(pooled).mean())
    assert mean_vec < 0.05


def test_ground_truth_extremes():
    flags = np.zeros(4, dtype=bool)
    aligned = SdpState(np.zeros((4, 2)), np.zeros(4), flags, 0)
    assert ground_truth(aligned) == 1.0
    skew = SdpState(np.zeros((4, 2)), np.full(4, 2.13), flags, 0)
    assert ground_truth(skew) == pytest.approx(1.0, abs=1e-12)
    opposite = SdpState(np.zeros((2, 2)), np.array([0.5, 0.5 + np.pi]),
                        np.zeros(2, dtype=bool), 0)
    assert ground_truth(opposite) == pytest.approx(0.0, abs=1e-12)


def test_ground_truth_ignores_noise_particles():
    st = SdpState(np.zeros((3, 2)), np.array([0.0, 0.0, np.pi]),
                  np.array([False, False, True]), 0)
    assert ground_truth(st) == 1.0
    with pytest.raises(UndefinedMetricError):
        ground_truth(SdpState(np.zeros((2, 2)), np.zeros(2), np.ones(2, dtype=bool), 0))


def test_ground_truth_of_disorder_is_small():
    rng = np.random.default_rng(3)
    flags = np.zeros(400, dtype=bool)
    values = []
    for _ in range(1000):
        st = SdpState(np.zeros((400, 2)), rng.uniform(0, 2 * np.pi, 400), flags, 0)
        values.append(ground_truth(st))
    assert np.mean(values) < 0.1


def test_run_stops_on_ordered_initial_state():
    p = SdpParams(n_particles=50, k_neighbors=5)
    st = SdpState(np.random.default_rng(4).uniform(0, 7, (50, 2)),
                  np.full(50, 0.3), np.zeros(50, dtype=bool), 0)
    records = run(p, NclConfig(), seed=0, initial_state=st)
    assert len(records) == 1
    assert records[0].frame == 1
    assert records[0].ground_truth > 0.95


def test_run_is_deterministic_and_bounded():
    p = small_params(max_frames=25)
    cfg = NclConfig(lam=0.7, strategy="min", scheme="ncl2")
    a = run(p, cfg, seed=5)
    b = run(p, cfg, seed=5)
    assert a == b
    assert 1 <= len(a) <= 25
    for r in a:
        assert 0.0 <= r.measured_phi <= 1.0
        assert 0.0 <= r.ground_truth <= 1.0


def test_run_matches_per_frame_measure():
    p = small_params(max_frames=10)
    cfg = NclConfig()
    records = run(p, cfg, seed=6)
    sim = simulate(p, seed=6)
    assert len(records) == len(sim)
    for rec, state in zip(records, sim.states):
        g = frame_graph(state, p.k_neighbors, p.box_side)
        assert rec.measured_phi == measure(g, cfg).capital_phi


def test_measure_simulation_groups_configs():
    p = small_params(max_frames=8)
    sim = simulate(p, seed=7)
    cfgs = [NclConfig(lam=0.7, strategy="avg", scheme="ncl1"),
            NclConfig(lam=0.7, strategy="avg", scheme="ncl2"),
            NclConfig(lam=0.2, strategy="min", scheme="ncl1")]
    series = measure_simulation(sim, p.k_neighbors, p.box_side, cfgs)
    assert set(series) == set(cfgs)
    for cfg in cfgs:
        assert len(series[cfg]) == len(sim)
        single = measure_simulation(sim, p.k_neighbors, p.box_side, [cfg])[cfg]
        assert series[cfg] == single


def test_ordering_emerges_without_noise():
    p = SdpParams(n_particles=100, k_neighbors=10, box_side=3.5, max_frames=60)
    first, last = [], []
    for seed in range(50):
        sim = simulate(p, seed=seed)
        first.append(sim.ground_truths[0])
        last.append(sim.ground_truths[-1])
    assert np.mean(last) > np.mean(first)


def test_frame_graph_uses_torus_metric():
    pos = np.array([[0.1, 0.0], [6.9, 0.0], [2.0, 0.0]])
    st = SdpState(pos, np.zeros(3), np.zeros(3, dtype=bool), 0)
    g = frame_graph(st, 1, 7.0)
    assert g.out_neighbors(0)[0].tolist() == [1]
    assert g.weight.tolist() == [1.0, 1.0, 1.0]

import math

import numpy as np
import pytest

from symnav import _backend
from symnav.geometry import Point, Segment
from symnav.network import Chromosome, NetworkSpec, decode, genome_length
from symnav.sensors import make_sensor
from symnav.simulation import (
    DistanceMode,
    EpisodeConfig,
    Evaluator,
    fitness_of,
    read_trajectory,
    run_episode,
    write_trajectory,
)
from symnav.track import Outcome, Track, bundled_track, corridor_track, mirror_track
from symnav.vehicle import VehicleParams, VehicleState, step

V = VehicleParams()


def zero_weights(n):
    spec = NetworkSpec.default(n)
    return decode(Chromosome(np.zeros(genome_length(spec)), spec))


def random_weights(n, seed, symmetric=True, scale=1.0):
    spec = NetworkSpec.default(n, symmetric)
    rng = np.random.default_rng(seed)
    return decode(Chromosome(rng.uniform(-scale, scale, genome_length(spec)), spec))


def straight(length=3000.0):
    return corridor_track("straight", [(0, 0), (length, 0)], 100)


def test_fitness_examples():
    assert fitness_of(Point(3, 4), Point(3, 4), 17) == 0.0
    assert fitness_of(Point(10, 0), Point(0, 0), 4) == 25.0
    assert fitness_of(Point(60, 80), Point(0, 0), 20) == 500.0
    assert fitness_of(Point(20, 0), Point(0, 0), 4) == 4 * fitness_of(Point(10, 0), Point(0, 0), 4)
    with pytest.raises(ValueError):
        fitness_of(Point(0, 0), Point(1, 1), 0)


def test_start_in_collision_ends_at_first_tick():
    walls = (Segment(Point(0, -50), Point(1000, -50)), Segment(Point(50, -60), Point(50, 60)))
    t = Track(walls, (), Point(50, 0), 0.0, Point(900, 0), 100)
    r = run_episode(t, V, make_sensor("basic", 5, 100), zero_weights(5))
    assert r.outcome.terminal is Outcome.COLLISION
    assert r.outcome.ticks == 1 and r.fitness == 0.0


def test_zero_genes_drive_straight():
    t = straight()
    cfg = EpisodeConfig(max_ticks=100, record_trajectory=True)
    r = run_episode(t, V, make_sensor("basic", 9, 100), zero_weights(9), cfg)
    assert r.outcome.terminal is Outcome.TIMED_OUT and r.outcome.ticks == 100
    assert r.final_state.y == 0.0 and r.final_state.theta == 0.0
    assert r.final_state.x == t.start.x + 100 * V.speed
    assert r.fitness == V.speed ** 2 * 100
    assert len(r.trajectory) == 100 and np.all(r.trajectory.steering == 0.0)


def test_zero_genes_reach_destination_in_straight_corridor():
    t = corridor_track("short", [(0, 0), (800, 0)], 100)
    r = run_episode(t, V, make_sensor("basic", 9, 100), zero_weights(9))
    assert r.outcome.terminal is Outcome.REACHED_DESTINATION
    assert math.dist((r.final_state.x, r.final_state.y), (t.destination.x, t.destination.y)) <= 50


def test_episode_matches_stepwise_replay():
    t = bundled_track("map1")
    sensor = make_sensor("basic", 7, 100)
    cfg = EpisodeConfig(max_ticks=400, record_trajectory=True)
    r = run_episode(t, V, sensor, random_weights(7, 3), cfg)
    s = VehicleState(t.start.x, t.start.y, t.start_heading)
    for row in r.trajectory.states:
        s = step(s, row[5], V)
        assert (s.x, s.y, s.theta, s.delta) == tuple(row[1:5])


def test_dimension_mismatch_names_both():
    with pytest.raises(ValueError, match=r"7 inputs.*5 beams"):
        run_episode(straight(), V, make_sensor("basic", 5, 100), zero_weights(7))


def test_evaluator_single_track_and_additivity():
    t = bundled_track("map2")
    sensor = make_sensor("basic", 9, 100)
    spec = NetworkSpec.default(9)
    chrom = Chromosome(np.random.default_rng(4).uniform(-1, 1, genome_length(spec)), spec)
    single = run_episode(t, V, sensor, decode(chrom)).fitness
    assert Evaluator([t], V, sensor)(chrom, 0).fitness == single
    assert Evaluator([t, t], V, sensor)(chrom, 0).fitness == 2 * single


def test_noisy_evaluation_is_reproducible():
    t = bundled_track("map1")
    sensor = make_sensor("lidar", 9, 100)
    spec = NetworkSpec.default(9)
    chrom = Chromosome(np.random.default_rng(1).uniform(-1, 1, genome_length(spec)), spec)
    ev = Evaluator([t, bundled_track("map3")], V, sensor, EpisodeConfig(max_ticks=300))
    a, b = ev.episodes(chrom, 77), ev.episodes(chrom, 77)
    assert [x.fitness for x in a] == [x.fitness for x in b]
    c = ev.episodes(chrom, 78)
    assert [x.fitness for x in a] != [x.fitness for x in c]


def test_path_distance_mode():
    cfg = EpisodeConfig(max_ticks=50, distance=DistanceMode.PATH)
    r = run_episode(straight(), V, make_sensor("basic", 5, 100), zero_weights(5), cfg)
    assert r.fitness == (50 * V.speed) ** 2 / 50


def test_trajectory_file_round_trip(tmp_path):
    cfg = EpisodeConfig(max_ticks=60, record_trajectory=True)
    r = run_episode(bundled_track("map1"), V, make_sensor("basic", 5, 100), random_weights(5, 0), cfg)
    write_trajectory(r.trajectory, tmp_path / "t.csv", tmp_path / "s.csv")
    back = read_trajectory(tmp_path / "t.csv", tmp_path / "s.csv")
    assert np.array_equal(back.states, r.trajectory.states)
    assert np.array_equal(back.scans, r.trajectory.scans)
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "tick,x,y,theta_rad,delta_rad,steer_cmd_rad"


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("name", ["map1", "map6"])
def test_mirror_track_gives_mirror_trajectory(name, seed):
    t = bundled_track(name)
    m = mirror_track(t)
    sensor = make_sensor("basic", 11, t.track_width)
    w = random_weights(11, seed, scale=3.0)
    cfg = EpisodeConfig(max_ticks=600, record_trajectory=True)
    a = run_episode(t, V, sensor, w, cfg)
    b = run_episode(m, V, sensor, w, cfg)
    assert a.outcome.terminal == b.outcome.terminal and a.outcome.ticks == b.outcome.ticks
    sa, sb = a.trajectory.states, b.trajectory.states
    assert np.max(np.abs(sa[:, 1] - sb[:, 1])) < 1e-9
    assert np.max(np.abs((sa[:, 2] - t.start.y) + (sb[:, 2] - t.start.y))) < 1e-9
    assert np.array_equal(sb[:, 5], -sa[:, 5])


def test_unconstrained_network_need_not_mirror():
    t = bundled_track("map1")
    m = mirror_track(t)
    sensor = make_sensor("basic", 11, 100)
    w = random_weights(11, 5, symmetric=False, scale=3.0)
    cfg = EpisodeConfig(max_ticks=200, record_trajectory=True)
    a = run_episode(t, V, sensor, w, cfg).trajectory.steering
    b = run_episode(m, V, sensor, w, cfg).trajectory.steering
    n = min(len(a), len(b))
    assert not np.array_equal(b[:n], -a[:n])


@pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled core not built")
class TestBackendsAgree:
    def teardown_method(self):
        _backend.use("compiled")

    def test_cast_rays_bitwise(self):
        from symnav import _core, _purepy

        rng = np.random.default_rng(0)
        for _ in range(200):
            segs = rng.uniform(-100, 100, (12, 4))
            angles = rng.uniform(-4, 4, 9)
            ox, oy = rng.uniform(-50, 50, 2)
            a, b = np.empty(9), np.empty(9)
            _core.cast_rays(segs, ox, oy, angles, 80.0, a)
            _purepy.cast_rays(segs, ox, oy, angles, 80.0, b)
            assert np.array_equal(a, b)

    def test_rect_hits_bitwise(self):
        from symnav import _core, _purepy

        rng = np.random.default_rng(1)
        for _ in range(500):
            segs = rng.uniform(-40, 40, (3, 4))
            args = (segs, *rng.uniform(-30, 30, 2), rng.uniform(-4, 4), 15.0, 8.0)
            assert bool(_core.rect_hits_any(*args)) == bool(_purepy.rect_hits_any(*args))

    @pytest.mark.parametrize("kind", ["basic", "lidar"])
    def test_episodes_agree(self, kind):
        t = bundled_track("map1")
        sensor = make_sensor(kind, 9, 100)
        cfg = EpisodeConfig(max_ticks=300, record_trajectory=True)
        for seed in range(4):
            w = random_weights(9, seed)
            _backend.use("compiled")
            a = run_episode(t, V, sensor, w, cfg, eval_seed=seed)
            _backend.use("python")
            b = run_episode(t, V, sensor, w, cfg, eval_seed=seed)
            assert a.outcome.terminal == b.outcome.terminal and a.outcome.ticks == b.outcome.ticks
            assert np.allclose(a.trajectory.states, b.trajectory.states, atol=1e-9, rtol=0)
            assert a.fitness == pytest.approx(b.fitness, rel=1e-12)

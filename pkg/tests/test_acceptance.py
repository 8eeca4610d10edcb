"""
End-to-end checks on seeded corpora. Each check runs at a reduced size by
default; the full-scale versions are marked `slow`.
"""

import math
import numpy as np
import pytest
from bench_constants import DEGREE_BOUND, GeneratorKind, Variant
from bench_runner import (
    BenchJob,
    fit_slope,
    label_change_budget,
    make_engine,
    make_ranks,
    run_job,
    tail_trial,
)
from cycle_engine import CycleEngine, PropagationPolicy
from generators import random_dag_order, with_final_cycle
from message_sim import MessageSimulator, SchedulePolicy, SimVariant
from oracle import check_no_path_theorem, reaches, static_labels, to_digraph
from rank_schemes import QPreset, arc_scheme, preset_q, sample_vertex_scheme


def _arc_stream(seed: int, max_n: int):
    """Uniform arcs until the first cycle, or a DAG run to exhaustion plus a back arc."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    if seed % 2:
        m = int(rng.integers(0, n * (n - 1) // 2 + 1))
        sequence = random_dag_order(n, m, seed)
        arcs = with_final_cycle(sequence).arcs if m else sequence.arcs
        return n, arcs
    return n, [tuple(int(x) for x in rng.integers(n, size=2)) for _ in range(4 * n)]


def _detection_mismatches(seeds: int, max_n: int) -> int:
    mismatches = 0
    for seed in range(seeds):
        n, arcs = _arc_stream(seed, max_n)
        engine = CycleEngine(sample_vertex_scheme(n, 0.5, seed))
        graph = to_digraph(n, [])
        for u, v in arcs:
            outcome = engine.Insert(u, v)
            mismatches += outcome.is_cycle != reaches(graph, v, u)
            if outcome.is_cycle:
                break
            graph.add_edge(u, v)
    return mismatches


def test_detection_matches_oracle():
    assert _detection_mismatches(seeds=80, max_n=32) == 0


@pytest.mark.slow
def test_detection_matches_oracle_full_scale():
    assert _detection_mismatches(seeds=1000, max_n=128) == 0


LABEL_CONFIGS = [
    (Variant.TWO_WAY_VERTEX, 0.1),
    (Variant.TWO_WAY_VERTEX, 0.5),
    (Variant.TWO_WAY_VERTEX, 1.0),
    (Variant.TWO_WAY_ARC, 0.5),
]


def _label_corpus_check(seeds: int, max_n: int) -> None:
    for variant, q in LABEL_CONFIGS:
        for seed in range(seeds):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, max_n + 1))
            m = min(int(rng.integers(0, 3 * n)), n * (n - 1) // 2)
            sequence = random_dag_order(n, m, seed)

            engine = make_engine(variant, make_ranks(variant, n, q, seed), PropagationPolicy.DEPTH_FIRST, seed)
            graph = to_digraph(n, [])
            for u, v in sequence.arcs:
                assert not engine.Insert(u, v).is_cycle
                graph.add_edge(u, v)
                labeling = static_labels(graph, engine.ranks)
                assert engine.labels == labeling, (variant, q, seed)
                assert check_no_path_theorem(graph, labeling) == []

            _check_schedule_independence(sequence, variant, q, seed, engine.SnapshotJson())


def _check_schedule_independence(sequence, variant, q, seed, expected_json) -> None:
    for policy in PropagationPolicy:
        engine = make_engine(variant, make_ranks(variant, sequence.n, q, seed), policy, seed + 1)
        for u, v in sequence.arcs:
            engine.Insert(u, v)
        assert engine.SnapshotJson() == expected_json

    for schedule in SchedulePolicy:
        sim = MessageSimulator(make_ranks(variant, sequence.n, q, seed), SimVariant.TWO_WAY, schedule, seed)
        sim.RunSequence(sequence.arcs)
        assert sim.SnapshotJson() == expected_json


def test_labels_match_oracle_on_seeded_corpus():
    _label_corpus_check(seeds=15, max_n=24)


@pytest.mark.slow
def test_labels_match_oracle_on_seeded_corpus_full_scale():
    _label_corpus_check(seeds=200, max_n=64)


def _tail_failures(trials, bound, key) -> int:
    return sum(1 for t in trials if t[key] > bound)


def _label_length_tail(n: int, seeds: int) -> None:
    bound = 3 * math.log(n) + 5
    trials = [
        tail_trial(random_dag_order(n, 8 * n, seed), Variant.TWO_WAY_VERTEX, 1.0, seed)
        for seed in range(seeds)
    ]
    assert _tail_failures(trials, bound, key="max_label_length") <= seeds // 300


def test_label_length_tail():
    _label_length_tail(n=256, seeds=12)


@pytest.mark.slow
def test_label_length_tail_full_scale():
    _label_length_tail(n=1024, seeds=300)


def _backward_set_tail(n: int, seeds: int) -> None:
    q = 0.1
    bound = 6 * math.log(n) / q
    trials = [
        tail_trial(
            random_dag_order(n, 2 * n, seed, max_degree=DEGREE_BOUND),
            Variant.TWO_WAY_VERTEX,
            q,
            seed,
            backward_every_insert=True,
        )
        for seed in range(seeds)
    ]
    assert _tail_failures(trials, bound, key="max_backward_set") <= seeds // 300


def test_backward_set_tail():
    _backward_set_tail(n=48, seeds=10)


@pytest.mark.slow
def test_backward_set_tail_full_scale():
    _backward_set_tail(n=128, seeds=300)


def _update_budget(n: int, seeds: int) -> None:
    sequence = random_dag_order(n, 4 * n, seed=17)
    budget = label_change_budget(sequence, 0.5, list(range(seeds)), PropagationPolicy.BREADTH_FIRST)
    over = [(v, changes, preds) for v, changes, preds in budget if changes > 2 * preds + 1]
    assert over == []


def test_update_budget():
    _update_budget(n=64, seeds=40)


@pytest.mark.slow
def test_update_budget_full_scale():
    _update_budget(n=256, seeds=200)


def _sweep(sizes, variant, generator, seeds, preset=None):
    records = []
    for n in sizes:
        for seed in range(seeds):
            job = BenchJob(
                n, variant, preset, None, seed, SchedulePolicy.FIFO, generator, 2, DEGREE_BOUND, 2
            )
            records.append(run_job(job))
    return records


def test_two_way_message_scaling():
    records = _sweep([64, 128, 256], Variant.TWO_WAY_VERTEX, GeneratorKind.RANDOM, 4, QPreset.MSG_VERTEX)
    # small sizes sit below the asymptotic regime
    assert 0.9 <= fit_slope(records) <= 2.0


@pytest.mark.slow
def test_two_way_message_scaling_full_scale():
    records = _sweep([128, 256, 512, 1024], Variant.TWO_WAY_VERTEX, GeneratorKind.RANDOM, 20, QPreset.MSG_VERTEX)
    assert 1.2 <= fit_slope(records) <= 1.8


def _queue_ratio_trend(sizes, seeds) -> None:
    records = _sweep(sizes, Variant.QUEUE_FULL, GeneratorKind.DENSE, seeds)
    ratios = []
    for n in sizes:
        totals = [r.counters.total for r in records if r.n == n]
        ratios.append(np.mean(totals) / (n * n * math.log2(n)))
    for smaller, larger in zip(ratios, ratios[1:]):
        assert larger <= 1.25 * smaller


def test_queue_message_ratio_trend():
    _queue_ratio_trend([16, 32, 64], seeds=3)


@pytest.mark.slow
def test_queue_message_ratio_trend_full_scale():
    _queue_ratio_trend([50, 100, 200], seeds=20)


def test_arc_ranked_corpus_detection():
    for seed in range(20):
        n, arcs = _arc_stream(seed, 24)
        engine = CycleEngine(arc_scheme(n, preset_q(QPreset.MSG_ARC, n, len(arcs)), seed))
        graph = to_digraph(n, [])
        for u, v in arcs:
            outcome = engine.Insert(u, v)
            assert outcome.is_cycle == reaches(graph, v, u)
            if outcome.is_cycle:
                break
            graph.add_edge(u, v)

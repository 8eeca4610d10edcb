import concurrent.futures
import csv
import itertools
import json
import logging
import time
from dataclasses import dataclass, field
import networkx as nx
import numpy as np
from bench_constants import *
from config import STATIC_ORACLE_MAX_N
from cycle_engine import CycleEngine, EngineCounters, PropagationPolicy
from generators import InsertionSequence, build_sequence
from message_sim import MessageCounters, MessageSimulator, SchedulePolicy, SimVariant
from oracle import (
    check_weak_order,
    check_witness,
    label_mismatches,
    label_stats,
    max_backward_set_size,
    reaches,
    static_labels,
    to_digraph,
    topological_labels,
)
from queue_engine import QueueEngine
from rank_schemes import (
    QPreset,
    RankAssignment,
    arc_scheme,
    full_scheme,
    preset_q,
    sample_vertex_scheme,
)


def make_ranks(variant: Variant, n: int, q: float, seed: int) -> RankAssignment:
    match Variant(variant):
        case Variant.TWO_WAY_VERTEX:
            return sample_vertex_scheme(n, q, seed)
        case Variant.TWO_WAY_ARC:
            return arc_scheme(n, q, seed)
        case Variant.QUEUE_FULL:
            return full_scheme(n, seed)


def make_engine(variant: Variant, ranks: RankAssignment, policy: PropagationPolicy, seed: int):
    if Variant(variant) is Variant.QUEUE_FULL:
        return QueueEngine(ranks, policy, seed)
    return CycleEngine(ranks, policy, seed)


def sim_variant(variant: Variant) -> SimVariant:
    return SimVariant.QUEUE if Variant(variant) is Variant.QUEUE_FULL else SimVariant.TWO_WAY


@dataclass
class RunRecord:
    n: int
    m: int
    q: float
    variant: Variant
    policy: SchedulePolicy
    seed: int
    counters: MessageCounters
    label_changes: int
    wall_ms: float
    outcome: str
    inserted: int = 0
    witness: tuple | None = None
    preset: QPreset | None = None

    def AsRow(self) -> dict:
        c = self.counters
        return {
            "n": self.n,
            "m": self.m,
            "q": f"{self.q:.6g}",
            "variant": str(self.variant),
            "policy": str(self.policy),
            "seed": self.seed,
            "backward": c.backward,
            "forward": c.forward,
            "cycle": c.cycle,
            "nocycle": c.nocycle,
            "update": c.update,
            "reply": c.reply,
            "total_msgs": c.total,
            "label_changes": self.label_changes,
            "wall_ms": f"{self.wall_ms:.3f}",
            "outcome": self.outcome,
        }

    def AsJson(self, include_wall: bool = True) -> str:
        record = self.AsRow()
        if not include_wall:
            del record["wall_ms"]
        record["messages"] = self.counters.AsDict()
        record["inserted"] = self.inserted
        record["witness"] = list(self.witness) if self.witness else None
        return json.dumps(record, indent=4)


def run_sequence(
    sequence: InsertionSequence,
    variant: Variant,
    q: float,
    policy: SchedulePolicy = SchedulePolicy.FIFO,
    seed: int = 0,
    trace: bool = False,
) -> tuple[RunRecord, MessageSimulator]:
    """Replay a sequence through the message simulator until the first cycle."""
    ranks = make_ranks(variant, sequence.n, q, seed)
    sim = MessageSimulator(ranks, sim_variant(variant), policy, seed, trace)

    start = time.perf_counter()
    result = sim.RunSequence(sequence.arcs)
    wall_ms = (time.perf_counter() - start) * 1000

    record = RunRecord(
        n=sequence.n,
        m=sequence.m,
        q=q,
        variant=Variant(variant),
        policy=SchedulePolicy(policy),
        seed=seed,
        counters=result.totals,
        label_changes=sum(outcome.change_count for outcome, _ in result.records),
        wall_ms=wall_ms,
        outcome=str(result.outcome.kind) if result.outcome else "none",
        inserted=len(result.records),
        witness=result.outcome.witness if result.outcome else None,
    )
    return record, sim


# Verification


@dataclass
class Mismatch:
    seed: int
    prefix_length: int
    check: str
    detail: str

    def __str__(self) -> str:
        return f"seed={self.seed} prefix={self.prefix_length} check={self.check}: {self.detail}"


@dataclass
class VerifyReport:
    seed: int
    variant: Variant
    q: float
    checked: int = 0
    outcome: str = "none"
    mismatches: list[Mismatch] = field(default_factory=list)
    counters: EngineCounters = field(default_factory=EngineCounters)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _labels_text(labels: dict, vertices) -> str:
    return ", ".join(f"{v}={labels[v].Render() or '()'}" for v in vertices)


def verify_sequence(
    sequence: InsertionSequence,
    variant: Variant,
    q: float,
    seed: int,
    policy: PropagationPolicy = PropagationPolicy.DEPTH_FIRST,
    with_sim: bool = False,
) -> VerifyReport:
    """
    Replay a sequence through the engine, cross-checking every insertion.

    Checks detection against reachability, labels against the oracle, the
    weak order, the same-label lists, and (queue variant) the neighbor caches.
    Stops at the first mismatch, which names the seed and the prefix length
    that reproduces it.
    """
    report = VerifyReport(seed, Variant(variant), q)
    engine = make_engine(variant, make_ranks(variant, sequence.n, q, seed), policy, seed)
    report.counters = engine.counters
    sim = None
    if with_sim:
        sim = MessageSimulator(
            make_ranks(variant, sequence.n, q, seed), sim_variant(variant), SchedulePolicy.FIFO, seed
        )

    graph = to_digraph(sequence.n, [])
    labeler = static_labels if sequence.n <= STATIC_ORACLE_MAX_N else topological_labels

    def fail(k, check, detail) -> VerifyReport:
        mismatch = Mismatch(seed, k, check, detail)
        logging.error(f"Verification mismatch: {mismatch}")
        report.mismatches.append(mismatch)
        return report

    for k, (u, v) in enumerate(sequence.arcs, start=1):
        expect_cycle = reaches(graph, v, u)
        outcome = engine.Insert(u, v)
        report.checked = k
        report.outcome = str(outcome.kind)

        if outcome.is_cycle != expect_cycle:
            return fail(k, "detection", f"arc ({u}, {v}) reported {outcome.kind}, oracle cycle={expect_cycle}")

        if sim is not None:
            sim_outcome, _ = sim.SimulateInsert(u, v)
            if sim_outcome.kind is not outcome.kind:
                return fail(k, "simulator", f"arc ({u}, {v}) simulator {sim_outcome.kind}, engine {outcome.kind}")

        if outcome.is_cycle:
            if not check_witness(graph.edges, outcome.witness, (u, v)):
                return fail(k, "witness", f"{outcome.witness} is not a cycle through ({u}, {v})")
            break

        graph.add_edge(u, v)

        expected = labeler(graph, engine.ranks)
        wrong = label_mismatches(expected, engine.labels)
        if wrong:
            return fail(k, "labels", f"expected {_labels_text(expected, wrong[:5])}, got {_labels_text(engine.labels, wrong[:5])}")

        broken = check_weak_order(engine.arcs, engine.labels)
        if broken:
            return fail(k, "weak-order", f"arcs {broken[:5]} point to lex-greater labels")

        stale = engine.CheckSameLabelPreds()
        if stale:
            return fail(k, "same-label", f"same-label lists stale at {stale[:5]}")

        if isinstance(engine, QueueEngine):
            unsafe = engine.CheckCaches()
            if unsafe:
                return fail(k, "cache", f"caches below actual labels at {unsafe[:5]}")

        if sim is not None:
            wrong = label_mismatches(engine.labels, sim.labels)
            if wrong:
                return fail(k, "simulator", f"simulator labels differ at {wrong[:5]}")

    return report


# Sweeps


@dataclass(frozen=True)
class BenchJob:
    n: int
    variant: Variant
    preset: QPreset | None
    q: float | None
    seed: int
    policy: SchedulePolicy
    generator: GeneratorKind
    density: int
    max_degree: int | None
    layers: int


def job_arc_count(job: BenchJob) -> int:
    if job.generator is GeneratorKind.DENSE:
        return job.n * (job.n - 1) // 2
    if job.generator is GeneratorKind.PATH:
        return max(job.n - 1, 0)
    return job.density * job.n


def run_job(job: BenchJob) -> RunRecord:
    sequence = build_sequence(
        job.generator, job.n, job_arc_count(job), job.seed, job.max_degree, job.layers
    )

    if job.variant is Variant.QUEUE_FULL:
        q = 1.0
    elif job.preset is not None:
        q = preset_q(job.preset, job.n, sequence.m)
    else:
        q = job.q

    record, _ = run_sequence(sequence, job.variant, q, job.policy, job.seed)
    record.preset = QPreset.FULL_RANK if job.variant is Variant.QUEUE_FULL else job.preset
    return record


def plan_sweep(
    sizes: list[int],
    variants: list[Variant],
    presets: list[QPreset],
    seeds: int,
    base_seed: int = 0,
    q: float | None = None,
    policy: SchedulePolicy = SchedulePolicy.FIFO,
    generator: GeneratorKind = GeneratorKind.RANDOM,
    density: int = DEGREE_DENSITY,
    max_degree: int | None = DEGREE_BOUND,
    layers: int = 2,
) -> list[BenchJob]:
    """
    Cross product of sizes, variants, q choices and seeds, in row order.

    An explicit q replaces the presets. The queue variant always runs fully
    ranked, so it gets one job per size and seed.
    """
    choices = [(None, q)] if q is not None else [(preset, None) for preset in presets]

    jobs = []
    for n, variant, seed in itertools.product(sizes, variants, range(base_seed, base_seed + seeds)):
        variant_choices = choices[:1] if variant is Variant.QUEUE_FULL else choices
        for preset, fixed_q in variant_choices:
            jobs.append(
                BenchJob(n, variant, preset, fixed_q, seed, policy, generator, density, max_degree, layers)
            )
    return jobs


def run_sweep(jobs: list[BenchJob], workers: int = 1) -> list[RunRecord]:
    logging.info(f"Running {len(jobs)} bench jobs on {workers} worker(s)")
    if workers <= 1:
        return [run_job(job) for job in jobs]

    # map keeps submission order, so rows stay deterministic
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run_job, jobs))


def write_csv(records: list[RunRecord], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record.AsRow())


def fit_groups(records: list[RunRecord]) -> dict[tuple, list[RunRecord]]:
    """Records keyed by (variant, preset) in first-seen order; fixed-q runs carry preset None."""
    groups: dict[tuple, list[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.variant, record.preset), []).append(record)
    return groups


def fit_slope(records: list[RunRecord], axis: FitAxis = FitAxis.N) -> float | None:
    """Least-squares slope of log(mean total messages) against log(n) or log(m)."""
    groups: dict[int, list[int]] = {}
    for record in records:
        x = record.n if FitAxis(axis) is FitAxis.N else record.m
        groups.setdefault(x, []).append(record.counters.total)

    points = [(x, np.mean(totals)) for x, totals in sorted(groups.items()) if x > 0]
    points = [(x, y) for x, y in points if y > 0]
    if len(points) < 2:
        return None

    xs, ys = zip(*points)
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


# Analysis experiments


def label_change_budget(
    sequence: InsertionSequence,
    q: float,
    seeds: list[int],
    policy: PropagationPolicy = PropagationPolicy.BREADTH_FIRST,
) -> list[tuple[int, float, int]]:
    """
    Mean label changes per vertex over rank seeds on one fixed sequence.

    :return: (vertex, mean changes, mean ranked predecessors) per vertex, with
        predecessors counted over P(v) including v and averaged over seeds
    """
    graph = to_digraph(sequence.n, sequence.arcs)
    ancestors = {v: nx.ancestors(graph, v) | {v} for v in graph.nodes}

    changes = np.zeros(sequence.n)
    ranked_preds = np.zeros(sequence.n)
    for seed in seeds:
        engine = CycleEngine(sample_vertex_scheme(sequence.n, q, seed), policy, seed)
        for u, v in sequence.arcs:
            engine.Insert(u, v)
        for v in range(sequence.n):
            changes[v] += engine.change_counter[v]
            ranked_preds[v] += sum(1 for w in ancestors[v] if engine.ranks.IsRanked(w))

    runs = max(len(seeds), 1)
    return [(v, changes[v] / runs, ranked_preds[v] / runs) for v in range(sequence.n)]


def tail_trial(
    sequence: InsertionSequence,
    variant: Variant,
    q: float,
    seed: int,
    backward_every_insert: bool = False,
) -> dict:
    """Label length and same-label backward set maxima for one seeded replay."""
    engine = make_engine(variant, make_ranks(variant, sequence.n, q, seed), PropagationPolicy.DEPTH_FIRST, seed)
    graph = to_digraph(sequence.n, [])
    max_backward = 0

    for u, v in sequence.arcs:
        if engine.Insert(u, v).is_cycle:
            break
        graph.add_edge(u, v)
        if backward_every_insert:
            max_backward = max(max_backward, max_backward_set_size(graph, engine.labels))

    if not backward_every_insert:
        max_backward = max_backward_set_size(graph, engine.labels)

    stats = label_stats(engine.labels)
    return {
        "seed": seed,
        "max_label_length": stats["max_length"],
        "mean_label_length": stats["mean_length"],
        "max_backward_set": max_backward,
    }

from dataclasses import dataclass, field
import networkx as nx
import numpy as np
from bench_constants import *


class GeneratorSpecError(Exception):
    def __init__(self, reason) -> None:
        super().__init__(f"Invalid generator settings: {reason}")


@dataclass(frozen=True)
class InsertionSequence:
    n: int
    arcs: list[tuple[int, int]] = field(default_factory=list)
    # last arc closes a cycle on purpose
    closes_cycle: bool = False

    @property
    def m(self) -> int:
        return len(self.arcs)


def _check_size(n, m=0) -> None:
    if n < 0:
        raise GeneratorSpecError(f"vertex count must be non-negative, got {n}")
    if m < 0:
        raise GeneratorSpecError(f"arc count must be non-negative, got {m}")


def _shuffled(arcs: list, rng: np.random.Generator) -> list[tuple[int, int]]:
    return [tuple(int(x) for x in arcs[i]) for i in rng.permutation(len(arcs))]


def _sample_forward_arcs(n, m, rng, allowed, capacity, max_degree=None) -> list:
    """
    Draw m distinct arcs (a, b) with a before b in a random vertex order.

    `allowed(i, j)` filters position pairs; rejection sampling is capped at
    ATTEMPTS_PER_ARC draws per arc.
    """
    if m > capacity:
        raise GeneratorSpecError(f"{m} arcs requested but only {capacity} fit")

    order = rng.permutation(n)
    out_degree = np.zeros(n, dtype=np.int64)
    chosen: set = set()
    arcs = []

    attempts = 0
    limit = ATTEMPTS_PER_ARC * m + n
    while len(arcs) < m:
        attempts += 1
        if attempts > limit:
            raise GeneratorSpecError(
                f"gave up after {limit} draws with {len(arcs)} of {m} arcs placed"
            )

        i, j = sorted(int(x) for x in rng.integers(n, size=2))
        if i == j or not allowed(i, j):
            continue

        a, b = int(order[i]), int(order[j])
        if (a, b) in chosen:
            continue
        if max_degree is not None and out_degree[a] >= max_degree:
            continue

        chosen.add((a, b))
        out_degree[a] += 1
        arcs.append((a, b))

    return arcs


def random_dag_order(n: int, m: int, seed: int, max_degree: int | None = None) -> InsertionSequence:
    _check_size(n, m)
    rng = np.random.default_rng(seed)

    capacity = n * (n - 1) // 2
    if max_degree is not None:
        if max_degree < 1:
            raise GeneratorSpecError(f"max degree must be positive, got {max_degree}")
        capacity = sum(min(max_degree, n - 1 - i) for i in range(n))

    if max_degree is None and 2 * m > capacity:
        if m > capacity:
            raise GeneratorSpecError(f"{m} arcs requested but only {capacity} fit")
        # dense requests: pick from the full forward set instead of rejecting
        order = rng.permutation(n)
        pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
        picked = rng.choice(len(pairs), size=m, replace=False)
        return InsertionSequence(n, _shuffled([pairs[k] for k in picked], rng))

    arcs = _sample_forward_arcs(n, m, rng, lambda i, j: True, capacity, max_degree)
    return InsertionSequence(n, _shuffled(arcs, rng))


def layered(n: int, layers: int, m: int, seed: int) -> InsertionSequence:
    """Arcs only run from a lower layer to a strictly higher one."""
    _check_size(n, m)
    if not 1 <= layers <= max(n, 1):
        raise GeneratorSpecError(f"layer count must lie in [1, {max(n, 1)}], got {layers}")

    rng = np.random.default_rng(seed)
    layer_of = [i * layers // n for i in range(n)]
    sizes = np.bincount(layer_of, minlength=layers) if n else np.zeros(layers, dtype=np.int64)
    capacity = int((sizes.sum() ** 2 - (sizes**2).sum()) // 2)

    arcs = _sample_forward_arcs(
        n, m, rng, lambda i, j: layer_of[i] < layer_of[j], capacity
    )
    return InsertionSequence(n, _shuffled(arcs, rng))


def path(n: int) -> InsertionSequence:
    _check_size(n)
    return InsertionSequence(n, [(i, i + 1) for i in range(n - 1)])


def dense_all(n: int, seed: int) -> InsertionSequence:
    _check_size(n)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    return InsertionSequence(n, _shuffled(pairs, rng))


def with_final_cycle(inner: InsertionSequence) -> InsertionSequence:
    """
    Append one back arc closing a cycle.

    The arc runs from the farthest descendant (by arc count) of the vertex with
    the most descendants back to that vertex; ties go to the smaller id.
    """
    if not inner.arcs:
        raise GeneratorSpecError("cannot close a cycle in a graph without arcs")

    graph = nx.DiGraph()
    graph.add_nodes_from(range(inner.n))
    graph.add_edges_from(inner.arcs)

    x = max(graph.nodes, key=lambda v: (len(nx.descendants(graph, v)), -v))
    distance = nx.single_source_shortest_path_length(graph, x)
    y = max(distance, key=lambda v: (distance[v], -v))

    return InsertionSequence(inner.n, inner.arcs + [(y, x)], closes_cycle=True)


def build_sequence(
    kind: GeneratorKind,
    n: int,
    m: int = 0,
    seed: int = 0,
    max_degree: int | None = None,
    layers: int = 2,
    final_cycle: bool = False,
) -> InsertionSequence:
    match GeneratorKind(kind):
        case GeneratorKind.RANDOM:
            sequence = random_dag_order(n, m, seed, max_degree)
        case GeneratorKind.LAYERED:
            sequence = layered(n, layers, m, seed)
        case GeneratorKind.PATH:
            sequence = path(n)
        case GeneratorKind.DENSE:
            sequence = dense_all(n, seed)

    if final_cycle:
        sequence = with_final_cycle(sequence)
    return sequence

from collections import defaultdict
import networkx as nx
import numpy as np
from labels import EMPTY_LABEL, Entry, Label, Ordering, cmp_lex, derive_label
from rank_schemes import RankAssignment


class CyclicGraphError(Exception):
    def __init__(self, cycle=None) -> None:
        detail = f": {cycle}" if cycle else ""
        super().__init__(f"Static labels are only defined on acyclic graphs{detail}")


def to_digraph(n: int, arcs) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(arcs)
    return graph


def _require_acyclic(graph: nx.DiGraph) -> None:
    if not nx.is_directed_acyclic_graph(graph):
        raise CyclicGraphError(nx.find_cycle(graph))


def static_labels(graph: nx.DiGraph, ranks: RankAssignment) -> dict[int, Label]:
    """
    Labels straight from their definition.

    The first entry is the lowest-ranked ranked ancestor of v (v included);
    each next entry is the lowest-ranked ranked vertex strictly below the
    previous one that still reaches v.
    """
    _require_acyclic(graph)

    descendants: dict[int, set] = {}
    labeling = {}
    for v in graph.nodes:
        candidates = {w for w in nx.ancestors(graph, v) | {v} if ranks.IsRanked(w)}
        entries = []
        while candidates:
            chosen = min(candidates, key=ranks.RankOf)
            entries.append(Entry(chosen, ranks.RankOf(chosen)))
            if chosen not in descendants:
                descendants[chosen] = nx.descendants(graph, chosen)
            candidates &= descendants[chosen]
        labeling[v] = Label(entries)

    return labeling


def topological_labels(graph: nx.DiGraph, ranks: RankAssignment) -> dict[int, Label]:
    """Labels from in-neighbor labels, one vertex at a time in topological order."""
    try:
        order = list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible:
        raise CyclicGraphError(nx.find_cycle(graph))

    labeling = {}
    for v in order:
        labeling[v] = derive_label(
            (labeling[x] for x in graph.predecessors(v)), v, ranks.RankOf(v)
        )
    return labeling


def reaches(graph: nx.DiGraph, a, b) -> bool:
    return a == b or nx.has_path(graph, a, b)


def label_mismatches(expected: dict, actual: dict) -> list[int]:
    return sorted(v for v in expected if actual.get(v, EMPTY_LABEL) != expected[v])


def check_no_path_theorem(graph: nx.DiGraph, labeling: dict) -> list[tuple[int, int]]:
    """Pairs (u, v) where u has the lex-greater label yet v reaches u."""
    violations = []
    for v in graph.nodes:
        for u in nx.descendants(graph, v):
            if cmp_lex(labeling[u], labeling[v]) is Ordering.GREATER:
                violations.append((u, v))
    return sorted(violations)


def check_weak_order(arcs, labeling: dict) -> list[tuple[int, int]]:
    return [(x, y) for x, y in arcs if cmp_lex(labeling[x], labeling[y]) is Ordering.LESS]


def check_witness(arcs, witness, arc) -> bool:
    """True iff `witness` is a closed walk over `arcs` (plus `arc`) that uses `arc`."""
    if witness is None or len(witness) < 2 or witness[0] != witness[-1]:
        return False

    present = set(arcs) | {tuple(arc)}
    steps = list(zip(witness, witness[1:]))
    return all(step in present for step in steps) and tuple(arc) in steps


def _is_unranked(labeling: dict, v) -> bool:
    label = labeling[v]
    return len(label) == 0 or label.entries[-1].vertex != v


def backward_set_size(graph: nx.DiGraph, labeling: dict, v) -> int:
    """Unranked ancestors of v sharing v's label; v itself never counts."""
    return sum(
        1
        for u in nx.ancestors(graph, v)
        if labeling[u] == labeling[v] and _is_unranked(labeling, u)
    )


def max_backward_set_size(graph: nx.DiGraph, labeling: dict) -> int:
    # equal labels are closed under paths between their members, so the
    # induced subgraph of each label class holds all the relevant ancestors
    classes = defaultdict(list)
    for v in graph.nodes:
        classes[labeling[v]].append(v)

    best = 0
    for members in classes.values():
        if len(members) < 2:
            continue
        sub = graph.subgraph(members)
        for v in members:
            count = sum(1 for u in nx.ancestors(sub, v) if _is_unranked(labeling, u))
            best = max(best, count)
    return best


def label_stats(labeling: dict) -> dict:
    lengths = np.array([len(label) for label in labeling.values()], dtype=np.int64)
    if lengths.size == 0:
        return {"max_length": 0, "mean_length": 0.0, "distinct": 0}

    return {
        "max_length": int(lengths.max()),
        "mean_length": float(lengths.mean()),
        "distinct": len(set(labeling.values())),
    }

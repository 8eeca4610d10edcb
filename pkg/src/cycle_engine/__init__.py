import json
import logging
from collections import Counter
from dataclasses import dataclass
import numpy as np
from labels import (
    EMPTY_LABEL,
    Entry,
    Label,
    Ordering,
    cmp_lex,
    label_via_arc,
    merge_for_arc,
    rerank_entry,
)
from rank_schemes import RankAssignment, RankMode, arc_rank_on_insert
from cycle_engine.engine_constants import *
from cycle_engine.worklist import Worklist


class EngineHaltedError(Exception):
    def __init__(self) -> None:
        super().__init__("engine halted after cycle")


class UnknownVertexError(Exception):
    def __init__(self, vertex, n) -> None:
        super().__init__(f"Unknown vertex {vertex}; engine has {n} vertices")


class WitnessSplicingError(Exception):
    def __init__(self, u, v, meet, reason) -> None:
        super().__init__(
            f"Could not splice witness cycle for arc ({u}, {v}) meeting at {meet}: {reason}"
        )


@dataclass(frozen=True)
class InsertOutcome:
    kind: OutcomeKind
    change_count: int = 0
    witness: tuple | None = None

    @classmethod
    def AlreadyOrdered(cls) -> "InsertOutcome":
        return cls(OutcomeKind.ALREADY_ORDERED)

    @classmethod
    def LabelsUpdated(cls, change_count: int) -> "InsertOutcome":
        return cls(OutcomeKind.LABELS_UPDATED, change_count)

    @classmethod
    def CycleDetected(cls, witness) -> "InsertOutcome":
        return cls(OutcomeKind.CYCLE_DETECTED, 0, tuple(witness))

    @property
    def is_cycle(self) -> bool:
        return self.kind is OutcomeKind.CYCLE_DETECTED


@dataclass
class EngineCounters:
    backward_probes: int = 0
    forward_probes: int = 0
    update_messages: int = 0
    label_changes: int = 0


def initial_label(ranks: RankAssignment, v) -> Label:
    if ranks.IsRanked(v):
        return Label([Entry(v, ranks.RankOf(v))])
    return EMPTY_LABEL


def build_snapshot(n, arcs, ranks: RankAssignment, labels, halted) -> dict:
    """Golden-test export shared by the engines and the simulator."""
    return {
        "vertices": n,
        "arcs": [[u, v] for u, v in arcs],
        "ranks": {str(v): ranks.vertex_rank[v] for v in sorted(ranks.vertex_rank)},
        "labels": {str(v): labels[v].AsList() for v in range(n)},
        "halted": halted,
    }


class CycleEngine:
    """
    Incremental cycle detection over a growing DAG by recursive labels.

    Labels are kept equal to their from-scratch definition after every
    insertion that does not close a cycle; the first cycle halts the engine
    with labels as they were before the offending arc.
    """

    def __init__(
        self,
        ranks: RankAssignment,
        policy: PropagationPolicy = PropagationPolicy.DEPTH_FIRST,
        policy_seed: int = 0,
        probe_pruned: bool = True,
    ) -> None:
        self.ranks = ranks
        self.policy = PropagationPolicy(policy)
        self.probe_pruned = probe_pruned
        self._rng = np.random.default_rng(policy_seed)

        self.out_adj: dict[int, list[int]] = {}
        self.in_adj: dict[int, list[int]] = {}
        self.arcs: list[tuple[int, int]] = []
        self._arc_set: set[tuple[int, int]] = set()
        self.labels: dict[int, Label] = {}
        self.same_label_preds: dict[int, set[int]] = {}
        self.change_counter: Counter = Counter()
        self.counters = EngineCounters()
        self.halted = False
        self.witness: tuple | None = None

        for v in range(ranks.n):
            self._InitVertex(v)

    @property
    def n(self) -> int:
        return len(self.labels)

    def _InitVertex(self, v) -> None:
        self.out_adj[v] = []
        self.in_adj[v] = []
        self.labels[v] = initial_label(self.ranks, v)
        self.same_label_preds[v] = set()

    def _CheckVertex(self, v) -> None:
        if v not in self.labels:
            raise UnknownVertexError(v, self.n)

    def _NewWorklist(self) -> Worklist:
        return Worklist(self.policy, self._rng)

    def HasArc(self, u, v) -> bool:
        return (u, v) in self._arc_set

    def AddVertex(self, ranked: bool | None = None) -> int:
        if self.halted:
            raise EngineHaltedError()

        v = self.ranks.AddVertex(ranked)
        self._InitVertex(v)
        return v

    def Insert(self, u, v) -> InsertOutcome:
        if self.halted:
            logging.warning(f"Refusing arc ({u}, {v}): engine already halted")
            raise EngineHaltedError()

        self._CheckVertex(u)
        self._CheckVertex(v)

        if u == v:
            return self._Halt(u, v, (u, u))

        if self.HasArc(u, v):
            return InsertOutcome.AlreadyOrdered()

        label_u = self.labels[u]
        order = cmp_lex(label_u, self.labels[v])

        if order is not Ordering.GREATER:
            found, probed, parent_b = self.BackwardSearch(u, v, label_u)
            if found:
                return self._Halt(u, v, self.WitnessCycle(parent_b, {}, v, u, v))

            if order is Ordering.LESS:
                hit, parent_f = self.ForwardSearch(v, label_u, probed)
                if hit is not None:
                    return self._Halt(
                        u, v, self.WitnessCycle(parent_b, parent_f, hit, u, v)
                    )

        self._AddArc(u, v)
        changes = self._ApplyArcRank(u, v)

        after = cmp_lex(self.labels[u], self.labels[v])
        if after is Ordering.LESS:
            changes += self.UpdatePropagate(u, v)
        elif after is Ordering.EQUAL:
            self.same_label_preds[v].add(u)

        if order is Ordering.GREATER and changes == 0:
            return InsertOutcome.AlreadyOrdered()

        return InsertOutcome.LabelsUpdated(changes)

    def _Halt(self, u, v, witness) -> InsertOutcome:
        self.halted = True
        self.witness = tuple(witness)
        logging.info(
            f"Cycle closed by arc ({u}, {v}): {' -> '.join(str(w) for w in witness)}"
        )
        return InsertOutcome.CycleDetected(witness)

    def _AddArc(self, u, v) -> None:
        self.out_adj[u].append(v)
        self.in_adj[v].append(u)
        self.arcs.append((u, v))
        self._arc_set.add((u, v))

    def _ApplyArcRank(self, u, v) -> int:
        if self.ranks.mode is not RankMode.ARC_Q:
            return 0

        _, lowered = arc_rank_on_insert(self.ranks, (u, v))
        if not lowered:
            return 0

        return self.RepairAfterRankDecrease(v, self.ranks.RankOf(v))

    def BackwardSearch(self, u, v, label_u: Label) -> tuple[bool, set, dict]:
        """
        Probe in-neighbors from u, spreading only through vertices labelled like u.

        Every vertex that receives a probe lands in `probed`, pruned ones
        included. `parent[w]` is the out-neighbor whose probe reached w first.
        """
        probed = {u}
        parent: dict[int, int] = {}
        stack = [u]

        while stack:
            x = stack.pop()

            if self.probe_pruned:
                senders = self.in_adj[x]
            else:
                senders = list(self.same_label_preds[x])
                if (v, x) in self._arc_set:
                    senders.append(v)

            for w in senders:
                self.counters.backward_probes += 1

                if w == v:
                    parent[w] = x
                    return True, probed, parent

                if w in probed:
                    continue

                probed.add(w)
                parent[w] = x
                if self.labels[w] == label_u:
                    stack.append(w)

        return False, probed, parent

    def ForwardSearch(self, v, label_u: Label, probed: set) -> tuple[int | None, dict]:
        """
        Carry label_u forward from v through vertices with lex-greater labels.

        Any probed vertex met on the way, pruned or not, is a hit.
        """
        parent: dict[int, int] = {}
        visited = {v}
        stack = [v]

        while stack:
            x = stack.pop()
            for w in self.out_adj[x]:
                self.counters.forward_probes += 1

                if w in probed:
                    parent[w] = x
                    return w, parent

                if w in visited:
                    continue

                visited.add(w)
                if label_u.ranks < self.labels[w].ranks:
                    parent[w] = x
                    stack.append(w)

        return None, parent

    def WitnessCycle(self, parent_b: dict, parent_f: dict, meet, u, v) -> tuple:
        """Closed walk v ~> meet ~> u -> v spliced from the two parent maps."""
        if u == v:
            return (u, u)

        limit = len(parent_b) + len(parent_f) + 2

        walk = [meet]
        x = meet
        while x != v:
            if x not in parent_f or len(walk) > limit:
                raise WitnessSplicingError(u, v, meet, f"forward chain broken at {x}")
            x = parent_f[x]
            walk.append(x)
        walk.reverse()

        x = meet
        while x != u:
            if x not in parent_b or len(walk) > limit:
                raise WitnessSplicingError(u, v, meet, f"backward chain broken at {x}")
            x = parent_b[x]
            walk.append(x)
        walk.append(v)

        for a, b in zip(walk, walk[1:]):
            if (a, b) != (u, v) and (a, b) not in self._arc_set:
                raise WitnessSplicingError(u, v, meet, f"({a}, {b}) is not an arc")

        return tuple(walk)

    def UpdatePropagate(self, u, v) -> int:
        """Run Update(u, v) to quiescence; returns the number of label changes."""
        worklist = self._NewWorklist()
        worklist.Push((u, v, self.labels[u]))
        return self._Propagate(worklist)

    def RepairAfterRankDecrease(self, v, new_rank) -> int:
        """
        Re-establish labels after v's rank dropped to `new_rank`.

        v keeps the part of its label ranked below new_rank and ends with
        itself; downstream receivers rewrite any stale entry for v before
        merging.
        """
        if self.ranks.RankOf(v) != new_rank:
            self.ranks.SetVertexRank(v, new_rank)

        repaired = label_via_arc(self.labels[v], v, new_rank)
        if repaired == self.labels[v]:
            return 0

        self._SetLabel(v, repaired)
        worklist = self._NewWorklist()
        self._PushOutArcs(worklist, v, repaired)
        return 1 + self._Propagate(worklist, rerank=(v, new_rank))

    def _PushOutArcs(self, worklist: Worklist, y, label: Label) -> None:
        targets = self.out_adj[y]
        if self.policy is PropagationPolicy.DEPTH_FIRST:
            targets = reversed(targets)
        for w in targets:
            worklist.Push((y, w, label))

    def _Propagate(self, worklist: Worklist, rerank: tuple | None = None) -> int:
        changes = 0
        while worklist:
            x, y, carried = worklist.Pop()
            self.counters.update_messages += 1

            current = self.labels[y]
            if rerank is not None:
                current = rerank_entry(current, *rerank)

            merged = merge_for_arc(carried, current, y, self.ranks.RankOf(y))
            if merged != self.labels[y]:
                self._SetLabel(y, merged)
                changes += 1
                self._PushOutArcs(worklist, y, merged)

            if self.labels[x] == self.labels[y]:
                self.same_label_preds[y].add(x)

        return changes

    def _SetLabel(self, y, label: Label) -> None:
        self.labels[y] = label
        self.change_counter[y] += 1
        self.counters.label_changes += 1
        self.same_label_preds[y] = set()
        for w in self.out_adj[y]:
            self.same_label_preds[w].discard(y)

    def CheckSameLabelPreds(self) -> list[int]:
        """Vertices whose maintained same-label list differs from a rescan."""
        return [
            v
            for v in self.labels
            if self.same_label_preds[v]
            != {x for x in self.in_adj[v] if self.labels[x] == self.labels[v]}
        ]

    def Snapshot(self) -> dict:
        return build_snapshot(self.n, self.arcs, self.ranks, self.labels, self.halted)

    def SnapshotJson(self) -> str:
        return json.dumps(self.Snapshot(), indent=4, sort_keys=True)



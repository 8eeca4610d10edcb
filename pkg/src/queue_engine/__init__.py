import heapq
import logging
from collections import defaultdict
from labels import Label, Ordering, cmp_lex, merge_for_arc
from rank_schemes import RankAssignment, RankMode, RankModeError
from cycle_engine import CycleEngine, PropagationPolicy
from cycle_engine.worklist import Worklist


class _Descending:
    """Heap key inverting rank-sequence order so the largest label pops first."""

    __slots__ = ("ranks",)

    def __init__(self, ranks: tuple) -> None:
        self.ranks = ranks

    def __lt__(self, other: "_Descending") -> bool:
        return self.ranks > other.ranks

    def __eq__(self, other) -> bool:
        return self.ranks == other.ranks


class NeighborCache:
    """
    One vertex's view of its out-neighbors' labels, as last replied.

    Entries are never removed from the heap in place; each Set bumps a stamp
    and older heap entries for the same neighbor are skipped when they surface.
    """

    def __init__(self) -> None:
        self.cached: dict[int, Label] = {}
        self._stamp: dict[int, int] = {}
        self._heap: list = []

    def __len__(self) -> int:
        return len(self.cached)

    def Get(self, u) -> Label | None:
        return self.cached.get(u)

    def Set(self, u, label: Label) -> None:
        stamp = self._stamp.get(u, 0) + 1
        self._stamp[u] = stamp
        self.cached[u] = label
        heapq.heappush(self._heap, (_Descending(label.ranks), u, stamp))

    def PopAbove(self, label: Label) -> list[int]:
        """
        Remove and return the neighbors cached lex-greater than `label`.

        Popped neighbors keep their cached value but leave the queue until the
        next Set, which their reply always performs.
        """
        popped = []
        while self._heap:
            key, u, stamp = self._heap[0]
            if stamp != self._stamp[u]:
                heapq.heappop(self._heap)
                continue
            if key.ranks <= label.ranks:
                break
            heapq.heappop(self._heap)
            self._stamp[u] = stamp + 1
            popped.append(u)
        return popped

    def AsDict(self) -> dict:
        return {str(u): self.cached[u].AsList() for u in sorted(self.cached)}


class QueueEngine(CycleEngine):
    """
    Cycle engine whose Update only messages out-neighbors cached lex-greater
    than the sender's new label. Every update is answered by a label reply.
    """

    def __init__(
        self,
        ranks: RankAssignment,
        policy: PropagationPolicy = PropagationPolicy.DEPTH_FIRST,
        policy_seed: int = 0,
        probe_pruned: bool = True,
    ) -> None:
        if ranks.mode is RankMode.ARC_Q:
            raise RankModeError(RankMode.FULL, ranks.mode)

        self.caches: dict[int, NeighborCache] = {}
        self.reply_messages = 0
        self.init_replies = 0
        self.max_futile_streak = 0
        self._futile: dict[int, dict[int, int]] = defaultdict(dict)

        super().__init__(ranks, policy, policy_seed, probe_pruned)

        if ranks.ranked_count < ranks.n:
            logging.warning(
                f"Queue engine running with {ranks.n - ranks.ranked_count} of "
                f"{ranks.n} vertices unranked; message bounds assume full ranking"
            )

    def _InitVertex(self, v) -> None:
        super()._InitVertex(v)
        self.caches[v] = NeighborCache()

    def _AddArc(self, u, v) -> None:
        super()._AddArc(u, v)
        self.caches[u].Set(v, self.labels[v])
        self.init_replies += 1

    def _SetLabel(self, y, label: Label) -> None:
        super()._SetLabel(y, label)
        self._futile.pop(y, None)

        # senders held back by a cache threshold never report an equal label
        self.same_label_preds[y] = {x for x in self.in_adj[y] if self.labels[x] == label}
        for w in self.out_adj[y]:
            if self.labels[w] == label:
                self.same_label_preds[w].add(y)

    def UpdatePropagate(self, u, v) -> int:
        _, changes = self.QPropagate(u, self.labels[u])
        return changes

    def QPropagate(self, w, new_label: Label) -> tuple[int, int]:
        """
        Spread w's new label through the neighbor caches.

        :return: (update plus reply messages sent, label changes)
        """
        messages = 0
        changes = 0
        worklist = Worklist(self.policy, self._rng)
        worklist.Push((w, new_label))

        while worklist:
            x, threshold = worklist.Pop()
            for y in self.caches[x].PopAbove(threshold):
                self.counters.update_messages += 1
                messages += 1

                merged = merge_for_arc(self.labels[x], self.labels[y], y, self.ranks.RankOf(y))
                if merged != self.labels[y]:
                    self._SetLabel(y, merged)
                    changes += 1
                    worklist.Push((y, merged))
                else:
                    streak = self._futile[y].get(x, 0) + 1
                    self._futile[y][x] = streak
                    self.max_futile_streak = max(self.max_futile_streak, streak)

                self.reply_messages += 1
                messages += 1
                self.caches[x].Set(y, self.labels[y])

                if self.labels[x] == self.labels[y]:
                    self.same_label_preds[y].add(x)

        return messages, changes

    def CheckCaches(self) -> list[tuple[int, int]]:
        """Cached pairs (w, u) whose cache sits lex-below u's actual label."""
        return [
            (w, u)
            for w, cache in self.caches.items()
            for u, label in cache.cached.items()
            if cmp_lex(label, self.labels[u]) is Ordering.LESS
        ]

    def Snapshot(self) -> dict:
        snapshot = super().Snapshot()
        snapshot["caches"] = {
            str(w): cache.AsDict() for w, cache in sorted(self.caches.items()) if len(cache)
        }
        return snapshot

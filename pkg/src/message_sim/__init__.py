import json
import logging
from dataclasses import asdict, dataclass, field
import numpy as np
from labels import Label, Ordering, cmp_lex, label_via_arc, merge_for_arc, rerank_entry
from rank_schemes import RankAssignment, RankMode, RankModeError, arc_rank_on_insert
from cycle_engine import (
    EngineHaltedError,
    InsertOutcome,
    PropagationPolicy,
    UnknownVertexError,
    build_snapshot,
    initial_label,
)
from cycle_engine.worklist import Worklist
from queue_engine import NeighborCache
from message_sim.sim_constants import *

SCHEDULE_ORDER = {
    SchedulePolicy.FIFO: PropagationPolicy.BREADTH_FIRST,
    SchedulePolicy.LIFO: PropagationPolicy.DEPTH_FIRST,
    SchedulePolicy.RANDOM: PropagationPolicy.RANDOM,
}


@dataclass(frozen=True, slots=True)
class Message:
    kind: MessageKind
    src: int
    dst: int
    label: Label | None = None
    path: tuple | None = None
    rerank: tuple | None = None

    def TraceLine(self, seq: int) -> str:
        rendered = self.label.Render() if self.label is not None else "-"
        return f"seq={seq} kind={self.kind} src={self.src} dst={self.dst} label={rendered or '()'}"


@dataclass
class MessageCounters:
    backward: int = 0
    forward: int = 0
    cycle: int = 0
    nocycle: int = 0
    update: int = 0
    reply: int = 0
    # implicit cache initialisations, kept out of `total`
    init_reply: int = 0

    @property
    def total(self) -> int:
        return self.backward + self.forward + self.cycle + self.nocycle + self.update + self.reply

    def Bump(self, kind: MessageKind) -> None:
        setattr(self, kind.value, getattr(self, kind.value) + 1)

    def Add(self, other: "MessageCounters") -> None:
        for name, count in asdict(other).items():
            setattr(self, name, getattr(self, name) + count)

    def AsDict(self) -> dict:
        return asdict(self) | {"total": self.total}

    def AsJson(self) -> str:
        return json.dumps(self.AsDict(), sort_keys=True)


@dataclass
class ProbeState:
    seen: bool = False
    parent: int | None = None
    pending: int = 0
    waiters: list = field(default_factory=list)
    resolved: bool = False
    cycle_sent: bool = False


@dataclass
class SimVertex:
    backward: ProbeState = field(default_factory=ProbeState)
    forward: ProbeState = field(default_factory=ProbeState)

    def Reset(self) -> None:
        self.backward = ProbeState()
        self.forward = ProbeState()


@dataclass
class SequenceResult:
    records: list[tuple[InsertOutcome, MessageCounters]]
    totals: MessageCounters
    outcome: InsertOutcome | None


class MessageSimulator:
    """
    Runs the insertion protocol as per-vertex message handlers on one event loop.

    Each insertion is driven to quiescence phase by phase: backward probes,
    forward probes, rank repair (arc ranking only) and label updates.
    """

    def __init__(
        self,
        ranks: RankAssignment,
        variant: SimVariant = SimVariant.TWO_WAY,
        schedule: SchedulePolicy = SchedulePolicy.FIFO,
        schedule_seed: int = 0,
        trace: bool = False,
    ) -> None:
        self.variant = SimVariant(variant)
        if self.variant is SimVariant.QUEUE and ranks.mode is RankMode.ARC_Q:
            raise RankModeError(RankMode.FULL, ranks.mode)

        self.ranks = ranks
        self.schedule = SchedulePolicy(schedule)
        self._rng = np.random.default_rng(schedule_seed)
        self.trace_enabled = trace
        self.trace: list[str] = []

        self.out_adj: dict[int, list[int]] = {}
        self.in_adj: dict[int, list[int]] = {}
        self.arcs: list[tuple[int, int]] = []
        self._arc_set: set[tuple[int, int]] = set()
        self.labels: dict[int, Label] = {}
        self.vertices: dict[int, SimVertex] = {}
        self.caches: dict[int, NeighborCache] = {}
        self.counters = MessageCounters()
        self.halted = False
        self.witness: tuple | None = None
        self._seq = 0

        for v in range(ranks.n):
            self.out_adj[v] = []
            self.in_adj[v] = []
            self.labels[v] = initial_label(ranks, v)
            self.vertices[v] = SimVertex()
            self.caches[v] = NeighborCache()

        self._ResetInsertion()

    @property
    def n(self) -> int:
        return len(self.labels)

    def _ResetInsertion(self) -> None:
        self._network = Worklist(SCHEDULE_ORDER[self.schedule], self._rng)
        self._delta = MessageCounters()
        self._touched: set[int] = set()
        self._phase: MessageKind | None = None
        self._origin = None
        self._label_u: Label | None = None
        self._tail = None
        self._head = None
        self._found: tuple | None = None
        self._changes = 0

    def _Send(self, kind: MessageKind, src, dst, label=None, path=None, rerank=None) -> None:
        self._delta.Bump(kind)
        self._network.Push(Message(kind, src, dst, label, path, rerank))

    def _Drain(self) -> None:
        while self._network:
            msg = self._network.Pop()
            self._seq += 1
            if self.trace_enabled:
                self.trace.append(msg.TraceLine(self._seq))

            # in-flight messages after a cycle are delivered but not acted on
            if self._found is not None:
                continue

            match msg.kind:
                case MessageKind.BACKWARD | MessageKind.FORWARD:
                    self._OnProbe(msg)
                case MessageKind.NOCYCLE:
                    self._OnNoCycle(msg)
                case MessageKind.CYCLE:
                    self._OnCycle(msg)
                case MessageKind.UPDATE:
                    self._OnUpdate(msg)
                case MessageKind.REPLY:
                    self._OnReply(msg)

    def _State(self, w) -> ProbeState:
        self._touched.add(w)
        vertex = self.vertices[w]
        return vertex.backward if self._phase is MessageKind.BACKWARD else vertex.forward

    def _StartProbes(self, phase: MessageKind, origin) -> None:
        self._phase = phase
        self._origin = origin
        state = self._State(origin)
        state.seen = True

        neighbors = self.in_adj[origin] if phase is MessageKind.BACKWARD else self.out_adj[origin]
        state.pending = len(neighbors)
        for w in neighbors:
            self._Send(phase, origin, w, self._label_u)

        if state.pending == 0:
            state.resolved = True

        self._Drain()

    def _OnProbe(self, msg: Message) -> None:
        w = msg.dst
        backward = self._phase is MessageKind.BACKWARD

        if backward and w == self._head:
            self._Send(MessageKind.CYCLE, w, msg.src, path=(w,))
            return

        if not backward and self.vertices[w].backward.seen:
            self._Send(MessageKind.CYCLE, w, msg.src, path=self._BackwardChain(w))
            return

        state = self._State(w)
        if state.seen:
            if state.resolved:
                self._Send(MessageKind.NOCYCLE, w, msg.src)
            else:
                state.waiters.append(msg.src)
            return

        state.seen = True
        state.parent = msg.src

        if backward:
            spreads = self.labels[w] == msg.label
            neighbors = self.in_adj[w]
        else:
            spreads = msg.label.ranks < self.labels[w].ranks
            neighbors = self.out_adj[w]

        if not spreads:
            state.resolved = True
            self._Send(MessageKind.NOCYCLE, w, msg.src)
            return

        state.pending = len(neighbors)
        for x in neighbors:
            self._Send(msg.kind, w, x, msg.label)

        if state.pending == 0:
            self._Resolve(w, state)

    def _BackwardChain(self, meet) -> tuple:
        chain = [meet]
        while chain[-1] != self._tail:
            chain.append(self.vertices[chain[-1]].backward.parent)
        return tuple(chain)

    def _Resolve(self, w, state: ProbeState) -> None:
        state.resolved = True
        if w == self._origin:
            return

        self._Send(MessageKind.NOCYCLE, w, state.parent)
        for x in state.waiters:
            self._Send(MessageKind.NOCYCLE, w, x)
        state.waiters = []

    def _OnNoCycle(self, msg: Message) -> None:
        w = msg.dst
        state = self._State(w)
        state.pending -= 1
        if state.pending == 0:
            self._Resolve(w, state)

    def _OnCycle(self, msg: Message) -> None:
        w = msg.dst
        backward = self._phase is MessageKind.BACKWARD

        if w == self._origin:
            if backward:
                self._found = msg.path + (w, self._head)
            else:
                self._found = (w,) + msg.path + (w,)
            return

        state = self._State(w)
        if state.cycle_sent:
            return
        state.cycle_sent = True

        path = msg.path + (w,) if backward else (w,) + msg.path
        self._Send(MessageKind.CYCLE, w, state.parent, path=path)

    def _OnUpdate(self, msg: Message) -> None:
        y = msg.dst
        current = self.labels[y]
        if msg.rerank is not None:
            current = rerank_entry(current, *msg.rerank)

        merged = merge_for_arc(msg.label, current, y, self.ranks.RankOf(y))
        if merged != self.labels[y]:
            self._SetLabel(y, merged)
            if self.variant is SimVariant.QUEUE:
                self._Flush(y)
            else:
                for w in self.out_adj[y]:
                    self._Send(MessageKind.UPDATE, y, w, merged, rerank=msg.rerank)

        if self.variant is SimVariant.QUEUE:
            self._Send(MessageKind.REPLY, y, msg.src, self.labels[y])

    def _OnReply(self, msg: Message) -> None:
        x = msg.dst
        self.caches[x].Set(msg.src, msg.label)
        self._Flush(x)

    def _Flush(self, x) -> None:
        for y in self.caches[x].PopAbove(self.labels[x]):
            self._Send(MessageKind.UPDATE, x, y, self.labels[x])

    def _SetLabel(self, y, label: Label) -> None:
        self.labels[y] = label
        self._changes += 1

    def _Halt(self, u, v, witness) -> InsertOutcome:
        self.halted = True
        self.witness = tuple(witness)
        logging.info(
            f"Simulated cycle closed by arc ({u}, {v}): {' -> '.join(str(w) for w in witness)}"
        )
        return InsertOutcome.CycleDetected(witness)

    def _AddArc(self, u, v) -> None:
        self.out_adj[u].append(v)
        self.in_adj[v].append(u)
        self.arcs.append((u, v))
        self._arc_set.add((u, v))

        if self.variant is SimVariant.QUEUE:
            self.caches[u].Set(v, self.labels[v])
            self._delta.init_reply += 1

    def _RepairRank(self, u, v) -> None:
        _, lowered = arc_rank_on_insert(self.ranks, (u, v))
        if not lowered:
            return

        new_rank = self.ranks.RankOf(v)
        repaired = label_via_arc(self.labels[v], v, new_rank)
        if repaired == self.labels[v]:
            return

        self._SetLabel(v, repaired)
        for w in self.out_adj[v]:
            self._Send(MessageKind.UPDATE, v, w, repaired, rerank=(v, new_rank))
        self._Drain()

    def SimulateInsert(self, u, v) -> tuple[InsertOutcome, MessageCounters]:
        if self.halted:
            raise EngineHaltedError()
        for w in (u, v):
            if w not in self.labels:
                raise UnknownVertexError(w, self.n)

        for w in self._touched:
            self.vertices[w].Reset()
        self._ResetInsertion()
        delta = self._delta

        outcome = self._Insert(u, v)
        self.counters.Add(delta)
        return outcome, delta

    def _Insert(self, u, v) -> InsertOutcome:
        if u == v:
            return self._Halt(u, v, (u, u))

        if (u, v) in self._arc_set:
            return InsertOutcome.AlreadyOrdered()

        self._label_u = self.labels[u]
        self._head = v
        self._tail = u
        order = cmp_lex(self._label_u, self.labels[v])

        if order is not Ordering.GREATER:
            self._StartProbes(MessageKind.BACKWARD, u)
            if self._found is not None:
                return self._Halt(u, v, self._found)

            if order is Ordering.LESS:
                self._StartProbes(MessageKind.FORWARD, v)
                if self._found is not None:
                    return self._Halt(u, v, self._found)

        self._phase = MessageKind.UPDATE
        self._AddArc(u, v)
        if self.ranks.mode is RankMode.ARC_Q:
            self._RepairRank(u, v)

        if cmp_lex(self.labels[u], self.labels[v]) is Ordering.LESS:
            if self.variant is SimVariant.QUEUE:
                self._Flush(u)
            else:
                self._Send(MessageKind.UPDATE, u, v, self.labels[u])
            self._Drain()

        if order is Ordering.GREATER and self._changes == 0:
            return InsertOutcome.AlreadyOrdered()

        return InsertOutcome.LabelsUpdated(self._changes)

    def RunSequence(self, arcs) -> SequenceResult:
        records = []
        totals = MessageCounters()
        outcome = None

        for u, v in arcs:
            outcome, delta = self.SimulateInsert(u, v)
            records.append((outcome, delta))
            totals.Add(delta)
            if outcome.is_cycle:
                break

        return SequenceResult(records, totals, outcome)

    def CheckConservation(self, delta: MessageCounters) -> bool:
        """Every probe of a cycle-free insertion drew exactly one no-cycle reply."""
        return delta.nocycle == delta.backward + delta.forward

    def Snapshot(self) -> dict:
        snapshot = build_snapshot(self.n, self.arcs, self.ranks, self.labels, self.halted)
        if self.variant is SimVariant.QUEUE:
            snapshot["caches"] = {
                str(w): cache.AsDict() for w, cache in sorted(self.caches.items()) if len(cache)
            }
        return snapshot

    def SnapshotJson(self) -> str:
        return json.dumps(self.Snapshot(), indent=4, sort_keys=True)

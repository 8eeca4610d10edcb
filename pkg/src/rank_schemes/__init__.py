import logging
import math
import numpy as np
from labels.label_constants import INFINITY, RANK_UNIVERSE
from rank_schemes.rank_constants import *


class InvalidProbabilityError(Exception):
    def __init__(self, q, allow_zero: bool = False) -> None:
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        super().__init__(f"Ranking probability must lie in {interval}, got: {q}")


class PresetSizeError(Exception):
    def __init__(self, n) -> None:
        super().__init__(f"q presets need at least 2 vertices, got n={n}")


class RankModeError(Exception):
    def __init__(self, expected, actual) -> None:
        super().__init__(f"Operation requires {expected} ranking, assignment is {actual}")


class RankAssignment:
    """
    Which vertices (and, in arc mode, which arcs) are ranked, and their ranks.

    Unranked vertices simply have no entry in `vertex_rank`; RankOf reports
    INFINITY for them. Every finite rank handed out is distinct.
    """

    def __init__(self, mode: RankMode, q: float, seed: int) -> None:
        self.mode = mode
        self.q = q
        self.seed = seed
        self.n = 0
        self.vertex_rank: dict[int, int] = {}
        self.arc_rank: dict[tuple[int, int], int | None] = {}
        self._rng = np.random.default_rng(seed)
        self._used: set[int] = set()

    @classmethod
    def FromRanks(
        cls, ranks: dict[int, int], n: int, mode: RankMode = RankMode.VERTEX_Q
    ) -> "RankAssignment":
        """Explicit assignment, for hand-built examples."""
        if len(set(ranks.values())) != len(ranks):
            raise ValueError(f"Finite ranks must be distinct: {ranks}")

        assignment = cls(mode, 1.0, 0)
        assignment.n = n
        for v, rank in ranks.items():
            assignment.SetVertexRank(v, rank)
        return assignment

    @property
    def ranked_count(self) -> int:
        return len(self.vertex_rank)

    def RankOf(self, v):
        return self.vertex_rank.get(v, INFINITY)

    def IsRanked(self, v) -> bool:
        return v in self.vertex_rank

    def SetVertexRank(self, v, rank: int) -> None:
        self._used.add(rank)
        self.vertex_rank[v] = rank

    def DrawRank(self) -> int:
        while True:
            rank = int(self._rng.integers(1, RANK_UNIVERSE, endpoint=True, dtype=np.uint64))
            if rank not in self._used:
                self._used.add(rank)
                return rank

    def AddVertex(self, ranked: bool | None = None) -> int:
        """Append a vertex; `ranked=None` lets the scheme decide."""
        v = self.n
        self.n += 1

        if ranked is None:
            if self.mode is RankMode.FULL:
                ranked = True
            elif self.mode is RankMode.VERTEX_Q:
                ranked = bool(self._rng.random() < self.q)
            else:
                ranked = False

        if ranked:
            self.vertex_rank[v] = self.DrawRank()

        return v

    def RankedIncomingMin(self, v):
        ranks = [r for (_, head), r in self.arc_rank.items() if head == v and r is not None]
        return min(ranks) if ranks else INFINITY


def _check_probability(q, allow_zero: bool = False) -> None:
    low_ok = q >= 0 if allow_zero else q > 0
    if not (low_ok and q <= 1):
        raise InvalidProbabilityError(q, allow_zero)


def sample_vertex_scheme(n: int, q: float, seed: int) -> RankAssignment:
    _check_probability(q)
    assignment = RankAssignment(RankMode.VERTEX_Q, q, seed)
    for _ in range(n):
        assignment.AddVertex()
    return assignment


def full_scheme(n: int, seed: int) -> RankAssignment:
    assignment = RankAssignment(RankMode.FULL, 1.0, seed)
    for _ in range(n):
        assignment.AddVertex()
    return assignment


def arc_scheme(n: int, q: float, seed: int) -> RankAssignment:
    """Arc-ranked assignment: vertices start unranked, arcs draw on insertion."""
    _check_probability(q, allow_zero=True)
    assignment = RankAssignment(RankMode.ARC_Q, q, seed)
    for _ in range(n):
        assignment.AddVertex()
    return assignment


def arc_rank_on_insert(
    assignment: RankAssignment, arc: tuple[int, int], q: float | None = None
) -> tuple[int | None, bool]:
    """
    Rank a freshly inserted arc with probability q and refresh its head's rank.

    :return: (the arc's rank or None, whether the head's vertex rank went down)
    """
    if assignment.mode is not RankMode.ARC_Q:
        raise RankModeError(RankMode.ARC_Q, assignment.mode)

    q = assignment.q if q is None else q
    _check_probability(q, allow_zero=True)

    coin = assignment._rng.random()
    rank = assignment.DrawRank() if coin < q else None
    assignment.arc_rank[arc] = rank

    head = arc[1]
    if rank is not None and rank < assignment.RankOf(head):
        logging.debug(f"Arc {arc} lowers rank of vertex {head} to {rank}")
        assignment.vertex_rank[head] = rank
        return rank, True

    return rank, False


def preset_q(preset: QPreset, n: int, m: int = 0) -> float:
    if n < 2:
        raise PresetSizeError(n)

    match QPreset(preset):
        case QPreset.SPARSE32:
            q = 1 / math.sqrt(n)
        case QPreset.BALANCED23:
            q = (math.log(n) / n) ** (1 / 3)
        case QPreset.FULL_RANK:
            q = 1.0
        case QPreset.MSG_VERTEX:
            q = math.sqrt(math.log(n) / n)
        case QPreset.MSG_ARC:
            q = 1 / math.sqrt(max(m, 1))

    return min(q, 1.0)

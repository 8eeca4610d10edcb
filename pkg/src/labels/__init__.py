from typing import Iterable, NamedTuple
from labels.label_constants import *


class CycleInMergeError(Exception):
    def __init__(self, vertex) -> None:
        super().__init__(
            f"Vertex {vertex} occurs in the source label; the arc would close a cycle"
        )


class Entry(NamedTuple):
    vertex: int
    rank: int


class Label:
    """
    Immutable sequence of (vertex, rank) entries with strictly increasing ranks.

    `ranks` is the rank sequence with the trailing INFINITY, kept alongside the
    entries so comparisons never rebuild it.
    """

    __slots__ = ("entries", "ranks")

    def __init__(self, entries: Iterable = ()) -> None:
        self.entries = tuple(e if type(e) is Entry else Entry(*e) for e in entries)
        self.ranks = tuple(e.rank for e in self.entries) + (INFINITY,)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Label) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"Label({self.Render() or '-'})"

    def Contains(self, vertex) -> bool:
        return any(e.vertex == vertex for e in self.entries)

    def IsWellFormed(self) -> bool:
        return all(a.rank < b.rank for a, b in zip(self.entries, self.entries[1:]))

    def Render(self) -> str:
        """Log/CSV form: `v17#42|v3#99`, empty string for the empty label."""
        return "|".join(f"v{e.vertex}#{e.rank}" for e in self.entries)

    def AsList(self) -> list[list[int]]:
        return [[e.vertex, e.rank] for e in self.entries]


EMPTY_LABEL = Label()


def rank_sequence(label: Label) -> tuple:
    return label.ranks


def cmp_lex(a: Label, b: Label) -> Ordering:
    if a.ranks < b.ranks:
        return Ordering.LESS
    if a.ranks == b.ranks:
        return Ordering.EQUAL
    return Ordering.GREATER


def lcp(a: Label, b: Label) -> Label:
    i = 0
    for x, y in zip(a.entries, b.entries):
        if x != y:
            break
        i += 1
    return Label(a.entries[:i])


def merge_for_arc(src: Label, dst_label: Label, dst_vertex, dst_rank) -> Label:
    """
    New label of the head y of arc (x, y) once x's label reaches it.

    Returns LCP(src, dst) || longest run of the rest of src with rank < r(y) ||
    y (only if ranked). A source that is not lex-smaller than the destination
    leaves it untouched.

    :param src: current label of the tail x
    :param dst_label: current label of the head y
    :param dst_vertex: y
    :param dst_rank: r(y), INFINITY when y is unranked
    :return: the new label of y
    """
    if src.Contains(dst_vertex):
        raise CycleInMergeError(dst_vertex)

    if src.ranks >= dst_label.ranks:
        return dst_label

    prefix = lcp(src, dst_label)
    merged = list(prefix.entries)
    for entry in src.entries[len(merged) :]:
        if entry.rank >= dst_rank:
            break
        merged.append(entry)

    if dst_rank != INFINITY:
        merged.append(Entry(dst_vertex, dst_rank))

    return Label(merged)


def label_via_arc(src: Label, vertex, rank) -> Label:
    """Candidate label `vertex` inherits from one in-neighbor labelled `src`."""
    kept = []
    for entry in src.entries:
        if entry.rank >= rank:
            break
        kept.append(entry)

    if rank != INFINITY:
        kept.append(Entry(vertex, rank))

    return Label(kept)


def derive_label(in_labels: Iterable[Label], vertex, rank) -> Label:
    """
    Label of `vertex` from the labels of all its in-neighbors.

    The label is the lex-smallest candidate among the vertex alone and each
    in-neighbor's label passed through label_via_arc.
    """
    best = label_via_arc(EMPTY_LABEL, vertex, rank)
    for src in in_labels:
        candidate = label_via_arc(src, vertex, rank)
        if candidate.ranks < best.ranks:
            best = candidate
    return best


def rerank_entry(label: Label, vertex, new_rank) -> Label:
    """
    Rewrite a label after `vertex` had its rank lowered to `new_rank`.

    Entries ahead of the vertex that now outrank it drop out; what followed the
    vertex is kept. Labels not containing the vertex are returned as is.
    """
    for i, entry in enumerate(label.entries):
        if entry.vertex == vertex:
            head = [e for e in label.entries[:i] if e.rank < new_rank]
            return Label(head + [Entry(vertex, new_rank)] + list(label.entries[i + 1 :]))

    return label

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()


class RankMode(StrEnum):
    VERTEX_Q = "vertex-q"
    FULL = "full"
    ARC_Q = "arc-q"


class QPreset(StrEnum):
    # 1/sqrt(n): O(n^{3/2} log n) total time on sparse graphs
    SPARSE32 = "sparse32"
    # cbrt(ln n / n): balances forward and backward search time
    BALANCED23 = "balanced23"
    # every vertex ranked, backward search degenerates
    FULL_RANK = "full"
    # sqrt(ln n / n): message-optimal vertex ranking
    MSG_VERTEX = "msg-vertex"
    # 1/sqrt(m): message-optimal arc ranking
    MSG_ARC = "msg-arc"

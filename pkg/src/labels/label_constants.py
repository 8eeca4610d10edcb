import math
from enum import IntEnum


# Sentinel appended to every rank sequence; compares above any finite rank.
INFINITY = math.inf

# Finite ranks are drawn from 1..RANK_UNIVERSE inclusive.
RANK_UNIVERSE = 2**63


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

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


class Variant(StrEnum):
    TWO_WAY_VERTEX = "two-way-vertex"
    TWO_WAY_ARC = "two-way-arc"
    QUEUE_FULL = "queue-full"


class GeneratorKind(StrEnum):
    RANDOM = "random"
    LAYERED = "layered"
    PATH = "path"
    DENSE = "dense"


class FitAxis(StrEnum):
    N = "n"
    M = "m"


CSV_FIELDS = [
    "n",
    "m",
    "q",
    "variant",
    "policy",
    "seed",
    "backward",
    "forward",
    "cycle",
    "nocycle",
    "update",
    "reply",
    "total_msgs",
    "label_changes",
    "wall_ms",
    "outcome",
]

# rejection sampling gives up after this many draws per requested arc
ATTEMPTS_PER_ARC = 64

# sparse regime: bounded out-degree, m = DEGREE_DENSITY * n
DEGREE_BOUND = 4
DEGREE_DENSITY = 2

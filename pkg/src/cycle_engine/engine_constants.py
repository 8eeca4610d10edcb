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


class PropagationPolicy(StrEnum):
    DEPTH_FIRST = "depth-first"
    BREADTH_FIRST = "breadth-first"
    RANDOM = "random"


class OutcomeKind(StrEnum):
    ALREADY_ORDERED = "already-ordered"
    LABELS_UPDATED = "labels-updated"
    CYCLE_DETECTED = "cycle-detected"

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


class MessageKind(StrEnum):
    BACKWARD = "backward"
    FORWARD = "forward"
    CYCLE = "cycle"
    NOCYCLE = "nocycle"
    UPDATE = "update"
    REPLY = "reply"


class SchedulePolicy(StrEnum):
    FIFO = "fifo"
    LIFO = "lifo"
    RANDOM = "random"


class SimVariant(StrEnum):
    # labels pushed over every out-arc on change
    TWO_WAY = "two-way"
    # neighbor caches, update/reply pairs
    QUEUE = "queue"

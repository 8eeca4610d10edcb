import numpy as np
from cycle_engine.engine_constants import PropagationPolicy


class Worklist:
    """Pending propagation steps, drained in the order the policy dictates."""

    def __init__(self, policy: PropagationPolicy, rng: np.random.Generator) -> None:
        self.policy = policy
        self._rng = rng
        self._items: list = []
        self._head = 0

    def __len__(self) -> int:
        return len(self._items) - self._head

    def Push(self, item) -> None:
        self._items.append(item)

    def Pop(self):
        if self.policy is PropagationPolicy.BREADTH_FIRST:
            item = self._items[self._head]
            self._head += 1
            # compact once the consumed head dominates the buffer
            if self._head > 1024 and self._head * 2 > len(self._items):
                del self._items[: self._head]
                self._head = 0
            return item

        if self.policy is PropagationPolicy.RANDOM:
            i = int(self._rng.integers(len(self._items)))
            self._items[i], self._items[-1] = self._items[-1], self._items[i]

        return self._items.pop()

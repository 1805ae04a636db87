from __future__ import annotations

from typing import List, Union

import numpy as np
import numpy.typing as npt

from svrgol.data.dataset import Dataset, Example
from svrgol.exceptions import InvalidArgumentError, InvalidStateError

Seed = Union[int, np.random.SeedSequence, None]


class StreamSampler:
    """I.i.d. sample oracle over a finite dataset: uniform draws with replacement.

    Single-threaded; parallel consumers take independently seeded children
    from ``spawn``.
    """

    def __init__(self, dataset: Dataset, seed: Seed = None) -> None:
        self.dataset = dataset
        self._seed_sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._rng = np.random.default_rng(self._seed_sequence)
        self.samples_drawn = 0

    def spawn(self, count: int) -> List["StreamSampler"]:
        return [StreamSampler(self.dataset, child) for child in self._seed_sequence.spawn(count)]

    def draw_indices(self, count: int) -> npt.NDArray[np.int64]:
        if count < 0:
            raise InvalidArgumentError(f"Cannot draw {count} samples")
        if len(self.dataset) == 0:
            raise InvalidStateError("Cannot sample from an empty dataset")
        indices = self._rng.integers(0, len(self.dataset), size=count, dtype=np.int64)
        self.samples_drawn += count
        return indices

    def draw(self, count: int) -> Dataset:
        return self.dataset.take(self.draw_indices(count))

    def next_sample(self) -> Example:
        return self.dataset[int(self.draw_indices(1)[0])]


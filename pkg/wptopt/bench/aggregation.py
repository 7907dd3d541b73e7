# Copyright 2025 The wptopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Grouping and Monte Carlo statistics over per-realization records.

Groups keep their values in realization order and reduce them with
numpy's pairwise summation, so results do not depend on the order in
which worker threads finished.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Generic, Iterable, List, TypeVar

import numpy as np

T = TypeVar("T")
K = TypeVar("K")


@dataclass(frozen=True)
class Group(Generic[K, T]):
    """Records sharing one key."""

    key: K
    """The key that the group was formed by."""

    values: List[T]
    """Records in this group, in input order."""

    def count(self) -> int:
        return len(self.values)

    def numbers(self, selector: Callable[[T], float]) -> np.ndarray:
        return np.array([selector(item) for item in self.values], dtype=float)

    def mean(self, selector: Callable[[T], float]) -> float:
        """
        Mean of the selected values.

        Raises:
            ValueError: If the group is empty.
        """
        if not self.values:
            raise ValueError("Cannot compute the mean of an empty group")
        return float(np.mean(self.numbers(selector)))

    def stderr(self, selector: Callable[[T], float]) -> float:
        """Standard error of the mean; zero for a single value."""
        if not self.values:
            raise ValueError("Cannot compute the standard error of an empty group")
        if len(self.values) == 1:
            return 0.0
        data = self.numbers(selector)
        return float(np.std(data, ddof=1) / np.sqrt(len(data)))

    def fraction(self, predicate: Callable[[T], bool]) -> float:
        """Share of records satisfying the predicate."""
        if not self.values:
            raise ValueError("Cannot compute a fraction of an empty group")
        return sum(1 for item in self.values if predicate(item)) / len(self.values)


def group_by(items: Iterable[T], key: Callable[[T], K]) -> List[Group[K, T]]:
    """Group items by key, keeping first-seen key order and input order within groups."""
    groups: Dict[K, List[T]] = {}
    for item in items:
        groups.setdefault(key(item), []).append(item)
    return [Group(k, v) for k, v in groups.items()]


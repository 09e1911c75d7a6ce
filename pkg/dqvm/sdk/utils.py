# Copyright 2026 The dqvm authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import itertools

from dqvm.sdk import exceptions


def flatten(list_of_list):
    res = []
    for item in itertools.chain.from_iterable(list_of_list):
        if item not in res:
            res.append(item)
    return res


def ordered_union(*sequences):
    return flatten(sequences)


def ordered_difference(sequence, removed):
    removed = set(removed)
    return [item for item in sequence if item not in removed]


class FreshReferences:
    """Monotone allocator of concrete qubit references.

    Integers already claimed by concrete names are never handed out.
    """

    def __init__(self, start=0):
        self._next = start
        self._used = set()

    def claim(self, reference):
        if reference in self._used:
            raise exceptions.NameCollision(f"Qubit reference {reference} is already in use")
        self._used.add(reference)

    def reserve(self, references):
        """Mark concrete references as used; reserving the same one twice is allowed."""
        self._used.update(references)

    def __call__(self):
        while self._next in self._used:
            self._next += 1
        reference = self._next
        self._used.add(reference)
        self._next += 1
        return reference

    @property
    def used(self):
        return frozenset(self._used)


class FreshNames:
    """Allocator of fresh variable names, ``?q0``, ``?q1``..."""

    def __init__(self, prefix='?q', start=0):
        self._prefix = prefix
        self._counter = itertools.count(start)

    def __call__(self):
        return f"{self._prefix}{next(self._counter)}"

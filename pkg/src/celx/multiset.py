"""Immutable multisets with canonical ordering.

A :class:`Multiset` maps elements to strictly positive counts.  Elements must
be hashable and mutually orderable; iteration is always in sorted order so
that every derived artifact (witnesses, proofs, printed output) is
reproducible.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from typing import Generic, TypeVar

T = TypeVar("T")


class Multiset(Generic[T]):
    __slots__ = ("_counts", "_sorted", "_hash", "_size")

    def __init__(self, items: Iterable[T] | Mapping[T, int] = ()):
        counts: dict[T, int] = {}
        if isinstance(items, Mapping):
            for elem, n in items.items():
                if n < 0:
                    raise ValueError(f"negative multiplicity {n} for {elem!r}")
                if n:
                    counts[elem] = counts.get(elem, 0) + n
        else:
            for elem in items:
                counts[elem] = counts.get(elem, 0) + 1
        self._counts = counts
        self._sorted: tuple[tuple[T, int], ...] | None = None
        self._hash: int | None = None
        self._size = sum(counts.values())

    @classmethod
    def _raw(cls, counts: dict[T, int]) -> Multiset[T]:
        ms = cls.__new__(cls)
        ms._counts = counts
        ms._sorted = None
        ms._hash = None
        ms._size = sum(counts.values())
        return ms

    def count(self, elem: T) -> int:
        return self._counts.get(elem, 0)

    __getitem__ = count

    def __contains__(self, elem: object) -> bool:
        return elem in self._counts

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return bool(self._counts)

    def items(self) -> tuple[tuple[T, int], ...]:
        """Sorted ``(element, count)`` pairs."""
        if self._sorted is None:
            self._sorted = tuple(sorted(self._counts.items(), key=lambda kv: kv[0]))
        return self._sorted

    def distinct(self) -> tuple[T, ...]:
        return tuple(e for e, _ in self.items())

    def __iter__(self) -> Iterator[T]:
        for elem, n in self.items():
            for _ in range(n):
                yield elem

    def as_dict(self) -> dict[T, int]:
        return dict(self._counts)

    def __add__(self, other: Multiset[T]) -> Multiset[T]:
        counts = dict(self._counts)
        for elem, n in other._counts.items():
            counts[elem] = counts.get(elem, 0) + n
        return Multiset._raw(counts)

    def __sub__(self, other: Multiset[T]) -> Multiset[T]:
        """Exact difference; raises if ``other`` is not contained in ``self``."""
        counts = dict(self._counts)
        for elem, n in other._counts.items():
            have = counts.get(elem, 0)
            if have < n:
                raise ValueError(f"cannot remove {n} x {elem!r}: only {have} present")
            if have == n:
                del counts[elem]
            else:
                counts[elem] = have - n
        return Multiset._raw(counts)

    def add(self, elem: T, n: int = 1) -> Multiset[T]:
        counts = dict(self._counts)
        counts[elem] = counts.get(elem, 0) + n
        return Multiset._raw(counts)

    def remove(self, elem: T, n: int = 1) -> Multiset[T]:
        return self - Multiset({elem: n})

    def scale(self, k: int) -> Multiset[T]:
        if k < 0:
            raise ValueError("negative scale")
        if k == 0:
            return Multiset()
        return Multiset._raw({e: n * k for e, n in self._counts.items()})

    def filter(self, pred) -> Multiset[T]:
        return Multiset._raw({e: n for e, n in self._counts.items() if pred(e)})

    def map(self, fn) -> Multiset:
        out: dict = {}
        for e, n in self._counts.items():
            k = fn(e)
            out[k] = out.get(k, 0) + n
        return Multiset._raw(out)

    def __le__(self, other: Multiset[T]) -> bool:
        oc = other._counts
        return all(oc.get(e, 0) >= n for e, n in self._counts.items())

    def __ge__(self, other: Multiset[T]) -> bool:
        return other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __lt__(self, other: Multiset[T]) -> bool:
        # total order used only for deterministic sorting of collections
        return (len(self), self.items()) < (len(other), other.items())

    def __repr__(self) -> str:
        inner = ", ".join(repr(e) if n == 1 else f"{e!r}:{n}" for e, n in self.items())
        return f"Multiset({{{inner}}})"


def sum_multisets(parts: Iterable[Multiset[T]]) -> Multiset[T]:
    counts: dict[T, int] = {}
    for part in parts:
        for e, n in part._counts.items():
            counts[e] = counts.get(e, 0) + n
    return Multiset._raw(counts)


def sub_multisets(ms: Multiset[T]) -> Iterator[Multiset[T]]:
    """All sub-multisets of ``ms`` in a deterministic order."""
    items = ms.items()

    def rec(i: int, acc: dict[T, int]) -> Iterator[Multiset[T]]:
        if i == len(items):
            yield Multiset._raw(dict(acc))
            return
        elem, n = items[i]
        for k in range(n + 1):
            if k:
                acc[elem] = k
            yield from rec(i + 1, acc)
        acc.pop(elem, None)

    yield from rec(0, {})

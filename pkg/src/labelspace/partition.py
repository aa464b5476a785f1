"""Disjoint partitions of ``range(n)`` in canonical form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

ORIGINS = ("random", "community", "apriori")


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering ``0..n-1``.

    Blocks are stored canonically: members sorted inside each block and blocks
    sorted by their smallest member, so two partitions are equal iff they
    group the same elements. ``origin`` is informational and ignored by
    equality and hashing.
    """

    blocks: tuple[tuple[int, ...], ...]
    origin: str = field(default="community", compare=False)

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown partition origin {self.origin!r}")
        canon = canonical_blocks(self.blocks)
        object.__setattr__(self, "blocks", canon)
        seen = [v for b in canon for v in b]
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("blocks must be a disjoint cover of 0..n-1")

    @classmethod
    def from_membership(cls, membership: Sequence[int], origin: str = "community") -> "Partition":
        groups: dict[int, list[int]] = {}
        for v, m in enumerate(membership):
            groups.setdefault(int(m), []).append(v)
        return cls(tuple(tuple(g) for g in groups.values()), origin)

    @classmethod
    def singletons(cls, n: int, origin: str = "apriori") -> "Partition":
        return cls(tuple((i,) for i in range(n)), origin)

    @classmethod
    def whole(cls, n: int, origin: str = "apriori") -> "Partition":
        return cls((tuple(range(n)),) if n else (), origin)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def membership(self) -> list[int]:
        out = [0] * self.n
        for i, b in enumerate(self.blocks):
            for v in b:
                out[v] = i
        return out

    def to_text(self) -> str:
        """``block_index: v1,v2,...`` lines."""
        return "".join(f"{i}: {','.join(map(str, b))}\n" for i, b in enumerate(self.blocks))

    @classmethod
    def from_text(cls, text: str, origin: str = "community") -> "Partition":
        blocks = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            idx, sep, members = line.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: expected 'index: members'")
            blocks.append(tuple(int(v) for v in members.split(",")))
        return cls(tuple(blocks), origin)


def canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    out = []
    for b in blocks:
        t = tuple(sorted(int(v) for v in b))
        if not t:
            raise ValueError("partition blocks must be nonempty")
        out.append(t)
    out.sort(key=lambda b: b[0])
    return tuple(out)

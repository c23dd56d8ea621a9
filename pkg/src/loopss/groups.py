"""Finitely generated abelian groups in invariant-factor form."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import prod
from typing import Iterable

from sympy import factorint


@dataclass(frozen=True)
class FGAbelianGroup:
    """``Z^rank + Z/t_1 + ... + Z/t_k`` with ``t_i >= 2`` and ``t_i | t_{i+1}``.

    The constructor only accepts canonical data, so ``==`` is isomorphism.
    Use :meth:`from_orders` to normalise an arbitrary list of cyclic orders.
    """

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        for i, t in enumerate(self.torsion):
            if t < 2:
                raise ValueError(f"torsion coefficient {t} is not >= 2")
            if i and t % self.torsion[i - 1]:
                raise ValueError(f"torsion {self.torsion} is not in divisibility order")

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> FGAbelianGroup:
        """Direct sum of cyclic groups ``Z/k`` (``k = 0`` meaning ``Z``)."""
        rank = 0
        prime_powers = defaultdict(list)
        for k in orders:
            k = abs(k)
            if k == 0:
                rank += 1
            elif k > 1:
                for p, e in factorint(k).items():
                    prime_powers[p].append(p ** e)
        if not prime_powers:
            return cls(rank, ())
        length = max(len(v) for v in prime_powers.values())
        factors = [1] * length
        for powers in prime_powers.values():
            powers.sort(reverse=True)
            for i, q in enumerate(powers):
                factors[length - 1 - i] *= q
        return cls(rank, tuple(f for f in factors if f > 1))

    @classmethod
    def free(cls, rank: int) -> FGAbelianGroup:
        return cls(rank, ())

    def __add__(self, other: FGAbelianGroup) -> FGAbelianGroup:
        return self.direct_sum(other)

    def direct_sum(self, *others: FGAbelianGroup) -> FGAbelianGroup:
        orders = [0] * self.rank + list(self.torsion)
        for g in others:
            orders += [0] * g.rank + list(g.torsion)
        return FGAbelianGroup.from_orders(orders)

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion)

    @property
    def num_generators(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Cyclic orders of the generators, free ones (order 0) first."""
        return (0,) * self.rank + self.torsion

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_cyclic(self) -> bool:
        return self.num_generators == 1

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank:
            parts.append(f"Z^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts)

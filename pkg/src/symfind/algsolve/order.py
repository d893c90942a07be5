"""Monomial orders on exponent tuples, with memoized sort keys."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TermOrder:
    """``kind`` in {degrevlex, lex, elimination-block}.

    ``ranking`` lists variable positions from largest to smallest. For
    ``elimination-block``, ``blocks`` splits the ranking into consecutive
    groups compared lexicographically block by block (degrevlex inside a
    block); earlier blocks are eliminated first.
    """

    kind: str
    ranking: tuple
    blocks: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "elimination-block"):
            raise ValueError(f"unknown term order {self.kind!r}")
        if self.kind == "elimination-block":
            flat = tuple(i for b in self.blocks for i in b)
            if flat != tuple(self.ranking):
                raise ValueError("blocks must partition the ranking in order")

    @classmethod
    def degrevlex(cls, n, ranking=None):
        return cls("degrevlex", tuple(range(n)) if ranking is None else tuple(ranking))

    @classmethod
    def lex(cls, n, ranking=None):
        return cls("lex", tuple(range(n)) if ranking is None else tuple(ranking))

    @classmethod
    def block(cls, blocks):
        blocks = tuple(tuple(b) for b in blocks if b)
        return cls("elimination-block", tuple(i for b in blocks for i in b), blocks)

    def key(self, e):
        k = self._cache.get(e)
        if k is None:
            k = self._make_key(e)
            self._cache[e] = k
        return k

    def _make_key(self, e):
        if self.kind == "lex":
            return tuple(e[i] for i in self.ranking)
        if self.kind == "degrevlex":
            return _grevlex(e, self.ranking)
        return tuple(_grevlex(e, b) for b in self.blocks)

    def describe(self, names):
        if self.kind == "elimination-block":
            return {"kind": self.kind, "blocks": [[names[i] for i in b] for b in self.blocks]}
        return {"kind": self.kind, "ranking": [names[i] for i in self.ranking]}


def _grevlex(e, ranking):
    return (sum(e[i] for i in ranking), tuple(-e[i] for i in reversed(ranking)))

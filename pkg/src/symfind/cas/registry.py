"""Ordered registries of named variables."""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import SymfindError, UnknownVariableError

KINDS = (
    "time",
    "state",
    "input",
    "parameter",
    "transformed-parameter",
    "ansatz-coefficient",
    "jet",
    "auxiliary",
)


class VarRegistry:
    """Immutable ordered list of distinct variable names with kind tags.

    The position of a name is its index in every exponent vector of the
    polynomials built over this registry, and fixes the session term order.
    """

    __slots__ = ("names", "kinds", "_index", "_hash")

    def __init__(self, names: Sequence[str], kinds: Sequence[str] | str = "auxiliary"):
        names = tuple(names)
        if isinstance(kinds, str):
            kinds = (kinds,) * len(names)
        kinds = tuple(kinds)
        if len(kinds) != len(names):
            raise SymfindError("one kind tag per variable is required")
        for k in kinds:
            if k not in KINDS:
                raise SymfindError(f"unknown variable kind {k!r}")
        index = {}
        for i, n in enumerate(names):
            if n in index:
                raise SymfindError(f"duplicate variable name {n!r}")
            index[n] = i
        self.names = names
        self.kinds = kinds
        self._index = index
        self._hash = hash((names, kinds))

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VarRegistry):
            return NotImplemented
        return self._hash == other._hash and self.names == other.names and self.kinds == other.kinds

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VarRegistry({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def kind(self, name: str) -> str:
        return self.kinds[self.index(name)]

    def of_kind(self, *kinds: str) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k in kinds)

    def extend(self, names: Iterable[str], kind: str | Sequence[str] = "auxiliary") -> "VarRegistry":
        names = tuple(names)
        if isinstance(kind, str):
            kind = (kind,) * len(names)
        return VarRegistry(self.names + names, self.kinds + tuple(kind))

    def restrict(self, names: Iterable[str]) -> "VarRegistry":
        """Sub-registry keeping the given names in this registry's order."""
        keep = set(names)
        for n in keep:
            self.index(n)
        pairs = [(n, k) for n, k in zip(self.names, self.kinds) if n in keep]
        return VarRegistry([p[0] for p in pairs], [p[1] for p in pairs])

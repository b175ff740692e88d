"""Channel names.

A name carries a numeric identity and a display string for printing.
Equality and hashing look only at the identity, so two names that print
the same are still distinct channels.
"""

from __future__ import annotations

import itertools

_ids = itertools.count(1)


class Name:
    __slots__ = ("id", "display")

    def __init__(self, id: int, display: str):
        self.id = id
        self.display = display

    def __eq__(self, other):
        return isinstance(other, Name) and other.id == self.id

    def __hash__(self):
        return hash(self.id)

    def __lt__(self, other):
        return self.id < other.id

    def __repr__(self):
        return f"{self.display}#{self.id}"

    def __str__(self):
        return self.display

    def __reduce__(self):
        return (Name, (self.id, self.display))


def fresh(display: str = "x") -> Name:
    """A name that has never been handed out before in this process."""
    return Name(next(_ids), display)


def refresh(name: Name) -> Name:
    return fresh(name.display)

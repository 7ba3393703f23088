"""
Labeled plane trees and the parking dynamics on them.

A tree is stored by its preorder child counts (the Łukasiewicz word), so
vertex 0 is the root and every child has a larger index than its parent.
Cars arrive at vertex v in number ℓ(v); each vertex holds one car and the
rest drive towards the root. The number of cars that ever visit v obeys

    χ(v) = ℓ(v) + Σ_{u child of v} (χ(u) - 1)₊

and does not depend on the order in which cars move.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ..errors import DomainError, InconsistencyError

logger = logging.getLogger(__name__)


def preorder_parents(child_counts: Sequence[int]) -> list[int]:
    """Parent of each vertex of a preorder child-count word; -1 for the root."""
    parents = [-1] * len(child_counts)
    # (vertex, children still to attach)
    stack: list[list[int]] = []
    for v, c in enumerate(child_counts):
        if stack:
            parents[v] = stack[-1][0]
            stack[-1][1] -= 1
            if stack[-1][1] == 0:
                stack.pop()
        if c:
            stack.append([v, c])
    return parents


@dataclass(frozen=True)
class LabeledTree:
    """
    Rooted plane tree with car labels.

    Attributes:
        child_counts: Number of children of each vertex, in preorder.
        labels: Cars arriving at each vertex, in preorder.
    """

    child_counts: tuple[int, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "child_counts", tuple(int(c) for c in self.child_counts))
        object.__setattr__(self, "labels", tuple(int(l) for l in self.labels))
        n = len(self.child_counts)
        if n < 1:
            raise ValueError("A tree has at least one vertex")
        if len(self.labels) != n:
            raise ValueError(f"Expected {n} labels, got {len(self.labels)}")
        if any(l < 0 for l in self.labels):
            raise ValueError("Labels must be nonnegative")
        pending = 1
        for c in self.child_counts:
            if c < 0 or pending == 0:
                raise ValueError(f"Not a preorder child-count word: {self.child_counts}")
            pending += c - 1
        if pending != 0:
            raise ValueError(f"Not a preorder child-count word: {self.child_counts}")

    @classmethod
    def from_dyck(cls, word: str, labels: Sequence[int]) -> "LabeledTree":
        """
        Build from a balanced-parenthesis word of the vertices below the root.

        "(" steps down to a new child, ")" returns to the parent.
        """
        counts = [0]
        stack = [0]
        for ch in word:
            if ch == "(":
                counts[stack[-1]] += 1
                counts.append(0)
                stack.append(len(counts) - 1)
            elif ch == ")":
                if len(stack) == 1:
                    raise ValueError(f"Unbalanced word: {word}")
                stack.pop()
            else:
                raise ValueError(f"Unexpected character {ch!r} in {word}")
        if len(stack) != 1:
            raise ValueError(f"Unbalanced word: {word}")
        return cls(tuple(counts), tuple(labels))

    @classmethod
    def single(cls, label: int) -> "LabeledTree":
        return cls((0,), (label,))

    @property
    def size(self) -> int:
        return len(self.child_counts)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """Children of each vertex, in birth order."""
        out: list[list[int]] = [[] for _ in self.child_counts]
        stack: list[int] = []
        for v, c in enumerate(self.child_counts):
            if stack:
                out[stack[-1]].append(v)
                if len(out[stack[-1]]) == self.child_counts[stack[-1]]:
                    stack.pop()
            if c:
                stack.append(v)
        return tuple(tuple(kids) for kids in out)

    @cached_property
    def parent(self) -> tuple[int, ...]:
        """Parent of each vertex; the root maps to -1."""
        return tuple(preorder_parents(self.child_counts))

    def to_dyck(self) -> str:
        parts: list[str] = []

        def visit(v: int) -> None:
            for u in self.children[v]:
                parts.append("(")
                visit(u)
                parts.append(")")

        visit(0)
        return "".join(parts)

    def subtree(self, v: int) -> list[int]:
        """Vertices of the subtree rooted at v (a preorder interval)."""
        self._check_vertex(v)
        end = v + 1
        pending = self.child_counts[v]
        while pending:
            pending += self.child_counts[end] - 1
            end += 1
        return list(range(v, end))

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.size:
            raise DomainError(f"Vertex {v} is not in a tree with {self.size} vertices")


@dataclass(frozen=True)
class ParkingOutcome:
    """
    Final state of the parking process.

    Attributes:
        chi: Cars that visit each vertex.
        occupied: Whether each vertex ends with a parked car.
        flux: Cars leaving each vertex towards its parent.
        overflow: Cars leaving through the root.
        fully_parked: Every vertex is occupied.
        clusters: Connected components of occupied vertices, each listed
            in preorder, ordered by their top vertex.
    """

    chi: tuple[int, ...]
    occupied: tuple[bool, ...]
    flux: tuple[int, ...]
    overflow: int
    fully_parked: bool
    clusters: tuple[tuple[int, ...], ...]

    @property
    def cluster_sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def _clusters(tree: LabeledTree, occupied: Sequence[bool]) -> tuple[tuple[int, ...], ...]:
    parent = tree.parent
    out = []
    for v in range(tree.size):
        if not occupied[v] or (parent[v] >= 0 and occupied[parent[v]]):
            continue
        members = []
        stack = [v]
        while stack:
            u = stack.pop()
            members.append(u)
            stack.extend(w for w in tree.children[u] if occupied[w])
        out.append(tuple(sorted(members)))
    return tuple(out)


def _outcome(tree: LabeledTree, chi: Sequence[int]) -> ParkingOutcome:
    occupied = tuple(c >= 1 for c in chi)
    flux = tuple(max(c - 1, 0) for c in chi)
    return ParkingOutcome(
        chi=tuple(chi),
        occupied=occupied,
        flux=flux,
        overflow=flux[0],
        fully_parked=all(occupied),
        clusters=_clusters(tree, occupied),
    )


def chi_values(child_counts: Sequence[int], labels: Sequence[int]) -> list[int]:
    """χ for a preorder child-count word, in one pass over a stack of open vertices."""
    n = len(child_counts)
    chi = list(labels)
    # (vertex, children still to attach) of the open ancestors
    stack: list[list[int]] = []
    for v in range(n):
        if stack:
            stack[-1][1] -= 1
        stack.append([v, child_counts[v]])
        while stack and stack[-1][1] == 0:
            done = stack.pop()[0]
            if stack:
                chi[stack[-1][0]] += max(chi[done] - 1, 0)
    return chi


def run_parking(tree: LabeledTree) -> ParkingOutcome:
    """Run the parking process through the χ recursion."""
    return _outcome(tree, chi_values(tree.child_counts, tree.labels))


def surplus(tree: LabeledTree, subtree_root: int = 0) -> int:
    """s(t') = Σ (ℓ(v) - 1) over the subtree rooted at subtree_root."""
    return sum(tree.labels[v] - 1 for v in tree.subtree(subtree_root))


def subtree_surpluses(tree: LabeledTree) -> list[int]:
    """Surplus of the subtree at every vertex."""
    out = [l - 1 for l in tree.labels]
    for v in range(tree.size - 1, 0, -1):
        out[tree.parent[v]] += out[v]
    return out


def is_fully_packed(tree: LabeledTree) -> bool:
    return min(subtree_surpluses(tree)) >= 0


def sequential_parking(tree: LabeledTree, rng: np.random.Generator) -> ParkingOutcome:
    """
    Park cars one at a time in a random order.

    Each car starts at its arrival vertex and drives towards the root until
    it finds a free spot or leaves through the root.
    """
    cars = np.repeat(np.arange(tree.size), tree.labels)
    order = rng.permutation(cars)
    taken = [False] * tree.size
    flux = [0] * tree.size
    parent = tree.parent
    for start in order:
        v = int(start)
        while v >= 0 and taken[v]:
            flux[v] += 1
            v = parent[v]
        if v >= 0:
            taken[v] = True
    chi = [tree.labels[v] + sum(flux[u] for u in tree.children[v]) for v in range(tree.size)]
    outcome = _outcome(tree, chi)
    if list(outcome.flux) != flux or list(outcome.occupied) != taken:
        raise InconsistencyError(f"Sequential parking disagrees with its visit counts on {tree}")
    return outcome

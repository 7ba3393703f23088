"""
Exhaustive enumeration of fully packed trees for small sizes.

Two independent counters:

- enumerate_Fnp walks every plane tree (balanced-parenthesis successor
  order) and every labeling, keeping the fully packed ones;
- forest_convolution_table builds the same table from sizes and surpluses
  of subtrees, never listing a tree.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from ..errors import BudgetExceededError, OutOfScopeError
from ..weights import Polynomial, WeightSequence
from .trees import LabeledTree, preorder_parents

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


# -------------------------------------------------------------------
# Plane trees
# -------------------------------------------------------------------


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


def dyck_words(m: int) -> Iterator[str]:
    """
    Balanced-parenthesis words of semilength m in lexicographic order
    ("(" before ")"), generated by successor steps on a single buffer.
    """
    word = ["("] * m + [")"] * m
    while True:
        yield "".join(word)
        # rightmost "(" that can become ")" while keeping a valid prefix
        opens = word.count("(")
        balance = 0
        for ch in word:
            balance += 1 if ch == "(" else -1
        pivot = -1
        for i in range(2 * m - 1, -1, -1):
            if word[i] == "(":
                opens -= 1
                balance -= 1
                if balance > 0:
                    pivot = i
                    break
            else:
                balance += 1
        if pivot < 0:
            return
        word[pivot] = ")"
        remaining_opens = m - opens
        tail = 2 * m - pivot - 1
        word[pivot + 1 :] = ["("] * remaining_opens + [")"] * (tail - remaining_opens)


def plane_trees(n: int) -> Iterator[tuple[int, ...]]:
    """Preorder child-count words of all plane trees with n vertices."""
    if n < 1:
        raise ValueError("Trees have at least one vertex")
    for word in dyck_words(n - 1):
        yield LabeledTree.from_dyck(word, [0] * n).child_counts


# -------------------------------------------------------------------
# Oracle table
# -------------------------------------------------------------------


@dataclass
class OracleTable:
    """
    Exact coefficients F_{n,p} for 1 <= n <= n_max.

    Attributes:
        n_max: Largest tree size enumerated.
        values: values[n][p] = F_{n,p}; missing entries are zero.
        iterations: (shape, labeling) pairs visited.
    """

    n_max: int
    values: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    iterations: int = 0

    def get(self, n: int, p: int) -> Fraction:
        return self.values.get(n, {}).get(p, Fraction(0))

    def rows(self) -> Iterator[tuple[int, int, Fraction]]:
        for n in sorted(self.values):
            for p in sorted(self.values[n]):
                yield n, p, self.values[n][p]

    def row_total(self, n: int) -> Fraction:
        return sum(self.values.get(n, {}).values(), Fraction(0))

    def probability(self, n: int, p: int) -> Fraction:
        """P(fully parked, |V| = n, overflow = p) on the geometric GW tree."""
        return 2 * Fraction(1, 4**n) * self.get(n, p)


def _finite_weights(ws: WeightSequence) -> dict[int, Fraction]:
    if ws.degree is None or not ws.is_exact:
        raise OutOfScopeError("Enumeration needs exact weights with finite support")
    return {l: Fraction(ws.coefficient(l)) for l in range(ws.degree + 1) if ws.coefficient(l)}


def enumeration_cost(ws: WeightSequence, n: int) -> int:
    """(shape, labeling) pairs visited for trees of size n."""
    return catalan(n - 1) * len(_finite_weights(ws)) ** n


def enumerate_Fnp(ws: WeightSequence, n_max: int, budget: int = DEFAULT_BUDGET) -> OracleTable:
    """
    Sum the weights of all fully packed labeled trees by size and surplus.

    Args:
        ws: Finite-support exact weights.
        n_max: Largest tree size.
        budget: Maximum number of (shape, labeling) pairs.

    Returns:
        OracleTable with exact entries.

    Raises:
        BudgetExceededError: The next size would exceed the budget; the
            partial table holds every size finished so far.
    """
    weights = _finite_weights(ws)
    labels = sorted(weights)
    table = OracleTable(n_max=n_max)

    for n in range(1, n_max + 1):
        cost = catalan(n - 1) * len(labels) ** n
        if table.iterations + cost > budget:
            table.n_max = n - 1
            raise BudgetExceededError(
                f"Enumerating size {n} needs {cost} iterations; budget {budget} "
                f"has {budget - table.iterations} left",
                partial=table,
            )
        row: dict[int, Fraction] = {}
        for counts in plane_trees(n):
            parents = preorder_parents(counts)
            for labeling in itertools.product(labels, repeat=n):
                sub = [l - 1 for l in labeling]
                packed = True
                for v in range(n - 1, 0, -1):
                    if sub[v] < 0:
                        packed = False
                        break
                    sub[parents[v]] += sub[v]
                if not packed or sub[0] < 0:
                    continue
                weight = math.prod((weights[l] for l in labeling), start=Fraction(1))
                row[sub[0]] = row.get(sub[0], Fraction(0)) + weight
        table.iterations += cost
        table.values[n] = row
        logger.debug(f"enumerate_Fnp: n={n}, {cost} iterations, {len(row)} surpluses")

    logger.info(f"Enumerated fully packed trees up to n={n_max} ({table.iterations} iterations)")
    return table


# -------------------------------------------------------------------
# Independent counter
# -------------------------------------------------------------------


def forest_convolution_table(ws: WeightSequence, n_max: int) -> OracleTable:
    """
    F_{n,p} by convolving subtree tables.

    A fully packed tree is a root label ℓ over an ordered forest of fully
    packed trees whose surpluses add up to p + 1 - ℓ.
    """
    weights = _finite_weights(ws)

    @lru_cache(maxsize=None)
    def trees(n: int) -> tuple[tuple[int, Fraction], ...]:
        out: dict[int, Fraction] = {}
        for s, w in forest(n - 1):
            for l, b in weights.items():
                p = s + l - 1
                if p >= 0:
                    out[p] = out.get(p, Fraction(0)) + b * w
        return tuple(sorted(out.items()))

    @lru_cache(maxsize=None)
    def forest(m: int) -> tuple[tuple[int, Fraction], ...]:
        if m == 0:
            return ((0, Fraction(1)),)
        out: dict[int, Fraction] = {}
        # first tree of the forest has k vertices
        for k in range(1, m + 1):
            for s1, w1 in trees(k):
                for s2, w2 in forest(m - k):
                    out[s1 + s2] = out.get(s1 + s2, Fraction(0)) + w1 * w2
        return tuple(sorted(out.items()))

    table = OracleTable(n_max=n_max)
    for n in range(1, n_max + 1):
        table.values[n] = dict(trees(n))
    logger.info(f"Forest convolution table up to n={n_max}")
    return table


def count_fully_packed(n: int, max_label: int) -> int:
    """Number of fully packed plane trees with n vertices and labels in 0..max_label."""
    ones = Polynomial.of(*([1] * (max_label + 1)))
    return int(forest_convolution_table(ones, n).row_total(n))

"""
Monte Carlo parking on critical geometric Galton-Watson trees.

Offspring numbers are ν_k = 2^(-k-1), car arrivals are i.i.d. from the
weight sequence. A plane tree with n vertices has probability 2^(-(2n-1)),
so the probability of a fully parked tree of size n with overflow p is
2·4^(-n)·F_{n,p}.

Samples are split into fixed-size chunks. Chunk i draws from
Generator(Philox(SeedSequence(seed).spawn(...)[i])), so results depend on
the seed and the chunk size only, never on the number of workers.

Each chunk draws max_size offspring numbers and labels per sample up front,
so trees above max_size are censored. Size counts, parked counts and the
cluster-size histogram all cover trees of at most max_size vertices.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn

from ..errors import OutOfScopeError
from ..weights import WeightSequence, moments
from .trees import chi_values, preorder_parents

logger = logging.getLogger(__name__)

DEFAULT_MAX_SIZE = 12
DEFAULT_CHUNK_SIZE = 100_000


@dataclass
class MCResult:
    """
    Aggregated Monte Carlo counts.

    Attributes:
        samples: Trees sampled.
        seed: Root seed.
        chunk_size: Samples per RNG stream.
        max_size: Trees larger than this are censored.
        parked: parked[(n, p)] = fully parked trees of size n, overflow p.
        sizes: sizes[n] = trees of size n.
        censored: Trees larger than max_size.
        cluster_sizes: Histogram of occupied-cluster sizes over all
            uncensored trees, so no cluster exceeds max_size.
    """

    samples: int
    seed: int
    chunk_size: int
    max_size: int
    parked: Counter = field(default_factory=Counter)
    sizes: Counter = field(default_factory=Counter)
    censored: int = 0
    cluster_sizes: Counter = field(default_factory=Counter)

    def merge(self, other: "MCResult") -> None:
        self.parked.update(other.parked)
        self.sizes.update(other.sizes)
        self.cluster_sizes.update(other.cluster_sizes)
        self.censored += other.censored

    def probability(self, n: int, p: int) -> float:
        return self.parked[(n, p)] / self.samples

    def standard_error(self, n: int, p: int) -> float:
        q = self.probability(n, p)
        return math.sqrt(q * (1 - q) / self.samples)

    def to_frame(self, n_max: int | None = None, p_max: int | None = None) -> pd.DataFrame:
        """One row per (n, p) cell with the empirical probability and its error."""
        n_max = n_max or self.max_size
        if p_max is None:
            p_max = max((p for _, p in self.parked), default=0)
        rows = []
        for n in range(1, n_max + 1):
            for p in range(p_max + 1):
                rows.append(
                    {
                        "n": n,
                        "p": p,
                        "count": self.parked[(n, p)],
                        "probability": self.probability(n, p),
                        "stderr": self.standard_error(n, p),
                    }
                )
        return pd.DataFrame(rows)

    def cluster_frame(self) -> pd.DataFrame:
        sizes = sorted(self.cluster_sizes)
        return pd.DataFrame(
            {"cluster_size": sizes, "count": [self.cluster_sizes[s] for s in sizes]}
        )

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "chunk_size": self.chunk_size,
            "max_size": self.max_size,
            "censored": self.censored,
            "sizes": {str(n): self.sizes[n] for n in sorted(self.sizes)},
            "cluster_sizes": {str(s): self.cluster_sizes[s] for s in sorted(self.cluster_sizes)},
        }


def compare_with_oracle(result: MCResult, table, n_max: int, p_max: int) -> pd.DataFrame:
    """
    Empirical against exact cell probabilities 2·4^(-n)·F_{n,p}.

    The z column is (empirical - exact) / standard error, with the error
    taken from the exact probability so that empty cells stay finite.
    """
    rows = []
    for n in range(1, n_max + 1):
        for p in range(p_max + 1):
            exact = table.probability(n, p)
            q = float(exact)
            se = math.sqrt(q * (1 - q) / result.samples)
            empirical = result.probability(n, p)
            rows.append(
                {
                    "n": n,
                    "p": p,
                    "exact": q,
                    "empirical": empirical,
                    "stderr": se,
                    "z": (empirical - q) / se if se else (0.0 if empirical == 0 else math.inf),
                }
            )
    return pd.DataFrame(rows)


# -------------------------------------------------------------------
# Sampling
# -------------------------------------------------------------------


def _label_distribution(ws: WeightSequence) -> tuple[np.ndarray, np.ndarray]:
    _, _, is_probability = moments(ws)
    if not is_probability:
        raise OutOfScopeError("Monte Carlo needs weights that form a probability distribution")
    if ws.degree is None:
        raise OutOfScopeError("Monte Carlo needs weights with finite support")
    labels = [l for l in range(ws.degree + 1) if ws.coefficient(l)]
    probs = np.array([float(Fraction(ws.coefficient(l))) for l in labels])
    return np.array(labels, dtype=np.int64), probs / probs.sum()


def _tree_sizes(offspring: np.ndarray) -> np.ndarray:
    """
    Size of each tree from its first max_size preorder offspring numbers,
    0 when the tree has more than max_size vertices.
    """
    walk = 1 + np.cumsum(offspring - 1, axis=1)
    finished = walk == 0
    sizes = np.argmax(finished, axis=1) + 1
    sizes[~finished.any(axis=1)] = 0
    return sizes


def _run_chunk(
    seed_seq: np.random.SeedSequence,
    samples: int,
    labels: np.ndarray,
    probs: np.ndarray,
    max_size: int,
) -> MCResult:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    # geometric(1/2) - 1 has law 2^(-k-1) on k >= 0
    offspring = rng.geometric(0.5, size=(samples, max_size)) - 1
    cars = rng.choice(labels, size=(samples, max_size), p=probs)
    sizes = _tree_sizes(offspring)

    result = MCResult(samples=samples, seed=0, chunk_size=samples, max_size=max_size)
    result.censored = int(np.count_nonzero(sizes == 0))
    for i in np.flatnonzero(sizes):
        n = int(sizes[i])
        chi = chi_values(offspring[i, :n].tolist(), cars[i, :n].tolist())
        result.sizes[n] += 1
        occupied = [c >= 1 for c in chi]
        if all(occupied):
            result.parked[(n, chi[0] - 1)] += 1
            result.cluster_sizes[n] += 1
        else:
            for size in _cluster_sizes(offspring[i, :n].tolist(), occupied):
                result.cluster_sizes[size] += 1
    return result


def _cluster_sizes(child_counts: list[int], occupied: list[bool]) -> list[int]:
    n = len(child_counts)
    parents = preorder_parents(child_counts)
    top = list(range(n))
    # parents precede children in preorder
    for v in range(1, n):
        if occupied[v] and occupied[parents[v]]:
            top[v] = top[parents[v]]
    counts = Counter(top[v] for v in range(n) if occupied[v])
    return [counts[t] for t in sorted(counts)]


def gw_parking_mc(
    ws: WeightSequence,
    samples: int,
    seed: int,
    max_size: int = DEFAULT_MAX_SIZE,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    progress: bool = False,
) -> MCResult:
    """
    Sample geometric Galton-Watson trees with random car arrivals.

    Args:
        ws: Car-arrival distribution with finite support.
        samples: Number of trees.
        seed: Root seed of the per-chunk RNG streams.
        max_size: Trees above this size are counted as censored.
        workers: Worker processes; 1 runs in-process.
        chunk_size: Samples per RNG stream.
        progress: Show a progress bar on stderr.

    Returns:
        MCResult with counts for every size up to max_size.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    labels, probs = _label_distribution(ws)
    n_chunks = -(-samples // chunk_size)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    plan = [min(chunk_size, samples - i * chunk_size) for i in range(n_chunks)]
    logger.info(
        f"Monte Carlo: {samples} trees, {n_chunks} chunks, {workers} worker(s), seed {seed}"
    )

    result = MCResult(samples=samples, seed=seed, chunk_size=chunk_size, max_size=max_size)
    args = [(s, k, labels, probs, max_size) for s, k in zip(streams, plan)]
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=Console(stderr=True),
        disable=not progress,
        transient=True,
    ) as bar:
        task = bar.add_task("Sampling trees...", total=samples)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_chunk, *a) for a in args]
                for i, future in enumerate(futures):
                    result.merge(future.result())
                    bar.update(task, advance=plan[i])
                    logger.debug(f"chunk {i + 1}/{n_chunks} merged")
        else:
            for i, a in enumerate(args):
                result.merge(_run_chunk(*a))
                bar.update(task, advance=plan[i])
                logger.debug(f"chunk {i + 1}/{n_chunks} done")

    logger.info(f"Monte Carlo done: {result.censored} censored trees above size {max_size}")
    return result

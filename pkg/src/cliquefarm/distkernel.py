"""Distributed search kernel: one job explores a slice of the search tree.

A job is an integer t in [0, f*n). Depth-1 branches are labelled in pop
order from (stack size - 1) down to 0; a job descends only into the depth-1
branch labelled t mod n, and within it only into depth-2 branches whose
label is congruent to floor(t / n) modulo the split factor f. Every depth-2
address is therefore covered by exactly one job, and running all f*n jobs
is equivalent to the sequential search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import SearchContext, colour_sort
from .graph import Graph, degree_sort

DEFAULT_SPLIT_FACTOR = 8

BoundRefresher = Callable[[SearchContext], None]


@dataclass(frozen=True)
class JobSpec:
    """One unit of distributable work: job id t plus the incumbent to inject."""

    t: int
    n: int
    f: int = DEFAULT_SPLIT_FACTOR
    c: int = 0
    arity: int = 2

    def __post_init__(self) -> None:
        if self.n < 1 or self.f < 1:
            raise ValueError(f"need n >= 1 and f >= 1, got n={self.n} f={self.f}")
        if not 0 <= self.t < self.f * self.n:
            raise ValueError(f"job id {self.t} outside [0, {self.f * self.n})")
        if self.c < 0:
            raise ValueError(f"initial bound must be >= 0, got {self.c}")
        if self.arity != 2:
            raise ValueError("only depth-2 splitting is supported")

    @property
    def first_level(self) -> int:
        return self.t % self.n

    @property
    def second_level_residue(self) -> int:
        return self.t // self.n


@dataclass(frozen=True)
class BranchAddress:
    """Position of a depth-2 node: labels of its depth-1 and depth-2 branches."""

    first: int
    second: int


def job_membership(spec: JobSpec, addr: BranchAddress) -> bool:
    """True iff the depth-2 address belongs to this job's slice."""
    return (
        addr.first == spec.first_level
        and addr.second % spec.f == spec.second_level_residue
    )


def consider_branch(c_size: int, covered: bool, arity: int = 2) -> bool:
    """Branch filter: pass everything off the critical depth, filter at it."""
    return c_size < arity or c_size > arity or covered


def dist_expand(
    c: list[int],
    p: list[int],
    spec: JobSpec,
    ctx: SearchContext,
    g: Graph,
    refresher: BoundRefresher | None = None,
) -> None:
    """As core.expand, restricted to the depth-2 addresses covered by spec.

    ctx.best_size must be initialized to spec.c by the caller. `refresher`,
    when given, is invoked between depth-1 branch expansions and may raise
    ctx.best_size (periodic re-read of a shared incumbent).
    """
    ctx.nodes += 1
    colouring = colour_sort(p, g)
    stack = colouring.stack
    colour = colouring.colour
    adj = g.adj
    depth = len(c)
    popped = 0
    for i in range(len(stack) - 1, -1, -1):
        v = stack[i]
        if colour[v] + depth <= ctx.best_size:
            return
        if depth == 0:
            # label of this depth-1 branch is i (pop order, size-1 down to 0)
            if i != spec.first_level:
                popped |= 1 << v
                continue
        elif depth == 1:
            if refresher is not None:
                refresher(ctx)
                if colour[v] + depth <= ctx.best_size:
                    return
            if i % spec.f != spec.second_level_residue:
                popped |= 1 << v
                continue
        c.append(v)
        av = adj[v]
        p2 = [w for w in p if av >> w & 1 and not popped >> w & 1]
        if not p2:
            if depth + 1 > ctx.best_size:
                ctx.best_clique = c.copy()
                ctx.best_size = depth + 1
        else:
            dist_expand(c, p2, spec, ctx, g, refresher)
        c.pop()
        popped |= 1 << v
        if depth == 0:
            # the single covered depth-1 branch is done; nothing else to do
            return


def mc_dist(
    g: Graph,
    spec: JobSpec,
    order: list[int] | None = None,
    refresher: BoundRefresher | None = None,
) -> tuple[list[int], SearchContext]:
    """Run one job; returns ([] if nothing beats spec.c, else clique, stats).

    The initial ordering is identical to the sequential search so branch
    labels agree across all jobs. `order` may carry a precomputed degree sort
    (workers compute it once per graph).
    """
    if spec.n != g.n:
        raise ValueError(f"job is for n={spec.n} but graph has n={g.n}")
    ctx = SearchContext(best_size=spec.c)
    if order is None:
        order = degree_sort(g)
    dist_expand([], list(order), spec, ctx, g, refresher)
    return sorted(ctx.best_clique), ctx


def all_jobs(n: int, f: int = DEFAULT_SPLIT_FACTOR, c: int = 0) -> list[JobSpec]:
    """The full f*n-job partition for a graph of n vertices."""
    return [JobSpec(t=t, n=n, f=f, c=c) for t in range(f * n)]

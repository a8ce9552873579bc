"""Sequential exact maximum clique search with a greedy colour bound.

The search grows a clique C from an ordered candidate set P. Each node
colour-sorts P greedily, then branches on vertices in non-increasing colour
order; a branch is cut when colour(v) + |C| cannot beat the incumbent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, degree_sort


@dataclass
class Colouring:
    """Result of the greedy colour-sort of a candidate set.

    `stack` lists vertices grouped by colour class 1..colours_used in
    insertion order, so popping from the end yields non-increasing colours.
    `colour` maps each stacked vertex to its colour.
    """

    stack: list[int]
    colour: dict[int, int]
    colours_used: int


@dataclass
class SearchContext:
    """Mutable incumbent state for one search invocation."""

    best_clique: list[int] = field(default_factory=list)
    best_size: int = 0
    nodes: int = 0


def colour_sort(p: list[int], g: Graph) -> Colouring:
    """Greedy sequential colouring of P in its given order.

    Each vertex takes the smallest colour class containing none of its
    neighbours; classes keep insertion order and are concatenated to build
    the stack.
    """
    adj = g.adj
    class_masks: list[int] = []
    class_members: list[list[int]] = []
    colour: dict[int, int] = {}
    for v in p:
        av = adj[v]
        for k in range(len(class_masks)):
            if not av & class_masks[k]:
                class_masks[k] |= 1 << v
                class_members[k].append(v)
                colour[v] = k + 1
                break
        else:
            class_masks.append(1 << v)
            class_members.append([v])
            colour[v] = len(class_masks)
    stack: list[int] = []
    for members in class_members:
        stack.extend(members)
    return Colouring(stack=stack, colour=colour, colours_used=len(class_masks))


def adjacent_to_set(v: int, s, g: Graph) -> bool:
    """True iff v is adjacent to some vertex of s."""
    av = g.adj[v]
    return any(av >> w & 1 for w in s)


def expand(c: list[int], p: list[int], ctx: SearchContext, g: Graph) -> None:
    """Explore cliques extending C with subsets of P; updates ctx in place.

    P must be ordered (degree order at the root, inherited below) and every
    vertex of P adjacent to all of C.
    """
    ctx.nodes += 1
    colouring = colour_sort(p, g)
    stack = colouring.stack
    colour = colouring.colour
    adj = g.adj
    c_size = len(c)
    best = ctx.best_size
    popped = 0
    for i in range(len(stack) - 1, -1, -1):
        v = stack[i]
        if colour[v] + c_size <= best:
            return
        c.append(v)
        av = adj[v]
        p2 = [w for w in p if av >> w & 1 and not popped >> w & 1]
        if not p2:
            if c_size + 1 > best:
                ctx.best_clique = c.copy()
                ctx.best_size = best = c_size + 1
        else:
            expand(c, p2, ctx, g)
            best = ctx.best_size
        c.pop()
        popped |= 1 << v


def mc(g: Graph) -> tuple[list[int], SearchContext]:
    """Find a maximum clique of g; returns (clique, stats).

    Deterministic: the same graph always yields the same clique and the same
    node count.
    """
    ctx = SearchContext()
    order = degree_sort(g)
    expand([], order, ctx, g)
    return sorted(ctx.best_clique), ctx

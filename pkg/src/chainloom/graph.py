"""Graph structure helpers: topological order, reachability, predecessors."""

from __future__ import annotations

import heapq

from .errors import CycleError
from .model import Template


def adjacency(t: Template) -> dict[str, set[str]]:
    """Successor sets keyed by node id (every node present)."""
    adj: dict[str, set[str]] = {n.id: set() for n in t.nodes}
    for e in t.edges:
        if e.source.node in adj and e.target.node in adj:
            adj[e.source.node].add(e.target.node)
    return adj


def topological_order(t: Template) -> list[str]:
    """Kahn's algorithm over a min-heap frontier.

    Ties among ready nodes break by ascending lexicographic node id, so the
    order is a pure function of the template.
    """
    adj = adjacency(t)
    indegree = {node: 0 for node in adj}
    for succs in adj.values():
        for v in succs:
            indegree[v] += 1
    frontier = [node for node, deg in indegree.items() if deg == 0]
    heapq.heapify(frontier)
    order: list[str] = []
    while frontier:
        node = heapq.heappop(frontier)
        order.append(node)
        for v in sorted(adj[node]):
            indegree[v] -= 1
            if indegree[v] == 0:
                heapq.heappush(frontier, v)
    if len(order) != len(adj):
        raise CycleError(set(adj) - set(order))
    return order


def predecessors(t: Template, node_id: str) -> set[str]:
    return {e.source.node for e in t.edges if e.target.node == node_id}


def _reachable(adj: dict[str, set[str]], start: str) -> set[str]:
    seen: set[str] = set()
    stack = [start]
    while stack:
        node = stack.pop()
        for v in adj.get(node, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def descendants(t: Template, node_id: str) -> set[str]:
    """All nodes reachable from ``node_id`` (exclusive)."""
    return _reachable(adjacency(t), node_id)


def ancestors(t: Template, node_id: str) -> set[str]:
    """All nodes from which ``node_id`` is reachable (exclusive)."""
    reverse: dict[str, set[str]] = {n.id: set() for n in t.nodes}
    for e in t.edges:
        if e.source.node in reverse and e.target.node in reverse:
            reverse[e.target.node].add(e.source.node)
    return _reachable(reverse, node_id)


def cycle_nodes(t: Template) -> set[str]:
    """Node ids lying on at least one cycle (Tarjan SCCs, iterative)."""
    adj = adjacency(t)
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    result: set[str] = set()

    for root in adj:
        if root in index:
            continue
        work = [(root, iter(sorted(adj[root])))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for v in it:
                if v not in index:
                    index[v] = lowlink[v] = counter[0]
                    counter[0] += 1
                    stack.append(v)
                    on_stack.add(v)
                    work.append((v, iter(sorted(adj[v]))))
                    advanced = True
                    break
                if v in on_stack:
                    lowlink[node] = min(lowlink[node], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1 or node in adj[node]:
                    result.update(component)
    return result

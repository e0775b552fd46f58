"""Independent oracles and random-template generators for the test suite.

Everything here is deliberately written without reusing the engine's code
paths: the Kahn oracle scans lists instead of using a heap, reachability is
a plain BFS, and the FNV-1a reference was written from the published
constants before the backend existed.
"""

from __future__ import annotations

import random
from functools import reduce

from chainloom.model import (
    Edge,
    GenerationParams,
    HandleRef,
    NodeKind,
    NodeSpec,
    Template,
)

# --- independent FNV-1a 64 reference -------------------------------------

def reference_fnv1a_64_hex(text: str) -> str:
    def step(h: int, b: int) -> int:
        return ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF

    return format(reduce(step, text.encode("utf-8"), 0xCBF29CE484222325), "016x")


# --- brute-force graph oracles --------------------------------------------

def edge_pairs(t: Template) -> list[tuple[str, str]]:
    return [(e.source.node, e.target.node) for e in t.edges]


def oracle_kahn_sorted(t: Template) -> list[str] | None:
    """Kahn's algorithm selecting the lexicographically smallest ready node
    by linear scan; None if a cycle remains."""
    remaining = {n.id for n in t.nodes}
    pairs = edge_pairs(t)
    order = []
    while remaining:
        ready = sorted(
            node for node in remaining
            if not any(v == node and u in remaining for u, v in pairs)
        )
        if not ready:
            return None
        order.append(ready[0])
        remaining.discard(ready[0])
    return order


def oracle_reachable(t: Template, start: str) -> set[str]:
    """Descendants of ``start`` by breadth-first search over raw edge pairs."""
    pairs = edge_pairs(t)
    seen: set[str] = set()
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for u, v in pairs:
            if u == node and v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


def oracle_ancestors(t: Template, target: str) -> set[str]:
    pairs = [(v, u) for u, v in edge_pairs(t)]
    seen: set[str] = set()
    frontier = [target]
    while frontier:
        node = frontier.pop()
        for u, v in pairs:
            if u == node and v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


def is_valid_topo_order(t: Template, order: list[str]) -> bool:
    ids = [n.id for n in t.nodes]
    if sorted(order) != sorted(ids):
        return False
    position = {node: i for i, node in enumerate(order)}
    return all(position[u] < position[v] for u, v in edge_pairs(t))


# --- random template generation --------------------------------------------

_TARGET_HANDLES = {
    NodeKind.PROMPT: ["input"],
    NodeKind.PROMPT_WITH_CONTEXT: ["input", "context"],
    NodeKind.VISUALISE: ["prompt"],
}


def random_template(
    rng: random.Random,
    max_nodes: int = 12,
    allow_visualise: bool = True,
    big_token_budget: bool = False,
    rich_text: bool = False,
) -> Template:
    """A random structurally-valid, acyclic template.

    Nodes are ordered so edges only point forward. Visualise nodes are
    always sinks. With ``big_token_budget`` every generator gets the maximum
    token budget so mock truncation never hides upstream text.
    """
    n = rng.randint(1, max_nodes)
    kinds = []
    for i in range(n):
        choices = [NodeKind.TEXT_INPUT, NodeKind.PROMPT, NodeKind.PROMPT_WITH_CONTEXT]
        if allow_visualise and i == n - 1:
            choices.append(NodeKind.VISUALISE)
        if i == 0:
            choices = [NodeKind.TEXT_INPUT, NodeKind.PROMPT, NodeKind.PROMPT_WITH_CONTEXT]
        kinds.append(rng.choice(choices))

    def body(i: int) -> str:
        if rich_text:
            alphabet = "abc \n\"\\é☃"
            return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        return f"<b{i:02d}>"  # delimited: never a substring of another body

    nodes = []
    for i, kind in enumerate(kinds):
        params = None
        if kind is not NodeKind.TEXT_INPUT:
            if big_token_budget:
                params = GenerationParams(temperature=round(rng.uniform(0, 2), 2),
                                          max_output_tokens=4096)
            else:
                params = GenerationParams(
                    temperature=round(rng.uniform(0, 2), 2),
                    max_output_tokens=rng.randint(1, 4096),
                )
        nodes.append(NodeSpec(
            id=f"n{i:02d}", kind=kind, label=f"node {i}", body=body(i),
            params=params,
            position=(round(rng.uniform(-500, 500), 1), round(rng.uniform(-500, 500), 1)),
        ))

    edges = []
    used_pairs = set()
    edge_counter = 0
    for j, target in enumerate(nodes):
        if target.kind is NodeKind.TEXT_INPUT or j == 0:
            continue
        for handle in _TARGET_HANDLES[target.kind]:
            for _ in range(rng.randint(0, 2)):
                i = rng.randrange(j)
                source = nodes[i]
                if source.kind is NodeKind.VISUALISE:
                    continue
                pair = (source.id, "output", target.id, handle)
                if pair in used_pairs:
                    continue
                used_pairs.add(pair)
                edge_counter += 1
                edges.append(Edge(
                    id=f"e{edge_counter:02d}",
                    source=HandleRef(source.id, "output"),
                    target=HandleRef(target.id, handle),
                ))

    name = "random" if not rich_text else "random \"☃\" template"
    return Template(name=name, nodes=tuple(nodes), edges=tuple(edges))


def all_dags(node_count: int) -> list[Template]:
    """Every labeled DAG on ``node_count`` prompt nodes (edges on one shared
    handle, forward and backward pairs considered, cyclic subsets skipped)."""
    ids = [f"n{i}" for i in range(node_count)]
    pairs = [(a, b) for a in ids for b in ids if a != b]
    templates = []
    for mask in range(1 << len(pairs)):
        chosen = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if _has_cycle(ids, chosen):
            continue
        nodes = tuple(
            NodeSpec(id=i, kind=NodeKind.PROMPT, body=i, params=GenerationParams())
            for i in ids
        )
        edges = tuple(
            Edge(id=f"e{k}", source=HandleRef(u, "output"), target=HandleRef(v, "input"))
            for k, (u, v) in enumerate(chosen)
        )
        templates.append(Template(name=f"dag{node_count}-{mask}", nodes=nodes, edges=edges))
    return templates


def _has_cycle(ids: list[str], pairs: list[tuple[str, str]]) -> bool:
    remaining = set(ids)
    while remaining:
        ready = [n for n in remaining
                 if not any(v == n and u in remaining for u, v in pairs)]
        if not ready:
            return True
        remaining.difference_update(ready)
    return False

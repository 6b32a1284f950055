"""Hopcroft-Karp maximum bipartite matching.

Left vertices are ``0..len(adj)-1``; ``adj[u]`` lists right vertices in the
order they should be tried. Ties are broken by that order and by left index,
so results are reproducible.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

INF = float("inf")


def hopcroft_karp(adj: Sequence[Sequence[int]]) -> dict[int, int]:
    """Maximum matching as a ``{left: right}`` dict."""
    n_left = len(adj)
    match_l: list[int | None] = [None] * n_left
    match_r: dict[int, int] = {}

    # greedy start; on the small dense graphs here it often finishes the job
    for u in range(n_left):
        for v in adj[u]:
            if v not in match_r:
                match_l[u] = v
                match_r[v] = u
                break

    dist = [INF] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while None in match_l and bfs():
        for u in range(n_left):
            if match_l[u] is None:
                dfs(u)
    return {u: v for u, v in enumerate(match_l) if v is not None}


def hall_violator(adj: Sequence[Sequence[int]], matching: dict[int, int]) -> list[int]:
    """Left vertices whose neighbourhood is smaller than themselves.

    Starts at the first unmatched left vertex and follows alternating paths;
    with a maximum matching every reached right vertex is matched, so the
    reached left set has exactly one more vertex than its neighbourhood.
    Returns ``[]`` when the matching saturates the left side.
    """
    start = next((u for u in range(len(adj)) if u not in matching), None)
    if start is None:
        return []
    owner = {v: u for u, v in matching.items()}
    seen_l = {start}
    seen_r = set()
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen_r:
                seen_r.add(v)
                w = owner[v]
                if w not in seen_l:
                    seen_l.add(w)
                    queue.append(w)
    return sorted(seen_l)

"""Maximum bipartite matching via Hopcroft-Karp.

Used as an independent distance-to-monotone oracle: the maximum number of
disjoint violating pairs (x below y, f(x)=+1, f(y)=-1) over 2^n equals the
distance to the nearest monotone function.  Kept free of any halfspace
structure on purpose, so it can cross-check the weight-based oracle.
"""

from __future__ import annotations

from collections import deque

INF = -1


def maximum_matching_size(adj: dict[int, list[int]]) -> int:
    """Size of a maximum matching; adj maps left vertices to right neighbours.

    Left vertices are processed in sorted order so results (and intermediate
    states) are deterministic across runs.
    """
    left = sorted(adj)
    pair_left: dict[int, int] = {}
    pair_right: dict[int, int] = {}
    dist: dict[int, int] = {}

    # greedy warm start cuts most augmentation rounds
    matched = 0
    for u in left:
        for v in adj[u]:
            if v not in pair_right:
                pair_left[u] = v
                pair_right[v] = u
                matched += 1
                break

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if u not in pair_left:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = pair_right.get(v)
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = pair_right.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_left[u] = v
                pair_right[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in left:
            if u not in pair_left and dfs(u):
                matched += 1
    return matched

"""Brute-force reference implementations, written from the definitions only.

Everything here works on an explicit point list and a median callable, so it
shares no code path with the package beyond the operation itself.
"""
from __future__ import annotations

import itertools
from typing import Callable, Hashable, Sequence

Med = Callable[[Hashable, Hashable, Hashable], Hashable]


def coord_median(a, b, c):
    return tuple(sorted(t)[1] for t in zip(a, b, c))


def cube_points(k: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=k))


def table_median(alg) -> Med:
    t = alg.table
    return lambda a, b, c: int(t[a, b, c])


def closure(points: Sequence, med: Med) -> frozenset:
    cur = set(points)
    while True:
        new = {med(a, b, c) for a in cur for b in cur for c in cur} - cur
        if not new:
            return frozenset(cur)
        cur |= new


def is_closed(subset, med: Med) -> bool:
    s = set(subset)
    return all(med(a, b, c) in s for a in s for b in s for c in s)


def subalgebras(points: Sequence, med: Med) -> list[frozenset]:
    out = []
    for r in range(1, len(points) + 1):
        for combo in itertools.combinations(points, r):
            if is_closed(combo, med):
                out.append(frozenset(combo))
    return out


def interval(points, med: Med, x, y) -> frozenset:
    return frozenset(z for z in points if med(x, y, z) == z)


def is_convex(points, med: Med, s) -> bool:
    s = set(s)
    return all(interval(points, med, x, y) <= s for x in s for y in s)


def walls(points, med: Med) -> set[frozenset]:
    """Every unordered convex/co-convex bipartition, as a frozenset of two frozensets."""
    pts = list(points)
    out = set()
    for r in range(1, len(pts)):
        for side in itertools.combinations(pts, r):
            a = frozenset(side)
            b = frozenset(pts) - a
            if is_convex(pts, med, a) and is_convex(pts, med, b):
                out.add(frozenset((a, b)))
    return out


def crosses(w1, w2) -> bool:
    return all(p & q for p in w1 for q in w2)


def rank_from_walls(ws) -> int:
    ws = list(ws)
    best = 0
    for r in range(1, len(ws) + 1):
        if any(all(crosses(p, q) for p, q in itertools.combinations(fam, 2))
               for fam in itertools.combinations(ws, r)):
            best = r
        else:
            break
    return best


def orientations(ws) -> list[tuple]:
    """Choices of one side per wall, pairwise intersecting."""
    ws = [sorted(w, key=sorted) for w in ws]
    out = []
    for choice in itertools.product((0, 1), repeat=len(ws)):
        sides = [w[c] for w, c in zip(ws, choice)]
        if all(p & q for p, q in itertools.combinations(sides, 2)):
            out.append(choice)
    return out


def automorphism_count(points, med: Med) -> int:
    pts = list(points)
    count = 0
    for perm in itertools.permutations(pts):
        f = dict(zip(pts, perm))
        if all(f[med(a, b, c)] == med(f[a], f[b], f[c])
               for a, b, c in itertools.combinations_with_replacement(pts, 3)):
            count += 1
    return count


def shadow(points, med: Med, u, v) -> frozenset:
    """Points whose gate onto [u, v] is u."""
    return frozenset(x for x in points if med(u, x, v) == u)


def is_chain(points, med: Med, s) -> bool:
    """Some base point ``e`` of ``s`` makes the order ``a <=_e b`` total on ``s``."""
    s = list(s)
    if len(s) <= 2:
        return True
    return any(all(med(e, a, b) in (a, b) for a in s for b in s) for e in s)


def is_chain_interval(points, med: Med, x, y) -> bool:
    span = interval(points, med, x, y)
    return all(med(x, a, b) in (a, b) for a in span for b in span)


def graph_distance(points, edges) -> dict:
    import collections
    adj = collections.defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    dist = {}
    for s in points:
        seen = {s: 0}
        queue = collections.deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen[y] = seen[x] + 1
                    queue.append(y)
        for t, d in seen.items():
            dist[s, t] = d
    return dist

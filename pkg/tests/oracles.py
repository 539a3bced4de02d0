"""Brute-force oracles, written without the package's own algorithms."""
from __future__ import annotations

import itertools


# ---------------------------------------------------------------- lattices

def _glb(leq, m, x, y):
    lower = [z for z in range(m) if leq[z][x] and leq[z][y]]
    best = [z for z in lower if all(leq[w][z] for w in lower)]
    return best[0] if best else None


def _lub(leq, m, x, y):
    upper = [z for z in range(m) if leq[x][z] and leq[y][z]]
    best = [z for z in upper if all(leq[z][w] for w in upper)]
    return best[0] if best else None


def _is_partial_order(leq, m):
    for x, y in itertools.product(range(m), repeat=2):
        if x != y and leq[x][y] and leq[y][x]:
            return False
    return all(not (leq[x][y] and leq[y][z]) or leq[x][z] for x, y, z in itertools.product(range(m), repeat=3))


def _canon(leq, m):
    return min(tuple(leq[p[i]][p[j]] for i in range(m) for j in range(m)) for p in itertools.permutations(range(m)))


def brute_lattices(m: int) -> list[tuple]:
    """Canonical order matrices of all lattices of size ``m``: every relation
    on the interior points, bottom and top adjoined, glb/lub by search."""
    if m <= 2:
        return [_canon([[i <= j for j in range(m)] for i in range(m)], m)]
    inner = list(range(1, m - 1))
    pairs = [(a, b) for a in inner for b in inner if a != b]
    out = set()
    for bits in itertools.product((False, True), repeat=len(pairs)):
        leq = [[i == j or i == 0 or j == m - 1 for j in range(m)] for i in range(m)]
        for (a, b), v in zip(pairs, bits):
            leq[a][b] = v
        if not _is_partial_order(leq, m):
            continue
        if all(_glb(leq, m, x, y) is not None and _lub(leq, m, x, y) is not None
               for x, y in itertools.combinations(range(m), 2)):
            out.add(_canon(leq, m))
    return sorted(out)


def brute_distributive(leq, m) -> bool:
    """No sublattice isomorphic to M3 or N5."""
    meet = [[_glb(leq, m, x, y) for y in range(m)] for x in range(m)]
    join = [[_lub(leq, m, x, y) for y in range(m)] for x in range(m)]
    for sub in itertools.combinations(range(m), 5):
        s = set(sub)
        if any(meet[x][y] not in s or join[x][y] not in s for x in sub for y in sub):
            continue
        lo = next(z for z in sub if all(leq[z][w] for w in sub))
        hi = next(z for z in sub if all(leq[w][z] for w in sub))
        mid = [z for z in sub if z not in (lo, hi)]
        comparable = sum(leq[a][b] or leq[b][a] for a, b in itertools.combinations(mid, 2))
        # M3 has no comparable middle pair, N5 has exactly one
        if comparable in (0, 1):
            return False
    return True


def brute_meet_irreducible(leq, m, x) -> bool:
    top = next(t for t in range(m) if all(leq[z][t] for z in range(m)))
    if x == top:
        return False
    for a, b in itertools.product(range(m), repeat=2):
        if _glb(leq, m, a, b) == x and x not in (a, b):
            return False
    return True


# ---------------------------------------------------------------- ultrametric spaces

def triangle_ok(L, D) -> bool:
    n = len(D)
    return all(L.le(D[x][z], L.join[D[x][y]][D[y][z]]) for x, y, z in itertools.product(range(n), repeat=3))


def direct_distance(L, parts, x, y):
    """Meet of all labels whose partition relates ``x`` and ``y``, by search
    over the lower bounds."""
    related = [lam for lam in range(L.size) if parts[lam][x] == parts[lam][y]]
    lower = [z for z in range(L.size) if all(L.le(z, lam) for lam in related)]
    return next(z for z in lower if all(L.le(w, z) for w in lower))


# ---------------------------------------------------------------- permutation structures

def brute_class_count(n: int, k: int) -> int:
    """Isomorphism classes of ``k`` linear orders on ``n`` points, by
    minimizing over all relabelings."""
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for orders in itertools.product(perms, repeat=k):
        key = min(tuple(tuple(p[o[i]] for i in range(n)) for o in orders) for p in perms)
        # key lists each order as positions of relabeled points
        seen.add(key)
    return len(seen)


def brute_two_types(k: int) -> set:
    """Sign vectors realized by a pair of distinct points in some structure."""
    out = set()
    for orders in itertools.product(itertools.permutations(range(2)), repeat=k):
        out.add(tuple(o[0] < o[1] for o in orders))
    return out


def brute_triangle_classes(k: int) -> int:
    return brute_class_count(3, k)


def has_linear_extension(n: int, rel) -> bool:
    return any(all(p.index(a) < p.index(b) for a, b in rel) for p in itertools.permutations(range(n)))


def brute_completions(n: int, k: int, typed: dict) -> list[dict]:
    """Every assignment of types to the untyped pairs that some ``k``
    linear orders realize."""
    free = [(x, y) for x in range(n) for y in range(x + 1, n) if (x, y) not in typed]
    out = []
    for choice in itertools.product(range(1 << k), repeat=len(free)):
        full = dict(typed)
        full.update(zip(free, choice))
        ok = True
        for i in range(k):
            rel = [(x, y) if t >> i & 1 else (y, x) for (x, y), t in full.items()]
            if not has_linear_extension(n, rel):
                ok = False
                break
        if ok:
            out.append(dict(zip(free, choice)))
    return out

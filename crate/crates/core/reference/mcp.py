def maximum_clique(G):
    nbrs = [set(a) for a in G]
    best = 0

    def expand(size, p, x):
        nonlocal best
        if not p and not x:
            best = max(best, size)
            return
        if size + len(p) <= best:
            return
        pivot = max(p | x, key=lambda u: len(p & nbrs[u]))
        for v in sorted(p - nbrs[pivot]):
            expand(size + 1, p & nbrs[v], x & nbrs[v])
            p = p - {v}
            x = x | {v}

    expand(0, set(range(len(G))), set())
    return best

def maximum_independent_set(G):
    order = sorted(range(len(G)), key=lambda v: len(G[v]))
    blocked = [False] * len(G)
    size = 0
    for v in order:
        if not blocked[v]:
            size += 1
            blocked[v] = True
            for u in G[v]:
                blocked[u] = True
    return size

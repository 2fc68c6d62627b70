def minimum_vertex_cover(G):
    n = len(G)
    uncovered = [len(G[v]) for v in range(n)]
    in_cover = [False] * n
    size = 0
    while True:
        best = -1
        for v in range(n):
            if uncovered[v] > 0 and (best < 0 or uncovered[v] > uncovered[best]):
                best = v
        if best < 0:
            return size
        in_cover[best] = True
        uncovered[best] = 0
        size += 1
        for w in G[best]:
            if not in_cover[w]:
                uncovered[w] -= 1

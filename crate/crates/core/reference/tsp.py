def travelling_salesman(G):
    n = len(G)
    best = None
    for start in range(n):
        visited = [False] * n
        visited[start] = True
        v = start
        length = 0
        for _ in range(n - 1):
            u = min((w for w in range(n) if not visited[w]), key=lambda w: (G[v][w], w))
            length += G[v][u]
            visited[u] = True
            v = u
        length += G[v][start]
        if best is None or length < best:
            best = length
    return best

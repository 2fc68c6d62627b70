from collections import deque


def shortest_path_unweighted(G, u, v):
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            return dist[x]
        for y in G[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    raise ValueError("target unreachable")

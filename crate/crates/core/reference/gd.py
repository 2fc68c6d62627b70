from collections import deque


def graph_diameter(G):
    n = len(G)
    best = 0
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in G[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if min(dist) < 0:
            raise ValueError("graph is disconnected")
        best = max(best, max(dist))
    return best

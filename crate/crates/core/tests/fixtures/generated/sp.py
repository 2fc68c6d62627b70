from collections import deque
def shortest_path_unweighted(G, u, v):
    Q = deque([(u, [u], 0)])
    V = set()
    while Q:
        node, path, dist = Q.popleft()
        if node == v:
            return dist
        V.add(node)
        for neighbor in G[node]:
            if neighbor not in V:
                Q.append((neighbor, path + [neighbor], dist + 1))

def common_neighbors(G, u, v):
    return sorted((set(G[u]) & set(G[v])) - {u, v})

from collections import deque


def maximum_common_subgraph(G1, G2):
    forward = {}
    backward = {}
    pairs = []

    def try_map(u1, u2):
        for a1, a2 in pairs:
            if G1.has_edge(u1, a1) != G2.has_edge(u2, a2):
                return False
        forward[u1] = u2
        backward[u2] = u1
        pairs.append((u1, u2))
        return True

    def free(u1, u2):
        return u1 not in forward and u2 not in backward

    deg1 = {u: G1.degree[u] for u in G1.nodes()}
    deg2 = {u: G2.degree[u] for u in G2.nodes()}
    candidates = sorted(
        ((u1, u2) for u1 in sorted(G1.nodes()) for u2 in sorted(G2.nodes())),
        key=lambda p: (abs(deg1[p[0]] - deg2[p[1]]), -deg1[p[0]], p[0], p[1]),
    )
    for u1, u2 in candidates:
        if not free(u1, u2) or not try_map(u1, u2):
            continue
        queue = deque([(u1, u2)])
        while queue:
            v1, v2 = queue.popleft()
            for k1 in sorted(G1.neighbors(v1)):
                for k2 in sorted(G2.neighbors(v2)):
                    if free(k1, k2) and abs(deg1[k1] - deg2[k2]) <= 2 and try_map(k1, k2):
                        queue.append((k1, k2))
    return len(pairs)

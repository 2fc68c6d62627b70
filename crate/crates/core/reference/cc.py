from collections import deque


def connected_component_undirected(G):
    seen = [False] * len(G)
    count = 0
    for s in range(len(G)):
        if seen[s]:
            continue
        count += 1
        seen[s] = True
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in G[x]:
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    return count

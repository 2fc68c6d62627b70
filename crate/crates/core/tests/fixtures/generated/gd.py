from collections import deque
def graph_diameter(G):
    diameter = 0
    for i in range(len(G)):
        visited = set()
        distance = {j: float('inf') for j in range(len(G))}
        distance[i] = 0
        queue = deque([i])
        while queue:
            current_node = queue.popleft()
            visited.add(current_node)
            for neighbor in G[current_node]:
                if neighbor not in visited:
                    distance[neighbor] = min(distance[neighbor], distance[current_node] + 1)
                    queue.append(neighbor)
        diameter = max(diameter, max(distance.values()))
    return diameter

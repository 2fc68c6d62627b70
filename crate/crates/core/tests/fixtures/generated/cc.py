def connected_component_undirected(G):
    V = set(range(len(G)))
    V_prime = set()
    K = 1
    result = []
    while V!= V_prime:
        s = next((i for i in V if i not in V_prime), None)
        V_prime.add(s)
        C_K = [s]
        Q = [s]
        while Q:
            u = Q.pop(0)
            for v in G[u]:
                if v not in V_prime:
                    V_prime.add(v)
                    Q.append(v)
                    C_K.append(v)
        result.append(C_K)
        K += 1
    return K - 1
